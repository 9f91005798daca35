#include "tmas/tba.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

namespace tmas {

std::string to_string(const ClockValue& v)
{
    return v.inf ? std::string("inf") : to_decimal_string(v.value);
}

ClockConstraint ClockConstraint::compare(std::size_t clock, CmpOp op, const Rational& c)
{
    ClockConstraint g;
    g.kind = Kind::Cmp;
    g.clock = clock;
    g.cmp = op;
    g.constant = c;
    return g;
}

ClockConstraint ClockConstraint::negate(ClockConstraint a)
{
    ClockConstraint g;
    g.kind = Kind::Not;
    g.children.push_back(std::move(a));
    return g;
}

ClockConstraint ClockConstraint::all(std::vector<ClockConstraint> parts)
{
    parts.erase(std::remove_if(parts.begin(), parts.end(), [](const ClockConstraint& p) { return p.is_true(); }), parts.end());
    if (parts.empty()) return top();
    if (parts.size() == 1) return parts.front();
    ClockConstraint g;
    g.kind = Kind::And;
    g.children = std::move(parts);
    return g;
}

ClockConstraint ClockConstraint::any(std::vector<ClockConstraint> parts)
{
    for (const auto& p : parts) {
        if (p.is_true()) return top();
    }
    if (parts.size() == 1) return parts.front();
    if (parts.empty()) return negate(top());
    ClockConstraint g;
    g.kind = Kind::Or;
    g.children = std::move(parts);
    return g;
}

bool eval_guard(const Valuation& nu, const ClockConstraint& g)
{
    switch (g.kind) {
    case ClockConstraint::Kind::True: return true;
    case ClockConstraint::Kind::Cmp: {
        if (g.clock >= nu.size()) fail(ErrorCode::UndeclaredClock, "clock " + std::to_string(g.clock) + " is not declared");
        const ClockValue& v = nu[g.clock];
        if (v.inf) return g.cmp == CmpOp::Ge || g.cmp == CmpOp::Gt;
        switch (g.cmp) {
        case CmpOp::Lt: return v.value < g.constant;
        case CmpOp::Le: return v.value <= g.constant;
        case CmpOp::Eq: return v.value == g.constant;
        case CmpOp::Ge: return v.value >= g.constant;
        case CmpOp::Gt: return v.value > g.constant;
        }
        return false;
    }
    case ClockConstraint::Kind::Not: return !eval_guard(nu, g.children.front());
    case ClockConstraint::Kind::And:
        for (const auto& c : g.children) {
            if (!eval_guard(nu, c)) return false;
        }
        return true;
    case ClockConstraint::Kind::Or:
        for (const auto& c : g.children) {
            if (eval_guard(nu, c)) return true;
        }
        return false;
    }
    return false;
}

namespace {

void visit_constants(const ClockConstraint& g, const std::function<void(const Rational&)>& f)
{
    if (g.kind == ClockConstraint::Kind::Cmp) f(g.constant);
    for (const auto& c : g.children) visit_constants(c, f);
}

ClockConstraint map_constraint(const ClockConstraint& g, std::size_t clock_offset, std::int64_t scale)
{
    ClockConstraint out = g;
    out.clock += clock_offset;
    out.constant *= Rational(scale);
    for (auto& c : out.children) c = map_constraint(c, clock_offset, scale);
    return out;
}

}  // namespace

Tba::Tba(std::vector<std::string> clocks, PropSet ap) : clocks_(std::move(clocks)), ap_(std::move(ap))
{
    if (ap_.size() > 64) fail(ErrorCode::InvalidArgument, "automata support at most 64 propositions");
    ap_list_.assign(ap_.begin(), ap_.end());
}

void Tba::check_clocks(const ClockConstraint& g) const
{
    if (g.kind == ClockConstraint::Kind::Cmp && g.clock >= clocks_.size()) {
        fail(ErrorCode::UndeclaredClock, "constraint uses undeclared clock " + std::to_string(g.clock));
    }
    for (const auto& c : g.children) check_clocks(c);
}

std::size_t Tba::add_location(std::string name, const PropSet& label, bool accepting, ClockConstraint invariant)
{
    check_clocks(invariant);
    locations_.push_back({std::move(name), strict_mask(label), accepting, std::move(invariant)});
    out_.emplace_back();
    return locations_.size() - 1;
}

void Tba::add_initial(std::size_t q)
{
    if (q >= locations_.size()) fail(ErrorCode::UnknownState, "initial location out of range");
    if (std::find(initial_.begin(), initial_.end(), q) == initial_.end()) initial_.push_back(q);
}

void Tba::add_edge(std::size_t from, ClockConstraint guard, std::vector<std::size_t> resets, std::size_t to)
{
    if (from >= locations_.size() || to >= locations_.size()) fail(ErrorCode::UnknownState, "edge endpoint out of range");
    check_clocks(guard);
    for (std::size_t c : resets) {
        if (c >= clocks_.size()) fail(ErrorCode::UndeclaredClock, "reset of undeclared clock " + std::to_string(c));
    }
    std::sort(resets.begin(), resets.end());
    resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
    edges_.push_back({from, to, std::move(guard), std::move(resets)});
    out_[from].push_back(edges_.size() - 1);
}

Rational Tba::c_max() const
{
    Rational m(0);
    auto upd = [&](const Rational& c) { m = std::max(m, c); };
    for (const auto& l : locations_) visit_constants(l.invariant, upd);
    for (const auto& e : edges_) visit_constants(e.guard, upd);
    return m;
}

std::uint64_t Tba::mask(const PropSet& p) const
{
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < ap_list_.size(); ++k) {
        if (p.count(ap_list_[k])) m |= std::uint64_t{1} << k;
    }
    return m;
}

std::uint64_t Tba::strict_mask(const PropSet& p) const
{
    for (const auto& s : p) {
        if (!ap_.count(s)) fail(ErrorCode::AlphabetMismatch, "proposition '" + s + "' is outside the automaton alphabet");
    }
    return mask(p);
}

PropSet Tba::label_set(std::size_t q) const
{
    PropSet out;
    const std::uint64_t m = locations_.at(q).label;
    for (std::size_t k = 0; k < ap_list_.size(); ++k) {
        if (m >> k & 1) out.insert(ap_list_[k]);
    }
    return out;
}

TbaState initial_state(const Tba& a, std::size_t q0)
{
    if (std::find(a.initial().begin(), a.initial().end(), q0) == a.initial().end()) fail(ErrorCode::UnknownState, "not an initial location");
    TbaState s{q0, Valuation(a.clocks().size())};
    if (!eval_guard(s.nu, a.location(q0).invariant)) fail(ErrorCode::InvariantViolated, "initial valuation violates the invariant");
    return s;
}

TbaState step(const Tba& a, const TbaState& s, const Rational& delta, std::size_t edge)
{
    if (delta < Rational(0)) fail(ErrorCode::InvalidArgument, "negative delay");
    const TbaEdge& e = a.edges().at(edge);
    if (e.from != s.location) fail(ErrorCode::InvalidArgument, "edge does not leave the current location");
    Valuation delayed;
    for (const ClockValue& v : s.nu) delayed.push_back(v.plus(delta));
    if (!eval_guard(delayed, a.location(s.location).invariant)) fail(ErrorCode::InvariantViolated, "delay violates the source invariant");
    if (!eval_guard(delayed, e.guard)) fail(ErrorCode::GuardFailed, "guard " + to_string(e.guard, a.clocks()) + " fails");
    for (std::size_t c : e.resets) delayed[c] = ClockValue{};
    if (!eval_guard(delayed, a.location(e.to).invariant)) fail(ErrorCode::InvariantViolated, "target invariant fails");
    return {e.to, delayed};
}

namespace {

/// Iterative Tarjan; returns the component id of every node.
std::vector<std::size_t> tarjan(const std::vector<std::vector<std::size_t>>& adj)
{
    const std::size_t n = adj.size();
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call;
    std::size_t counter = 0, comps = 0;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, k] = call.back();
            if (k < adj[v].size()) {
                const std::size_t w = adj[v][k++];
                if (index[w] == none) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                while (true) {
                    const std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = comps;
                    if (w == done) break;
                }
                ++comps;
            }
        }
    }
    return comp;
}

Valuation cap(Valuation nu, const Rational& c_max)
{
    for (auto& v : nu) v = v.capped(c_max);
    return nu;
}

}  // namespace

bool accepts(const Tba& a, const TimedWord& w)
{
    w.validate();
    const std::size_t n = w.size();
    std::vector<std::uint64_t> letters;
    for (const auto& st : w.steps) letters.push_back(a.strict_mask(st.value));
    const Rational c_max = a.c_max();

    using Key = std::tuple<std::size_t, std::size_t, Valuation>;  // position, location, valuation
    std::map<Key, std::size_t> ids;
    std::vector<Key> nodes;
    std::vector<std::vector<std::size_t>> adj;
    std::deque<std::size_t> work;
    auto intern = [&](Key k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        const std::size_t id = nodes.size();
        ids.emplace(k, id);
        nodes.push_back(std::move(k));
        adj.emplace_back();
        work.push_back(id);
        return id;
    };
    for (std::size_t q : a.initial()) {
        Valuation zero(a.clocks().size());
        if (a.location(q).label == letters[0] && eval_guard(zero, a.location(q).invariant)) intern({0, q, zero});
    }
    while (!work.empty()) {
        const std::size_t id = work.front();
        work.pop_front();
        const auto [pos, q, nu] = nodes[id];
        const std::size_t nxt = pos + 1 < n ? pos + 1 : w.loop_start;
        const Rational delta = w.time(pos + 1) - w.time(pos);
        Valuation delayed;
        for (const ClockValue& v : nu) delayed.push_back(v.plus(delta).capped(c_max));
        if (!eval_guard(delayed, a.location(q).invariant)) continue;
        for (std::size_t e : a.out_edges(q)) {
            const TbaEdge& edge = a.edges()[e];
            if (a.location(edge.to).label != letters[nxt]) continue;
            if (!eval_guard(delayed, edge.guard)) continue;
            Valuation post = delayed;
            for (std::size_t c : edge.resets) post[c] = ClockValue{};
            if (!eval_guard(post, a.location(edge.to).invariant)) continue;
            const std::size_t t = intern({nxt, edge.to, cap(std::move(post), c_max)});
            adj[id].push_back(t);
        }
    }
    const auto comp = tarjan(adj);
    std::vector<std::size_t> comp_size(nodes.size(), 0);
    for (std::size_t c : comp) ++comp_size[c];
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (!a.location(std::get<1>(nodes[v])).accepting) continue;
        if (comp_size[comp[v]] > 1) return true;
        if (std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end()) return true;
    }
    return false;
}

TimedWord restrict_word(const TimedWord& w, const PropSet& ap)
{
    TimedWord out = w;
    for (auto& st : out.steps) {
        PropSet kept;
        for (const auto& p : st.value) {
            if (ap.count(p)) kept.insert(p);
        }
        st.value = std::move(kept);
    }
    return out;
}

namespace {

struct ModeEdge {
    std::size_t to_mode;
    ClockConstraint guard;
    bool reset;
};

/// One-clock automaton whose locations are (mode, letter) pairs over ap.
Tba letter_automaton(const PropSet& ap, const std::vector<std::pair<std::string, bool>>& modes,
                     const std::function<bool(std::size_t, const PropSet&)>& init,
                     const std::function<std::vector<ModeEdge>(std::size_t, const PropSet&)>& trans)
{
    Tba a({"c"}, ap);
    const std::vector<std::string> list(ap.begin(), ap.end());
    const std::size_t letters = std::size_t{1} << list.size();
    std::vector<PropSet> sigma(letters);
    for (std::size_t m = 0; m < letters; ++m) {
        for (std::size_t k = 0; k < list.size(); ++k) {
            if (m >> k & 1) sigma[m].insert(list[k]);
        }
    }
    auto loc = [&](std::size_t mode, std::size_t m) { return mode * letters + m; };
    for (std::size_t mode = 0; mode < modes.size(); ++mode) {
        for (std::size_t m = 0; m < letters; ++m) a.add_location(modes[mode].first + format_props(sigma[m]), sigma[m], modes[mode].second);
    }
    for (std::size_t mode = 0; mode < modes.size(); ++mode) {
        for (std::size_t m = 0; m < letters; ++m) {
            if (init(mode, sigma[m])) a.add_initial(loc(mode, m));
        }
    }
    for (std::size_t mode = 0; mode < modes.size(); ++mode) {
        for (std::size_t m2 = 0; m2 < letters; ++m2) {
            for (const ModeEdge& e : trans(mode, sigma[m2])) {
                for (std::size_t m = 0; m < letters; ++m) {
                    a.add_edge(loc(mode, m), e.guard, e.reset ? std::vector<std::size_t>{0} : std::vector<std::size_t>{}, loc(e.to_mode, m2));
                }
            }
        }
    }
    return a;
}

ClockConstraint window(const Interval& i)
{
    std::vector<ClockConstraint> parts{ClockConstraint::compare(0, CmpOp::Ge, i.lo)};
    if (i.hi) parts.push_back(ClockConstraint::compare(0, CmpOp::Le, *i.hi));
    return ClockConstraint::all(std::move(parts));
}

ClockConstraint outside(const Interval& i)
{
    std::vector<ClockConstraint> parts{ClockConstraint::compare(0, CmpOp::Lt, i.lo)};
    if (i.hi) parts.push_back(ClockConstraint::compare(0, CmpOp::Gt, *i.hi));
    return ClockConstraint::any(std::move(parts));
}

ClockConstraint not_past(const Interval& i)
{
    return i.hi ? ClockConstraint::compare(0, CmpOp::Le, *i.hi) : ClockConstraint::top();
}

Tba compile_letter(const Formula& l, const PropSet& ap)
{
    return letter_automaton(
        ap, {{"D", true}}, [&](std::size_t, const PropSet& s) { return holds(l, s); },
        [](std::size_t, const PropSet&) { return std::vector<ModeEdge>{{0, ClockConstraint::top(), true}}; });
}

Tba compile_eventually(const Interval& i, const Formula& l, const PropSet& ap)
{
    return letter_automaton(
        ap, {{"W", false}, {"D", true}},
        [&](std::size_t mode, const PropSet& s) { return mode == 0 || (holds(l, s) && i.lo == Rational(0)); },
        [&](std::size_t mode, const PropSet& s) {
            if (mode == 1) return std::vector<ModeEdge>{{1, ClockConstraint::top(), true}};
            std::vector<ModeEdge> out{{0, not_past(i), false}};
            if (holds(l, s)) out.push_back({1, window(i), true});
            return out;
        });
}

Tba compile_always(const Interval& i, const Formula& l, const PropSet& ap)
{
    return letter_automaton(
        ap, {{"W", true}}, [&](std::size_t, const PropSet& s) { return i.lo != Rational(0) || holds(l, s); },
        [&](std::size_t, const PropSet& s) {
            return std::vector<ModeEdge>{{0, holds(l, s) ? ClockConstraint::top() : outside(i), false}};
        });
}

Tba compile_until(const Interval& i, const Formula& l1, const Formula& l2, const PropSet& ap)
{
    return letter_automaton(
        ap, {{"W", false}, {"D", true}},
        [&](std::size_t mode, const PropSet& s) {
            if (mode == 1) return holds(l2, s) && i.lo == Rational(0);
            return holds(l1, s);
        },
        [&](std::size_t mode, const PropSet& s) {
            if (mode == 1) return std::vector<ModeEdge>{{1, ClockConstraint::top(), true}};
            std::vector<ModeEdge> out;
            if (holds(l1, s)) out.push_back({0, not_past(i), false});
            if (holds(l2, s)) out.push_back({1, window(i), true});
            return out;
        });
}

Tba compile_next(const Interval& i, const Formula& l, bool negated, const PropSet& ap)
{
    return letter_automaton(
        ap, {{"S", false}, {"D", true}}, [](std::size_t mode, const PropSet&) { return mode == 0; },
        [&](std::size_t mode, const PropSet& s) {
            if (mode == 1) return std::vector<ModeEdge>{{1, ClockConstraint::top(), true}};
            if (!negated) {
                if (holds(l, s)) return std::vector<ModeEdge>{{1, window(i), true}};
                return std::vector<ModeEdge>{};
            }
            return std::vector<ModeEdge>{{1, holds(l, s) ? outside(i) : ClockConstraint::top(), true}};
        });
}

bool unary_temporal(Op op)
{
    return op == Op::Next || op == Op::Eventually || op == Op::Always;
}

}  // namespace

bool in_fragment(const Formula& f)
{
    if (is_boolean(f)) return true;
    switch (f.op) {
    case Op::And: return in_fragment(*f.lhs) && in_fragment(*f.rhs);
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return is_boolean(*f.lhs);
    case Op::Until: return is_boolean(*f.lhs) && is_boolean(*f.rhs);
    case Op::Not: {
        const Formula& g = *f.lhs;
        if (g.op == Op::Not) return in_fragment(*g.lhs);
        return unary_temporal(g.op) && is_boolean(*g.lhs);
    }
    default: return false;
    }
}

Tba mitl_to_tba(const Formula& f)
{
    if (!in_fragment(f)) fail(ErrorCode::UnsupportedFragment, "formula " + to_string(f) + " is outside the compiled fragment");
    const PropSet ap = atoms(f);
    if (is_boolean(f)) return compile_letter(f, ap);
    switch (f.op) {
    case Op::And: return intersect(mitl_to_tba(*f.lhs), mitl_to_tba(*f.rhs));
    case Op::Next: return compile_next(f.interval, *f.lhs, false, ap);
    case Op::Eventually: return compile_eventually(f.interval, *f.lhs, ap);
    case Op::Always: return compile_always(f.interval, *f.lhs, ap);
    case Op::Until: return compile_until(f.interval, *f.lhs, *f.rhs, ap);
    case Op::Not: {
        const Formula& g = *f.lhs;
        if (g.op == Op::Not) return mitl_to_tba(*g.lhs);
        FormulaPtr neg = negation(g.lhs);
        if (g.op == Op::Eventually) return compile_always(g.interval, *neg, ap);
        if (g.op == Op::Always) return compile_eventually(g.interval, *neg, ap);
        return compile_next(g.interval, *g.lhs, true, ap);
    }
    default: break;
    }
    fail(ErrorCode::UnsupportedFragment, "formula " + to_string(f) + " is outside the compiled fragment");
}

Tba intersect(const Tba& a, const Tba& b)
{
    std::vector<std::string> clocks = a.clocks();
    for (std::string name : b.clocks()) {
        while (std::find(clocks.begin(), clocks.end(), name) != clocks.end()) name += "'";
        clocks.push_back(name);
    }
    PropSet ap = a.ap();
    ap.insert(b.ap().begin(), b.ap().end());
    PropSet shared;
    std::set_intersection(a.ap().begin(), a.ap().end(), b.ap().begin(), b.ap().end(), std::inserter(shared, shared.end()));
    Tba out(clocks, ap);
    const std::size_t off = a.clocks().size();

    auto compatible = [&](std::size_t q1, std::size_t q2) {
        PropSet l1 = a.label_set(q1), l2 = b.label_set(q2);
        for (const auto& p : shared) {
            if (l1.count(p) != l2.count(p)) return false;
        }
        return true;
    };
    using Key = std::tuple<std::size_t, std::size_t, int>;
    std::map<Key, std::size_t> ids;
    std::deque<Key> work;
    auto intern = [&](const Key& k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        const auto [q1, q2, ph] = k;
        PropSet label = a.label_set(q1);
        PropSet l2 = b.label_set(q2);
        label.insert(l2.begin(), l2.end());
        const bool acc = ph == 0 && a.location(q1).accepting;
        ClockConstraint inv = ClockConstraint::all({a.location(q1).invariant, map_constraint(b.location(q2).invariant, off, 1)});
        const std::size_t id = out.add_location("(" + a.location(q1).name + "," + b.location(q2).name + "," + std::to_string(ph) + ")",
                                                label, acc, inv);
        ids.emplace(k, id);
        work.push_back(k);
        return id;
    };
    for (std::size_t q1 : a.initial()) {
        for (std::size_t q2 : b.initial()) {
            if (compatible(q1, q2)) out.add_initial(intern({q1, q2, 0}));
        }
    }
    while (!work.empty()) {
        const Key k = work.front();
        work.pop_front();
        const auto [q1, q2, ph] = k;
        const std::size_t src = ids.at(k);
        int nph = ph;
        if (ph == 0 && a.location(q1).accepting) nph = 1;
        else if (ph == 1 && b.location(q2).accepting) nph = 0;
        for (std::size_t e1 : a.out_edges(q1)) {
            for (std::size_t e2 : b.out_edges(q2)) {
                const TbaEdge& x = a.edges()[e1];
                const TbaEdge& y = b.edges()[e2];
                if (!compatible(x.to, y.to)) continue;
                const std::size_t dst = intern({x.to, y.to, nph});
                std::vector<std::size_t> resets = x.resets;
                for (std::size_t c : y.resets) resets.push_back(c + off);
                out.add_edge(src, ClockConstraint::all({x.guard, map_constraint(y.guard, off, 1)}), resets, dst);
            }
        }
    }
    return out;
}

ScaledTba scale_to_integers(const Tba& a)
{
    std::int64_t l = 1;
    auto upd = [&](const Rational& c) { l = std::lcm(l, c.denominator()); };
    for (const auto& q : a.locations()) visit_constants(q.invariant, upd);
    for (const auto& e : a.edges()) visit_constants(e.guard, upd);
    Tba out(a.clocks(), a.ap());
    for (std::size_t q = 0; q < a.size(); ++q) {
        const TbaLocation& loc = a.location(q);
        out.add_location(loc.name, a.label_set(q), loc.accepting, map_constraint(loc.invariant, 0, l));
    }
    for (std::size_t q : a.initial()) out.add_initial(q);
    for (const auto& e : a.edges()) out.add_edge(e.from, map_constraint(e.guard, 0, l), e.resets, e.to);
    return {out, l};
}

TimedWord scale_word(const TimedWord& w, std::int64_t scale)
{
    if (scale <= 0) fail(ErrorCode::InvalidArgument, "scale must be positive");
    TimedWord out = w;
    for (auto& st : out.steps) st.time *= Rational(scale);
    out.period *= Rational(scale);
    return out;
}

Tba fig2_tba(const Rational& c1, const Rational& c2)
{
    Tba a({"c"}, {"green"});
    const std::size_t q0 = a.add_location("q0", {}, false);
    const std::size_t q1 = a.add_location("q1", {"green"}, true);
    const std::size_t q2 = a.add_location("q2", {}, false);
    a.add_initial(q0);
    using CC = ClockConstraint;
    a.add_edge(q0, CC::compare(0, CmpOp::Le, c2), {}, q0);
    a.add_edge(q0, CC::any({CC::compare(0, CmpOp::Lt, c1), CC::compare(0, CmpOp::Gt, c2)}), {0}, q2);
    a.add_edge(q0, CC::all({CC::compare(0, CmpOp::Ge, c1), CC::compare(0, CmpOp::Le, c2)}), {0}, q1);
    a.add_edge(q1, CC::top(), {0}, q1);
    a.add_edge(q2, CC::top(), {0}, q2);
    return a;
}

namespace {

Tba complete_automaton(const PropSet& ap, bool accepting)
{
    return letter_automaton(
        ap, {{accepting ? "U" : "E", accepting}}, [](std::size_t, const PropSet&) { return true; },
        [](std::size_t, const PropSet&) { return std::vector<ModeEdge>{{0, ClockConstraint::top(), false}}; });
}

}  // namespace

Tba universal_tba(const PropSet& ap)
{
    return complete_automaton(ap, true);
}

Tba empty_tba(const PropSet& ap)
{
    return complete_automaton(ap, false);
}

std::string to_string(const ClockConstraint& g, const std::vector<std::string>& clocks)
{
    switch (g.kind) {
    case ClockConstraint::Kind::True: return "true";
    case ClockConstraint::Kind::Cmp: {
        static const char* ops[] = {"<", "<=", "==", ">=", ">"};
        const std::string name = g.clock < clocks.size() ? clocks[g.clock] : "?" + std::to_string(g.clock);
        return name + ops[static_cast<int>(g.cmp)] + to_decimal_string(g.constant);
    }
    case ClockConstraint::Kind::Not: return "!(" + to_string(g.children.front(), clocks) + ")";
    case ClockConstraint::Kind::And:
    case ClockConstraint::Kind::Or: {
        std::string out = "(";
        for (std::size_t k = 0; k < g.children.size(); ++k) {
            if (k) out += g.kind == ClockConstraint::Kind::And ? " & " : " | ";
            out += to_string(g.children[k], clocks);
        }
        return out + ")";
    }
    }
    return {};
}

std::string dump(const Tba& a)
{
    std::ostringstream os;
    os << "clocks:";
    for (const auto& c : a.clocks()) os << ' ' << c;
    os << "\nap: " << format_props(a.ap()) << "\nlocations:\n";
    for (std::size_t q = 0; q < a.size(); ++q) {
        const TbaLocation& l = a.location(q);
        const bool init = std::find(a.initial().begin(), a.initial().end(), q) != a.initial().end();
        os << (l.accepting ? "*" : " ") << (init ? ">" : " ") << ' ' << l.name << ' ' << format_props(a.label_set(q));
        if (!l.invariant.is_true()) os << " inv " << to_string(l.invariant, a.clocks());
        os << '\n';
    }
    os << "edges:\n";
    for (const auto& e : a.edges()) {
        os << a.location(e.from).name << " --" << to_string(e.guard, a.clocks()) << "/{";
        for (std::size_t k = 0; k < e.resets.size(); ++k) os << (k ? "," : "") << a.clocks()[e.resets[k]];
        os << "}--> " << a.location(e.to).name << '\n';
    }
    return os.str();
}

}  // namespace tmas
