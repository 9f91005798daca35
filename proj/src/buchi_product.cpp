#include "tmas/buchi_product.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <sstream>

namespace tmas {

BuchiWTS::BuchiWTS(DiscreteSystem& sys, Tba automaton, std::size_t max_states)
    : sys_(sys), a_(std::move(automaton)), c_max_(a_.c_max()), max_states_(max_states)
{
    const PropSet alpha = sys_.alphabet();
    for (const auto& p : a_.ap()) {
        if (!alpha.count(p)) fail(ErrorCode::AlphabetMismatch, "proposition '" + p + "' is not in the system alphabet");
    }
}

std::size_t BuchiWTS::KeyHash::operator()(const std::vector<std::int64_t>& k) const noexcept
{
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : k) {
        h ^= static_cast<std::size_t>(v);
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<std::int64_t> BuchiWTS::key(const BuchiState& s) const
{
    std::vector<std::int64_t> k{static_cast<std::int64_t>(s.sys), static_cast<std::int64_t>(s.loc)};
    for (const ClockValue& v : s.nu) {
        if (v.inf) {
            k.push_back(-1);
            k.push_back(0);
        } else {
            k.push_back(v.value.numerator());
            k.push_back(v.value.denominator());
        }
    }
    return k;
}

std::size_t BuchiWTS::intern(BuchiState s)
{
    auto k = key(s);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    if (states_.size() >= max_states_) {
        fail(ErrorCode::ResourceBudgetExceeded, "Buchi product exceeds the cap of " + std::to_string(max_states_) + " states");
    }
    states_.push_back(std::move(s));
    index_.emplace(std::move(k), states_.size() - 1);
    return states_.size() - 1;
}

std::uint64_t BuchiWTS::sys_mask(StateId s)
{
    auto it = masks_.find(s);
    if (it != masks_.end()) return it->second;
    const std::uint64_t m = a_.mask(sys_.label(s));
    masks_.emplace(s, m);
    return m;
}

const std::vector<std::size_t>& BuchiWTS::initial_states()
{
    if (initial_) return *initial_;
    std::vector<std::size_t> out;
    const Valuation zero(a_.clocks().size());
    for (StateId s : sys_.initial_states()) {
        for (std::size_t q : a_.initial()) {
            if (a_.location(q).label != sys_mask(s) || !eval_guard(zero, a_.location(q).invariant)) continue;
            const std::size_t id = intern({s, q, zero});
            if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        }
    }
    initial_ = std::move(out);
    return *initial_;
}

const std::vector<std::size_t>& BuchiWTS::successors(std::size_t id)
{
    auto it = succ_.find(id);
    if (it != succ_.end()) return it->second;
    const BuchiState src = states_.at(id);
    std::vector<std::size_t> out;
    for (StateId t : sys_.successors(src.sys)) {
        const Rational d = sys_.weight(src.sys, t);
        Valuation delayed;
        for (const ClockValue& v : src.nu) delayed.push_back(v.plus(d).capped(c_max_));
        if (!eval_guard(delayed, a_.location(src.loc).invariant)) continue;
        const std::uint64_t m = sys_mask(t);
        for (std::size_t e : a_.out_edges(src.loc)) {
            const TbaEdge& edge = a_.edges()[e];
            if (a_.location(edge.to).label != m || !eval_guard(delayed, edge.guard)) continue;
            Valuation post = delayed;
            for (std::size_t c : edge.resets) post[c] = ClockValue{};
            if (!eval_guard(post, a_.location(edge.to).invariant)) continue;
            const std::size_t nid = intern({t, edge.to, std::move(post)});
            if (std::find(out.begin(), out.end(), nid) == out.end()) out.push_back(nid);
        }
    }
    return succ_.emplace(id, std::move(out)).first->second;
}

Rational BuchiWTS::weight(std::size_t from, std::size_t to)
{
    return sys_.weight(states_.at(from).sys, states_.at(to).sys);
}

std::string BuchiWTS::state_name(std::size_t id)
{
    const BuchiState& s = states_.at(id);
    std::string out = "(" + sys_.state_name(s.sys) + ", " + a_.location(s.loc).name;
    for (const ClockValue& v : s.nu) out += ", " + to_string(v);
    return out + ")";
}

LassoEnumerator::LassoEnumerator(BuchiWTS& b) : b_(b) {}

void LassoEnumerator::mark(std::vector<char>& v, std::size_t id)
{
    if (id >= v.size()) v.resize(id + 1, 0);
    v[id] = 1;
}

namespace {

bool is_set(const std::vector<char>& v, std::size_t id)
{
    return id < v.size() && v[id];
}

}  // namespace

std::optional<std::vector<std::size_t>> LassoEnumerator::inner_search(std::size_t seed)
{
    std::vector<Frame> stack{{seed, 0}};
    std::vector<std::size_t> touched;
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& succ = b_.successors(f.state);
        if (f.child >= succ.size()) {
            stack.pop_back();
            continue;
        }
        const std::size_t t = succ[f.child++];
        if (t == seed) {
            std::vector<std::size_t> path;
            for (std::size_t k = 1; k < stack.size(); ++k) path.push_back(stack[k].state);
            // Flags of a successful search are dropped so later seeds can reuse its states.
            for (std::size_t s : touched) flagged_[s] = 0;
            return path;
        }
        if (is_set(flagged_, t)) continue;
        mark(flagged_, t);
        touched.push_back(t);
        stack.push_back({t, 0});
    }
    return std::nullopt;
}

std::vector<std::size_t> LassoEnumerator::shortest_path(const std::vector<std::size_t>& sources, std::size_t target)
{
    std::unordered_map<std::size_t, std::size_t> parent;
    std::deque<std::size_t> queue;
    for (std::size_t s : sources) {
        if (parent.emplace(s, s).second) queue.push_back(s);
    }
    while (!queue.empty()) {
        const std::size_t s = queue.front();
        queue.pop_front();
        if (s == target) {
            std::vector<std::size_t> path{s};
            for (std::size_t c = s; parent.at(c) != c;) {
                c = parent.at(c);
                path.push_back(c);
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        for (std::size_t t : b_.successors(s)) {
            if (parent.emplace(t, s).second) queue.push_back(t);
        }
    }
    fail(ErrorCode::UnknownState, "lasso seed is not reachable");
}

BuchiLasso LassoEnumerator::make_lasso(std::size_t seed)
{
    // The nested search only certifies that the seed lies on a cycle; the
    // emitted lasso uses a fewest-step stem and cycle through it.
    std::vector<std::size_t> seq = shortest_path(roots_, seed);
    BuchiLasso run;
    run.loop_start = seq.size() - 1;
    const auto& succ = b_.successors(seed);
    if (std::find(succ.begin(), succ.end(), seed) == succ.end()) {
        std::vector<std::size_t> back = shortest_path(std::vector<std::size_t>(succ.begin(), succ.end()), seed);
        seq.insert(seq.end(), back.begin(), back.end() - 1);
    }
    Rational t(0);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k > 0) t += b_.weight(seq[k - 1], seq[k]);
        run.steps.push_back({seq[k], t});
    }
    const Rational closing = b_.weight(seq.back(), seq[run.loop_start]);
    run.period = t + closing - run.steps[run.loop_start].time;
    return run;
}

std::optional<BuchiLasso> LassoEnumerator::next()
{
    if (!started_) {
        roots_ = b_.initial_states();
        started_ = true;
    }
    while (true) {
        if (outer_.empty()) {
            while (next_root_ < roots_.size() && is_set(visited_, roots_[next_root_])) ++next_root_;
            if (next_root_ >= roots_.size()) return std::nullopt;
            mark(visited_, roots_[next_root_]);
            outer_.push_back({roots_[next_root_], 0});
        }
        Frame& f = outer_.back();
        const auto& succ = b_.successors(f.state);
        if (f.child < succ.size()) {
            const std::size_t t = succ[f.child++];
            if (!is_set(visited_, t)) {
                mark(visited_, t);
                outer_.push_back({t, 0});
            }
            continue;
        }
        std::optional<BuchiLasso> found;
        if (b_.accepting(f.state)) {
            if (inner_search(f.state)) found = make_lasso(f.state);
        }
        outer_.pop_back();
        if (found) return found;
    }
}

std::optional<BuchiLasso> find_accepting(BuchiWTS& b)
{
    return LassoEnumerator(b).next();
}

Projection project_run(const BuchiWTS& b, const BuchiLasso& run)
{
    Projection p;
    p.system_run.loop_start = p.tba_run.loop_start = run.loop_start;
    p.system_run.period = p.tba_run.period = run.period;
    for (const auto& st : run.steps) {
        p.system_run.steps.push_back({b.state(st.value).sys, st.time});
        p.tba_run.steps.push_back({b.state(st.value).loc, st.time});
    }
    return p;
}

TimedWord projected_word(BuchiWTS& b, const BuchiLasso& run)
{
    TimedWord w;
    w.loop_start = run.loop_start;
    w.period = run.period;
    for (const auto& st : run.steps) w.steps.push_back({b.system().label(b.state(st.value).sys), st.time});
    return w;
}

std::string dump_lasso(BuchiWTS& b, const BuchiLasso& run)
{
    std::ostringstream os;
    os << "stem:\n";
    for (std::size_t k = 0; k < run.size(); ++k) {
        if (k == run.loop_start) os << "cycle:\n";
        os << b.state_name(run.steps[k].value) << " @ " << to_decimal_string(run.steps[k].time) << '\n';
    }
    os << "period: " << to_decimal_string(run.period) << '\n';
    return os.str();
}

}  // namespace tmas
