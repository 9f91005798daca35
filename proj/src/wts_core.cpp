#include "tmas/wts_core.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace tmas {

ExplicitSystem::ExplicitSystem(std::vector<std::string> names, std::vector<PropSet> labels, std::vector<StateId> initial)
    : names_(std::move(names)), labels_(std::move(labels)), initial_(std::move(initial)), edges_(names_.size())
{
    if (labels_.size() != names_.size()) fail(ErrorCode::DimensionMismatch, "label table does not match the state count");
    for (StateId s : initial_) {
        if (s >= names_.size()) fail(ErrorCode::UnknownState, "initial state out of range");
    }
}

void ExplicitSystem::add_edge(StateId from, StateId to, const Rational& weight)
{
    if (from >= names_.size() || to >= names_.size()) fail(ErrorCode::UnknownState, "edge endpoint out of range");
    if (weight <= Rational(0)) fail(ErrorCode::InvalidArgument, "edge weight must be positive");
    auto& out = edges_[from];
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == to; });
    if (it != out.end()) fail(ErrorCode::InvalidArgument, "duplicate edge");
    out.emplace_back(to, weight);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
}

std::vector<StateId> ExplicitSystem::successors(StateId s)
{
    if (s >= names_.size()) fail(ErrorCode::UnknownState, "state out of range");
    std::vector<StateId> out;
    for (const auto& e : edges_[s]) out.push_back(e.first);
    return out;
}

PropSet ExplicitSystem::label(StateId s)
{
    if (s >= names_.size()) fail(ErrorCode::UnknownState, "state out of range");
    return labels_[s];
}

PropSet ExplicitSystem::alphabet()
{
    PropSet out;
    for (const PropSet& l : labels_) out.insert(l.begin(), l.end());
    return out;
}

Rational ExplicitSystem::weight(StateId from, StateId to)
{
    for (const auto& e : edges_.at(from)) {
        if (e.first == to) return e.second;
    }
    fail(ErrorCode::UnknownState, "no edge " + names_.at(from) + " -> " + names_.at(to));
}

std::string ExplicitSystem::state_name(StateId s)
{
    return names_.at(s);
}

AgentSystem::AgentSystem(const AgentWTS& wts, const std::vector<std::vector<CellId>>& frontier)
    : wts_(wts), frontier_(frontier)
{
}

std::vector<StateId> AgentSystem::initial_states()
{
    return {wts_.initial().begin(), wts_.initial().end()};
}

std::vector<StateId> AgentSystem::successors(StateId s)
{
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    const auto& nb = wts_.neighbors();
    std::vector<char> hit(wts_.n_states(), 0);
    std::vector<std::size_t> radix(nb.size(), 0);
    bool empty_neighbor = false;
    for (std::size_t k = 0; k < nb.size(); ++k) empty_neighbor |= frontier_[nb[k]].empty();
    if (!empty_neighbor) {
        while (true) {
            Action a{s};
            for (std::size_t k = 0; k < nb.size(); ++k) a.push_back(frontier_[nb[k]][radix[k]]);
            for (CellId t : wts_.post(a)) hit[t] = 1;
            std::size_t k = nb.size();
            bool done = true;
            while (k > 0) {
                --k;
                if (++radix[k] < frontier_[nb[k]].size()) {
                    done = false;
                    break;
                }
                radix[k] = 0;
            }
            if (done) break;
        }
    }
    std::vector<StateId> out;
    for (std::size_t t = 0; t < hit.size(); ++t) {
        if (hit[t]) out.push_back(static_cast<StateId>(t));
    }
    memo_.emplace(s, out);
    return out;
}

PropSet AgentSystem::label(StateId s)
{
    return wts_.label(s);
}

std::size_t JointStateHash::operator()(const JointState& s) const noexcept
{
    std::size_t h = 1469598103934665603ull;
    for (CellId c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

ProductWTS::ProductWTS(std::vector<AgentWTS> wts, std::size_t max_states) : wts_(std::move(wts)), max_states_(max_states)
{
    if (wts_.empty()) fail(ErrorCode::InvalidArgument, "product needs at least one WTS");
    for (std::size_t i = 0; i < wts_.size(); ++i) {
        if (wts_[i].weight() != wts_.front().weight()) fail(ErrorCode::MismatchedTimeStep, "agent WTSs use different time steps");
        if (wts_[i].n_states() != wts_.front().n_states()) fail(ErrorCode::InvalidArgument, "agent WTSs use different cell sets");
        if (wts_[i].agent() != i) fail(ErrorCode::InvalidArgument, "agent WTSs must be listed in agent order");
        for (std::size_t j : wts_[i].neighbors()) {
            if (j >= wts_.size()) fail(ErrorCode::IndexOutOfRange, "neighbor outside the product");
        }
    }
}

StateId ProductWTS::intern(const JointState& s)
{
    auto it = index_.find(s);
    if (it != index_.end()) return it->second;
    if (states_.size() >= max_states_) {
        fail(ErrorCode::ResourceBudgetExceeded, "product state count exceeds the cap of " + std::to_string(max_states_));
    }
    const auto id = static_cast<StateId>(states_.size());
    states_.push_back(s);
    index_.emplace(s, id);
    return id;
}

std::optional<StateId> ProductWTS::find(const JointState& s) const
{
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Action ProductWTS::action_of(const JointState& l, std::size_t i) const
{
    Action a{l.at(i)};
    for (std::size_t j : wts_.at(i).neighbors()) a.push_back(l.at(j));
    return a;
}

bool ProductWTS::is_transition(const JointState& from, const JointState& to) const
{
    for (std::size_t i = 0; i < wts_.size(); ++i) {
        if (!wts_[i].enabled(action_of(from, i), to.at(i))) return false;
    }
    return true;
}

namespace {

/// Cartesian product of sorted choice lists in lexicographic order.
template <class F>
void for_each_tuple(const std::vector<std::vector<CellId>>& choices, F&& f)
{
    for (const auto& c : choices) {
        if (c.empty()) return;
    }
    std::vector<std::size_t> radix(choices.size(), 0);
    JointState cur(choices.size());
    while (true) {
        for (std::size_t k = 0; k < choices.size(); ++k) cur[k] = choices[k][radix[k]];
        f(cur);
        std::size_t k = choices.size();
        bool done = true;
        while (k > 0) {
            --k;
            if (++radix[k] < choices[k].size()) {
                done = false;
                break;
            }
            radix[k] = 0;
        }
        if (done) return;
    }
}

}  // namespace

std::vector<StateId> ProductWTS::initial_states()
{
    std::vector<std::vector<CellId>> choices;
    for (const AgentWTS& w : wts_) choices.push_back(w.initial());
    std::vector<StateId> out;
    for_each_tuple(choices, [&](const JointState& s) { out.push_back(intern(s)); });
    return out;
}

std::vector<StateId> ProductWTS::successors(StateId s)
{
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    const JointState l = states_.at(s);
    std::vector<std::vector<CellId>> choices;
    for (std::size_t i = 0; i < wts_.size(); ++i) choices.push_back(wts_[i].post(action_of(l, i)));
    std::vector<StateId> out;
    for_each_tuple(choices, [&](const JointState& t) { out.push_back(intern(t)); });
    memo_.emplace(s, out);
    return out;
}

PropSet ProductWTS::label(StateId s)
{
    PropSet out;
    const JointState& l = states_.at(s);
    for (std::size_t i = 0; i < wts_.size(); ++i) {
        const PropSet& li = wts_[i].label(l[i]);
        out.insert(li.begin(), li.end());
    }
    return out;
}

PropSet ProductWTS::alphabet()
{
    PropSet out;
    for (const AgentWTS& w : wts_) out.insert(w.alphabet().begin(), w.alphabet().end());
    return out;
}

std::string ProductWTS::state_name(StateId s)
{
    std::string out = "(";
    const JointState& l = states_.at(s);
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(l[k]);
    }
    return out + ")";
}

ProductWTS::Counts ProductWTS::reachable_counts(std::size_t steps)
{
    Counts c;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    std::vector<char> seen;
    auto mark = [&](StateId id) {
        if (id >= seen.size()) seen.resize(static_cast<std::size_t>(id) + 1, 0);
        if (seen[id]) return false;
        seen[id] = 1;
        return true;
    };
    std::vector<StateId> layer = initial_states();
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    std::size_t total = 0;
    for (StateId s : layer) total += mark(s) ? 1 : 0;
    c.exact.push_back(layer.size());
    c.within.push_back(total);
    c.seconds.push_back(elapsed());
    for (std::size_t k = 1; k <= steps; ++k) {
        std::vector<char> in_next;
        std::vector<StateId> next;
        for (StateId s : layer) {
            for (StateId t : successors(s)) {
                if (t >= in_next.size()) in_next.resize(static_cast<std::size_t>(t) + 1, 0);
                if (!in_next[t]) {
                    in_next[t] = 1;
                    next.push_back(t);
                }
                if (mark(t)) ++total;
            }
        }
        std::sort(next.begin(), next.end());
        layer = std::move(next);
        c.exact.push_back(layer.size());
        c.within.push_back(total);
        c.seconds.push_back(elapsed());
    }
    return c;
}

ProductWTS product(std::vector<AgentWTS> wts, std::size_t max_states)
{
    return ProductWTS(std::move(wts), max_states);
}

std::vector<CellRun> align_runs(const std::vector<CellRun>& runs, std::size_t max_length)
{
    std::size_t stem = 0;
    std::size_t cycle = 1;
    for (const CellRun& r : runs) {
        r.validate();
        stem = std::max(stem, r.loop_start);
        cycle = std::lcm(cycle, r.cycle_length());
        if (stem + cycle > max_length) fail(ErrorCode::ResourceBudgetExceeded, "aligned lasso length exceeds the budget");
    }
    std::vector<CellRun> out;
    for (const CellRun& r : runs) {
        CellRun a;
        for (std::size_t k = 0; k < stem + cycle; ++k) a.steps.push_back({r.value(k), r.time(k)});
        a.loop_start = stem;
        a.period = r.period * Rational(static_cast<std::int64_t>(cycle / r.cycle_length()));
        a.validate();
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

void check_aligned(const std::vector<CellRun>& runs)
{
    if (runs.empty()) fail(ErrorCode::LengthMismatch, "no runs given");
    const CellRun& ref = runs.front();
    for (const CellRun& r : runs) {
        r.validate();
        if (r.size() != ref.size() || r.loop_start != ref.loop_start || r.period != ref.period) {
            fail(ErrorCode::LengthMismatch, "runs have different stem or cycle lengths");
        }
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (r.steps[k].time != ref.steps[k].time) fail(ErrorCode::LengthMismatch, "runs have different time stamps");
        }
    }
}

}  // namespace

bool check_consistent(const std::vector<CellRun>& runs, const std::vector<AgentWTS>& wts)
{
    check_aligned(runs);
    if (runs.size() != wts.size()) fail(ErrorCode::LengthMismatch, "one run per agent is required");
    const Rational dt = wts.front().weight();
    const CellRun& ref = runs.front();
    for (std::size_t k = 0; k < ref.size(); ++k) {
        if (ref.steps[k].time != dt * Rational(static_cast<std::int64_t>(k))) fail(ErrorCode::LengthMismatch, "time stamps are not multiples of the time step");
    }
    if (ref.period != dt * Rational(static_cast<std::int64_t>(ref.cycle_length()))) fail(ErrorCode::LengthMismatch, "period does not match the cycle");
    for (std::size_t k = 0; k < ref.size(); ++k) {
        const std::size_t next = k + 1 < ref.size() ? k + 1 : ref.loop_start;
        for (std::size_t i = 0; i < wts.size(); ++i) {
            Action a{runs[i].steps[k].value};
            for (std::size_t j : wts[i].neighbors()) a.push_back(runs.at(j).steps[k].value);
            if (!wts[i].enabled(a, runs[i].steps[next].value)) return false;
        }
    }
    return true;
}

JointRun zip_runs(const std::vector<CellRun>& runs)
{
    check_aligned(runs);
    JointRun out;
    out.loop_start = runs.front().loop_start;
    out.period = runs.front().period;
    for (std::size_t k = 0; k < runs.front().size(); ++k) {
        JointState s;
        for (const CellRun& r : runs) s.push_back(r.steps[k].value);
        out.steps.push_back({s, runs.front().steps[k].time});
    }
    return out;
}

CellRun project(const JointRun& run, std::size_t agent)
{
    CellRun out;
    out.loop_start = run.loop_start;
    out.period = run.period;
    for (const auto& st : run.steps) {
        if (agent >= st.value.size()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent) + " out of range");
        out.steps.push_back({st.value[agent], st.time});
    }
    return out;
}

TimedWord timed_word(const CellRun& run, const AgentWTS& wts)
{
    TimedWord w;
    w.loop_start = run.loop_start;
    w.period = run.period;
    for (const auto& st : run.steps) w.steps.push_back({wts.label(st.value), st.time});
    return w;
}

TimedWord timed_word(const JointRun& run, const ProductWTS& p)
{
    TimedWord w;
    w.loop_start = run.loop_start;
    w.period = run.period;
    for (const auto& st : run.steps) {
        PropSet l;
        if (st.value.size() != p.n_agents()) fail(ErrorCode::UnknownState, "joint state has the wrong arity");
        for (std::size_t i = 0; i < p.n_agents(); ++i) {
            const PropSet& li = p.agent(i).label(st.value[i]);
            l.insert(li.begin(), li.end());
        }
        w.steps.push_back({l, st.time});
    }
    return w;
}

namespace {

std::string joint_text(const JointState& s)
{
    std::string out = "(";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(s[k]);
    }
    return out + ")";
}

JointState parse_joint(const std::string& text)
{
    std::size_t b = text.find('(');
    std::size_t e = text.rfind(')');
    if (b == std::string::npos || e == std::string::npos || e < b) fail(ErrorCode::SyntaxError, "bad joint state '" + text + "'");
    JointState out;
    std::stringstream ss(text.substr(b + 1, e - b - 1));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<CellId>(std::stoul(item)));
    return out;
}

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

template <class T, class Fmt>
void write_lasso(std::ostream& out, const Lasso<T>& l, Fmt fmt)
{
    out << "lasso " << l.loop_start << ' ' << to_fraction_string(l.period) << '\n';
    for (std::size_t k = 0; k < l.size(); ++k) out << k << "; " << to_fraction_string(l.steps[k].time) << "; " << fmt(l.steps[k].value) << '\n';
}

template <class T, class Parse>
Lasso<T> read_lasso(std::istream& in, Parse parse)
{
    Lasso<T> l;
    std::string line;
    while (std::getline(in, line) && trim(line).empty()) {
    }
    std::istringstream header(line);
    std::string tag, period;
    if (!(header >> tag >> l.loop_start >> period) || tag != "lasso") fail(ErrorCode::SyntaxError, "missing lasso header");
    l.period = parse_rational(period);
    std::streampos pos = in.tellg();
    while (std::getline(in, line)) {
        if (trim(line).empty() || trim(line).rfind("lasso", 0) == 0) {
            in.seekg(pos);
            break;
        }
        std::size_t a = line.find(';');
        std::size_t b = line.find(';', a + 1);
        if (a == std::string::npos || b == std::string::npos) fail(ErrorCode::SyntaxError, "bad step line '" + line + "'");
        const std::size_t j = std::stoul(trim(line.substr(0, a)));
        if (j != l.steps.size()) fail(ErrorCode::SyntaxError, "step index out of order");
        l.steps.push_back({parse(trim(line.substr(b + 1))), parse_rational(trim(line.substr(a + 1, b - a - 1)))});
        pos = in.tellg();
    }
    l.validate();
    return l;
}

}  // namespace

void write_word(std::ostream& out, const TimedWord& w)
{
    write_lasso(out, w, [](const PropSet& p) { return format_props(p); });
}

TimedWord read_word(std::istream& in)
{
    return read_lasso<PropSet>(in, [](const std::string& s) { return parse_props(s); });
}

void write_run(std::ostream& out, const CellRun& r)
{
    write_lasso(out, r, [](CellId c) { return std::to_string(c); });
}

CellRun read_cell_run(std::istream& in)
{
    return read_lasso<CellId>(in, [](const std::string& s) { return static_cast<CellId>(std::stoul(s)); });
}

void write_run(std::ostream& out, const JointRun& r)
{
    write_lasso(out, r, [](const JointState& s) { return joint_text(s); });
}

JointRun read_joint_run(std::istream& in)
{
    return read_lasso<JointState>(in, [](const std::string& s) { return parse_joint(s); });
}

SimulationReport simulation_check(const Discretization& disc, const CommGraph& g,
                                  const std::vector<std::pair<JointState, JointState>>& transitions,
                                  const TransitionLaw& law, std::size_t samples, std::uint64_t seed,
                                  const Rational& dt_sim)
{
    SimulationReport report;
    report.samples_per_transition = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = g.n_agents();
    for (std::size_t step = 0; step < transitions.size(); ++step) {
        const auto& [from, to] = transitions[step];
        if (from.size() != n || to.size() != n) fail(ErrorCode::DimensionMismatch, "transition arity does not match the agent count");
        InputLaw inner = law(from, to);
        InputLaw monitored = [&](std::size_t i, const Rational& t, const Positions& x) {
            Point u = inner(i, t, x);
            report.max_input_norm = std::max(report.max_input_norm, u.norm());
            return u;
        };
        for (std::size_t s = 0; s < samples; ++s) {
            AgentState x0;
            for (std::size_t i = 0; i < n; ++i) {
                const Box& b = disc.dec.cell(from[i]);
                Point p(b.lo.size());
                for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = b.lo(k) + unit(rng) * (b.hi(k) - b.lo(k));
                x0.positions.push_back(p);
            }
            Trajectory traj = integrate(g, x0, monitored, dt_sim, disc.dt, disc.v_max);
            const Positions& end = traj.samples.back().positions;
            for (std::size_t i = 0; i < n; ++i) {
                if (!disc.dec.cell(to[i]).contains(end[i], kGeoEps)) {
                    ++report.misses;
                    if (report.details.size() < 16) report.details.push_back({step, s, i, to[i], end[i]});
                }
            }
        }
        ++report.transitions_checked;
    }
    return report;
}

}  // namespace tmas
