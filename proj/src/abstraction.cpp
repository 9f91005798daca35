#include "tmas/abstraction.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tmas {

namespace {

void check_lambda(double lambda)
{
    if (!(lambda > 0.0 && lambda < 1.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must lie in the open interval (0,1)");
}

std::string num(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

RealInterval dmax_range(const ConditionConstants& c, double lambda, double v_max)
{
    check_lambda(lambda);
    if (!(v_max > 0.0)) fail(ErrorCode::InvalidArgument, "v_max must be positive");
    const double ml = c.m_bound * c.l_combined;
    const double a = (1.0 - lambda) * v_max;
    RealInterval out;
    out.lo = 0.0;
    out.hi = ml > 0.0 ? a * a / (4.0 * ml) : std::numeric_limits<double>::infinity();
    return out;
}

RealInterval dt_range(double d_max, const ConditionConstants& c, double lambda, double v_max)
{
    RealInterval dr = dmax_range(c, lambda, v_max);
    if (!(d_max > 0.0)) fail(ErrorCode::InvalidArgument, "diameter must be positive");
    if (d_max > dr.hi * (1.0 + 1e-12)) {
        fail(ErrorCode::InfeasibleDiameter, "diameter " + num(d_max) + " exceeds the feasible bound " + num(dr.hi));
    }
    const double ml = c.m_bound * c.l_combined;
    const double b = (1.0 - lambda) * v_max;
    RealInterval out;
    if (ml == 0.0) {
        out.lo = d_max / b;
        out.hi = std::numeric_limits<double>::infinity();
        return out;
    }
    const double disc = std::max(0.0, b * b - 4.0 * ml * d_max);
    const double root = std::sqrt(disc);
    out.hi = (b + root) / (2.0 * ml);
    out.lo = 2.0 * d_max / (b + root);
    if (out.lo > out.hi) out.lo = out.hi;
    return out;
}

double Discretization::ball_radius() const
{
    const double r = lambda * v_max * to_double(dt);
    return conservative ? std::max(0.0, r - dec.diameter()) : r;
}

Discretization make_discretization(CellDecomposition dec, const Rational& dt, double lambda,
                                   const ConditionConstants& c, double v_max, bool conservative)
{
    if (dt <= Rational(0)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    RealInterval range = dt_range(dec.diameter(), c, lambda, v_max);
    const double step = to_double(dt);
    if (step < range.lo * (1.0 - 1e-12) || step > range.hi * (1.0 + 1e-12)) {
        fail(ErrorCode::InfeasibleTimeStep, "time step " + to_decimal_string(dt) + " outside the feasible range [" + num(range.lo) +
                                                ", " + num(range.hi) + "] for cell diameter " + num(dec.diameter()));
    }
    Discretization disc;
    disc.dec = std::move(dec);
    disc.dt = dt;
    disc.lambda = lambda;
    disc.constants = c;
    disc.v_max = v_max;
    disc.conservative = conservative;
    return disc;
}

Point nominal_endpoint(const Discretization& disc, const Action& action)
{
    const Point ci = disc.dec.cell(action.front()).center();
    Point drift = Point::Zero(ci.size());
    for (std::size_t k = 1; k < action.size(); ++k) drift -= ci - disc.dec.cell(action[k]).center();
    return ci + to_double(disc.dt) * drift;
}

std::vector<CellId> successors(const Discretization& disc, const CommGraph& g, std::size_t agent, const Action& action)
{
    if (action.size() != g.degree(agent) + 1) {
        fail(ErrorCode::DimensionMismatch, "action length " + std::to_string(action.size()) + " does not match the neighbor count");
    }
    for (CellId c : action) {
        if (c >= disc.dec.size()) fail(ErrorCode::IndexOutOfRange, "cell " + std::to_string(c) + " out of range");
    }
    const Point center = nominal_endpoint(disc, action);
    const double r = disc.ball_radius();
    if (!disc.dec.ball_meets_bounds(center, r)) fail(ErrorCode::BallOutsideWorkspace, "reachability ball lies outside the workspace");
    std::vector<CellId> out;
    for (std::size_t c : disc.dec.cells_meeting_ball(center, r)) out.push_back(static_cast<CellId>(c));
    return out;
}

AgentWTS::AgentWTS(std::size_t agent, std::vector<std::size_t> neighbors, std::size_t n_states,
                   std::vector<CellId> initial, Rational weight, std::vector<PropSet> labels, PropSet alphabet, PostFn post)
    : agent_(agent),
      neighbors_(std::move(neighbors)),
      n_states_(n_states),
      initial_(std::move(initial)),
      weight_(weight),
      labels_(std::move(labels)),
      alphabet_(std::move(alphabet)),
      post_(std::move(post)),
      memo_(std::make_shared<Memo>())
{
    if (weight_ <= Rational(0)) fail(ErrorCode::InvalidArgument, "transition weight must be positive");
    if (labels_.size() != n_states_) fail(ErrorCode::DimensionMismatch, "label table does not match the state count");
    std::sort(initial_.begin(), initial_.end());
    for (CellId s : initial_) {
        if (s >= n_states_) fail(ErrorCode::UnknownState, "initial state out of range");
    }
}

const PropSet& AgentWTS::label(CellId s) const
{
    if (s >= n_states_) fail(ErrorCode::UnknownState, "state " + std::to_string(s) + " out of range");
    return labels_[s];
}

const std::vector<CellId>& AgentWTS::post(const Action& action) const
{
    {
        std::lock_guard<std::mutex> lock(memo_->mutex);
        auto it = memo_->table.find(action);
        if (it != memo_->table.end()) return it->second;
    }
    if (action.size() != neighbors_.size() + 1) fail(ErrorCode::DimensionMismatch, "action length does not match the neighbor count");
    std::vector<CellId> result = post_(action);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    std::lock_guard<std::mutex> lock(memo_->mutex);
    return memo_->table.emplace(action, std::move(result)).first->second;
}

bool AgentWTS::enabled(const Action& action, CellId target) const
{
    const auto& p = post(action);
    return std::binary_search(p.begin(), p.end(), target);
}

std::vector<WtsTransition> AgentWTS::transitions() const
{
    std::lock_guard<std::mutex> lock(memo_->mutex);
    std::vector<WtsTransition> out;
    for (const auto& [action, targets] : memo_->table) {
        for (CellId t : targets) out.push_back({action.front(), action, t});
    }
    return out;
}

std::size_t AgentWTS::memo_size() const
{
    std::lock_guard<std::mutex> lock(memo_->mutex);
    return memo_->table.size();
}

AgentWTS build_wts(const Discretization& disc, const CommGraph& g, const ServiceLabeling& labels,
                   std::size_t agent, const Point& initial_position)
{
    if (agent >= g.n_agents()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent) + " out of range");
    const CellId init = static_cast<CellId>(disc.dec.locate(initial_position));
    std::vector<PropSet> table(disc.dec.size());
    for (std::size_t c = 0; c < disc.dec.size(); ++c) table[c] = labels.labels(agent, c);
    auto shared_disc = std::make_shared<const Discretization>(disc);
    auto shared_graph = std::make_shared<const CommGraph>(g);
    auto post = [shared_disc, shared_graph, agent](const Action& a) -> std::vector<CellId> {
        try {
            return successors(*shared_disc, *shared_graph, agent, a);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::BallOutsideWorkspace) return {};
            throw;
        }
    };
    return AgentWTS(agent, g.neighbors(agent), disc.dec.size(), {init}, disc.dt, std::move(table), labels.alphabet(agent), post);
}

AgentWTS explicit_wts(std::size_t agent, std::vector<std::size_t> neighbors, std::size_t n_states,
                      std::vector<CellId> initial, Rational weight, std::vector<PropSet> labels,
                      const std::vector<WtsTransition>& transitions)
{
    auto table = std::make_shared<std::map<Action, std::vector<CellId>>>();
    PropSet alphabet;
    for (const PropSet& l : labels) alphabet.insert(l.begin(), l.end());
    for (const WtsTransition& t : transitions) {
        if (t.action.empty() || t.action.front() != t.source) fail(ErrorCode::InvalidArgument, "action must start with the source state");
        (*table)[t.action].push_back(t.target);
    }
    auto post = [table](const Action& a) -> std::vector<CellId> {
        auto it = table->find(a);
        return it == table->end() ? std::vector<CellId>{} : it->second;
    };
    return AgentWTS(agent, std::move(neighbors), n_states, std::move(initial), weight, std::move(labels), std::move(alphabet), post);
}

std::vector<std::vector<CellId>> reachable_frontier(const std::vector<AgentWTS>& wts, std::size_t max_posts)
{
    const std::size_t n = wts.size();
    std::vector<std::vector<char>> member(n);
    std::vector<std::vector<CellId>> reach(n);
    for (std::size_t i = 0; i < n; ++i) {
        member[i].assign(wts[i].n_states(), 0);
        for (CellId s : wts[i].initial()) {
            if (!member[i][s]) {
                member[i][s] = 1;
                reach[i].push_back(s);
            }
        }
    }
    std::size_t queries = 0;
    auto check_budget = [&]() {
        std::size_t posts = 0;
        for (const AgentWTS& w : wts) posts += w.memo_size();
        if (posts > max_posts) fail(ErrorCode::ResourceBudgetExceeded, "reachable-action frontier exceeds the budget of " + std::to_string(max_posts) + " successor sets");
    };
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<CellId>> snapshot = reach;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& nb = wts[i].neighbors();
            std::vector<std::size_t> radix(nb.size(), 0);
            for (CellId src : snapshot[i]) {
                std::fill(radix.begin(), radix.end(), 0);
                while (true) {
                    Action a{src};
                    for (std::size_t k = 0; k < nb.size(); ++k) a.push_back(snapshot[nb[k]][radix[k]]);
                    if ((++queries & 4095) == 0) check_budget();
                    for (CellId t : wts[i].post(a)) {
                        if (!member[i][t]) {
                            member[i][t] = 1;
                            reach[i].push_back(t);
                            changed = true;
                        }
                    }
                    std::size_t k = nb.size();
                    bool done = true;
                    while (k > 0) {
                        --k;
                        if (++radix[k] < snapshot[nb[k]].size()) {
                            done = false;
                            break;
                        }
                        radix[k] = 0;
                    }
                    if (done) break;
                }
            }
        }
        check_budget();
    }
    for (auto& r : reach) std::sort(r.begin(), r.end());
    return reach;
}

}  // namespace tmas
