#pragma once

#include "tmas/dynamics.hpp"
#include "tmas/graph_model.hpp"
#include "tmas/workspace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace tmas {

using CellId = std::uint32_t;
/// (l_i, l_j1, ..., l_jNi) with neighbors in ascending agent order.
using Action = std::vector<CellId>;

struct RealInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Feasible diameters (0, d_hi]. d_hi is +inf when M*L = 0.
RealInterval dmax_range(const ConditionConstants& c, double lambda, double v_max);

/// Feasible time steps for a diameter: the roots of M L dt^2 - (1-lambda) v_max dt + d = 0.
RealInterval dt_range(double d_max, const ConditionConstants& c, double lambda, double v_max);

struct Discretization {
    CellDecomposition dec;
    Rational dt{0};
    double lambda = 0.0;
    ConditionConstants constants;
    double v_max = 0.0;
    bool conservative = false;

    double ball_radius() const;
};

/// Validates the feasibility invariants and returns the discretization.
/// Throws InfeasibleDiameter or InfeasibleTimeStep naming the violated range.
Discretization make_discretization(CellDecomposition dec, const Rational& dt, double lambda,
                                   const ConditionConstants& c, double v_max, bool conservative = false);

/// Nominal endpoint center(l_i) + dt * coupling evaluated at cell centers.
Point nominal_endpoint(const Discretization& disc, const Action& action);

/// Cells meeting the reachability ball around the nominal endpoint.
std::vector<CellId> successors(const Discretization& disc, const CommGraph& g, std::size_t agent, const Action& action);

struct WtsTransition {
    CellId source;
    Action action;
    CellId target;
};

/// Agent transition system with lazily computed, memoized successor sets.
/// Copies share the memo table.
class AgentWTS {
public:
    using PostFn = std::function<std::vector<CellId>(const Action&)>;

    AgentWTS(std::size_t agent, std::vector<std::size_t> neighbors, std::size_t n_states,
             std::vector<CellId> initial, Rational weight, std::vector<PropSet> labels, PropSet alphabet, PostFn post);

    std::size_t agent() const { return agent_; }
    const std::vector<std::size_t>& neighbors() const { return neighbors_; }
    std::size_t n_states() const { return n_states_; }
    const std::vector<CellId>& initial() const { return initial_; }
    const Rational& weight() const { return weight_; }
    const PropSet& label(CellId s) const;
    const PropSet& alphabet() const { return alphabet_; }

    /// Post(l_i, action); action[0] is the source state.
    const std::vector<CellId>& post(const Action& action) const;
    bool enabled(const Action& action, CellId target) const;
    /// Transitions materialized so far, in action order.
    std::vector<WtsTransition> transitions() const;
    std::size_t memo_size() const;

private:
    struct Memo {
        std::mutex mutex;
        std::map<Action, std::vector<CellId>> table;
    };

    std::size_t agent_;
    std::vector<std::size_t> neighbors_;
    std::size_t n_states_;
    std::vector<CellId> initial_;
    Rational weight_;
    std::vector<PropSet> labels_;
    PropSet alphabet_;
    PostFn post_;
    std::shared_ptr<Memo> memo_;
};

AgentWTS build_wts(const Discretization& disc, const CommGraph& g, const ServiceLabeling& labels,
                   std::size_t agent, const Point& initial_position);

/// WTS given by an explicit transition list; actions absent from the list have no successors.
AgentWTS explicit_wts(std::size_t agent, std::vector<std::size_t> neighbors, std::size_t n_states,
                      std::vector<CellId> initial, Rational weight, std::vector<PropSet> labels,
                      const std::vector<WtsTransition>& transitions);

/// Per-agent cells reachable under some joint evolution: the least fixpoint
/// of R_i <- R_i U Post_i(R_i x R_neighbors). Throws ResourceBudgetExceeded
/// once more than max_posts successor sets have been requested.
std::vector<std::vector<CellId>> reachable_frontier(const std::vector<AgentWTS>& wts, std::size_t max_posts);

}  // namespace tmas
