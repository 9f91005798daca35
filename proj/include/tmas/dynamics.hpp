#pragma once

#include "tmas/graph_model.hpp"
#include "tmas/rational.hpp"

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <vector>

namespace tmas {

using Point = Eigen::VectorXd;
using Positions = std::vector<Point>;

struct AgentState {
    Positions positions;
    Rational time{0};

    std::size_t dim() const { return positions.empty() ? 0 : static_cast<std::size_t>(positions.front().size()); }
};

struct ConditionConstants {
    double m_bound = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double l_combined = 0.0;
};

/// -sum over neighbors j of (x_i - x_j).
Point coupling(const CommGraph& g, const Positions& x, std::size_t i);

/// Input law sampled at the start of each integration step and held for its duration.
using InputLaw = std::function<Point(std::size_t agent, const Rational& t, const Positions& x)>;

struct Trajectory {
    std::vector<AgentState> samples;  // samples[k].time == k * dt_sim
};

/// One classical RK4 step of x' = coupling + u with u held constant.
Positions rk4_step(const CommGraph& g, const Positions& x, const Positions& u, double h);

/// Fixed-step RK4 from x0 over [0, horizon]. Throws InputBoundViolated when a
/// sampled input exceeds v_max.
Trajectory integrate(const CommGraph& g, const AgentState& x0, const InputLaw& input,
                     const Rational& dt_sim, const Rational& horizon, double v_max);

/// ||(D^T kron I_n) x||, computed as the root of the summed squared edge differences.
double relative_norm(const CommGraph& g, const Positions& x);

/// Same quantity through the explicit Kronecker product; used as a cross-check.
double relative_norm_matrix(const CommGraph& g, const Positions& x);

/// V(x) = ||x_tilde||^2.
double lyapunov(const CommGraph& g, const Positions& x);

ConditionConstants condition_constants(const CommGraph& g, const BoundParams& bounds);

/// Constants for an uncoupled single agent: no relative state exists, so M is
/// taken as margin * v_max and the Lipschitz terms vanish.
ConditionConstants single_agent_constants(double v_max, double margin);

/// Columns: t, agent, x1..xn, rel_norm.
void write_trajectory_csv(std::ostream& out, const CommGraph& g, const Trajectory& traj);

}  // namespace tmas
