#include "tmas/dynamics.hpp"

#include "tmas/error.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace tmas {

Point coupling(const CommGraph& g, const Positions& x, std::size_t i)
{
    if (i >= x.size() || i >= g.n_agents()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(i) + " out of range");
    Point acc = Point::Zero(x[i].size());
    for (std::size_t j : g.neighbors(i)) acc -= x[i] - x[j];
    return acc;
}

namespace {

Positions derivative(const CommGraph& g, const Positions& x, const Positions& u)
{
    Positions dx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = coupling(g, x, i) + u[i];
    return dx;
}

Positions axpy(const Positions& x, const Positions& k, double h)
{
    Positions out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * k[i];
    return out;
}

}  // namespace

Positions rk4_step(const CommGraph& g, const Positions& x, const Positions& u, double h)
{
    Positions k1 = derivative(g, x, u);
    Positions k2 = derivative(g, axpy(x, k1, h / 2.0), u);
    Positions k3 = derivative(g, axpy(x, k2, h / 2.0), u);
    Positions k4 = derivative(g, axpy(x, k3, h), u);
    Positions out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

Trajectory integrate(const CommGraph& g, const AgentState& x0, const InputLaw& input,
                     const Rational& dt_sim, const Rational& horizon, double v_max)
{
    if (dt_sim <= Rational(0)) fail(ErrorCode::InvalidArgument, "dt_sim must be positive");
    if (x0.positions.size() != g.n_agents()) fail(ErrorCode::DimensionMismatch, "state does not match agent count");
    const std::size_t dim = x0.dim();
    for (const Point& p : x0.positions) {
        if (static_cast<std::size_t>(p.size()) != dim || dim == 0) fail(ErrorCode::DimensionMismatch, "inconsistent state dimension");
    }
    const Rational ratio = horizon / dt_sim;
    const std::int64_t steps = ratio.numerator() / ratio.denominator();
    const double h = to_double(dt_sim);
    const double bound = v_max * (1.0 + 1e-12) + 1e-12;

    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    traj.samples.push_back(x0);
    Positions x = x0.positions;
    Rational t = x0.time;
    Positions u(x.size());
    for (std::int64_t k = 0; k < steps; ++k) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            u[i] = input(i, t, x);
            if (static_cast<std::size_t>(u[i].size()) != dim) fail(ErrorCode::DimensionMismatch, "input dimension mismatch");
            if (u[i].norm() > bound) {
                fail(ErrorCode::InputBoundViolated, "agent " + std::to_string(i) + " input norm " + std::to_string(u[i].norm()) +
                                                        " exceeds v_max at t=" + to_decimal_string(t));
            }
        }
        x = rk4_step(g, x, u, h);
        t += dt_sim;
        traj.samples.push_back(AgentState{x, t});
    }
    return traj;
}

double relative_norm(const CommGraph& g, const Positions& x)
{
    double sum = 0.0;
    for (const auto& [a, b] : g.edges()) sum += (x[a] - x[b]).squaredNorm();
    return std::sqrt(sum);
}

double relative_norm_matrix(const CommGraph& g, const Positions& x)
{
    const std::size_t n = g.n_agents();
    const Eigen::Index dim = x.front().size();
    Eigen::MatrixXd dt = g.incidence().transpose();
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(dt.rows() * dim, dt.cols() * dim);
    for (Eigen::Index r = 0; r < dt.rows(); ++r) {
        for (Eigen::Index c = 0; c < dt.cols(); ++c) {
            kron.block(r * dim, c * dim, dim, dim) = dt(r, c) * Eigen::MatrixXd::Identity(dim, dim);
        }
    }
    Eigen::VectorXd stacked(static_cast<Eigen::Index>(n) * dim);
    for (std::size_t i = 0; i < n; ++i) stacked.segment(static_cast<Eigen::Index>(i) * dim, dim) = x[i];
    return (kron * stacked).norm();
}

double lyapunov(const CommGraph& g, const Positions& x)
{
    double r = relative_norm(g, x);
    return r * r;
}

ConditionConstants condition_constants(const CommGraph& g, const BoundParams& bounds)
{
    ConditionConstants c;
    c.m_bound = bounds.r_bar;
    for (std::size_t i = 0; i < g.n_agents(); ++i) {
        const double ni = static_cast<double>(g.degree(i));
        c.l1 = std::max(c.l1, std::sqrt(ni));
        c.l2 = std::max(c.l2, ni);
    }
    for (std::size_t i = 0; i < g.n_agents(); ++i) {
        const double ni = static_cast<double>(g.degree(i));
        c.l_combined = std::max(c.l_combined, 3.0 * c.l2 + 4.0 * c.l1 * std::sqrt(ni));
    }
    if (!(c.m_bound > bounds.v_max)) {
        fail(ErrorCode::C1Violated, "coupling bound M=" + std::to_string(c.m_bound) + " must exceed v_max=" + std::to_string(bounds.v_max));
    }
    return c;
}

ConditionConstants single_agent_constants(double v_max, double margin)
{
    if (!(margin > 1.0)) fail(ErrorCode::MarginNotAboveOne, "margin must be strictly above 1");
    ConditionConstants c;
    c.m_bound = margin * v_max;
    return c;
}

void write_trajectory_csv(std::ostream& out, const CommGraph& g, const Trajectory& traj)
{
    if (traj.samples.empty()) return;
    const std::size_t dim = traj.samples.front().dim();
    out << "t,agent";
    for (std::size_t k = 0; k < dim; ++k) out << ",x" << (k + 1);
    out << ",rel_norm\n";
    out.precision(12);
    for (const AgentState& s : traj.samples) {
        const std::string t = to_decimal_string(s.time);
        const double rn = relative_norm(g, s.positions);
        for (std::size_t i = 0; i < s.positions.size(); ++i) {
            out << t << ',' << (i + 1);
            for (std::size_t k = 0; k < dim; ++k) out << ',' << s.positions[i](static_cast<Eigen::Index>(k));
            out << ',' << rn << '\n';
        }
    }
}

}  // namespace tmas
