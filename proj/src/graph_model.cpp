#include "tmas/graph_model.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

namespace tmas {

const std::vector<std::size_t>& CommGraph::neighbors(std::size_t i) const
{
    if (i >= n_) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(i) + " out of range");
    return adjacency_[i];
}

Eigen::MatrixXd CommGraph::incidence() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(edges_.size()));
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        d(static_cast<Eigen::Index>(edges_[k].first), static_cast<Eigen::Index>(k)) = 1.0;
        d(static_cast<Eigen::Index>(edges_[k].second), static_cast<Eigen::Index>(k)) = -1.0;
    }
    return d;
}

Eigen::MatrixXd CommGraph::laplacian() const
{
    Eigen::MatrixXd d = incidence();
    return d * d.transpose();
}

CommGraph build_graph(std::size_t n, const std::vector<Edge>& edges)
{
    if (n == 0) fail(ErrorCode::InvalidArgument, "graph needs at least one agent");
    std::set<Edge> seen;
    for (const auto& [a, b] : edges) {
        if (a >= n || b >= n) {
            fail(ErrorCode::IndexOutOfRange, "edge {" + std::to_string(a) + "," + std::to_string(b) + "} references a missing agent");
        }
        if (a == b) fail(ErrorCode::SelfLoop, "self-loop at agent " + std::to_string(a));
        Edge e = std::minmax(a, b);
        if (!seen.insert(e).second) {
            fail(ErrorCode::DuplicateEdge, "duplicate edge {" + std::to_string(e.first) + "," + std::to_string(e.second) + "}");
        }
    }
    CommGraph g;
    g.n_ = n;
    g.edges_.assign(seen.begin(), seen.end());
    g.adjacency_.assign(n, {});
    for (const auto& [a, b] : g.edges_) {
        g.adjacency_[a].push_back(b);
        g.adjacency_[b].push_back(a);
    }
    for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());

    std::vector<bool> reached(n, false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    reached[0] = true;
    while (!frontier.empty()) {
        std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v : g.adjacency_[u]) {
            if (!reached[v]) {
                reached[v] = true;
                frontier.push(v);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) {
            fail(ErrorCode::DisconnectedGraph,
                 "communication graph is not connected (agent " + std::to_string(i) + " unreachable)");
        }
    }
    return g;
}

SpectralData spectral(const CommGraph& g)
{
    if (g.n_agents() < 2) fail(ErrorCode::InvalidArgument, "spectral data needs at least two agents");
    Eigen::MatrixXd lap = g.laplacian();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    if (solver.info() != Eigen::Success) fail(ErrorCode::InvalidArgument, "eigensolver did not converge");
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        double residual = (lap * vectors.col(k) - values(k) * vectors.col(k)).norm();
        if (residual > 1e-8) fail(ErrorCode::InvalidArgument, "eigenpair residual too large");
    }
    SpectralData out;
    out.eigenvalues.assign(values.data(), values.data() + values.size());
    for (double& v : out.eigenvalues) v = std::max(v, 0.0);
    out.lambda2 = out.eigenvalues[1];
    out.lambda_max = out.eigenvalues.back();
    out.incidence_norm = std::sqrt(out.lambda_max);
    return out;
}

BoundParams theorem1_constants(const CommGraph& g, double v_max, double margin)
{
    if (!(v_max > 0.0)) fail(ErrorCode::InvalidArgument, "v_max must be positive");
    if (!(margin > 1.0)) fail(ErrorCode::MarginNotAboveOne, "margin must be strictly above 1");
    SpectralData s = spectral(g);
    const double n = static_cast<double>(g.n_agents());
    BoundParams b;
    b.v_max = v_max;
    b.margin = margin;
    b.k1 = s.lambda2 * s.lambda2 / (2.0 * (n - 1.0));
    b.k2 = 2.0 * std::sqrt(n) * (n - 1.0) * s.incidence_norm / (s.lambda2 * s.lambda2);
    b.r_bar = margin * b.k2 * v_max;
    return b;
}

bool Lemma2Report::holds(double eps) const
{
    for (double s : component_slacks) {
        if (s < -eps) return false;
    }
    return projection_slack >= -eps;
}

Eigen::VectorXd consensus_complement(const Eigen::VectorXd& x, std::size_t n_agents, std::size_t dim)
{
    Eigen::VectorXd out = x;
    for (std::size_t k = 0; k < dim; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n_agents; ++i) mean += x(static_cast<Eigen::Index>(i * dim + k));
        mean /= static_cast<double>(n_agents);
        for (std::size_t i = 0; i < n_agents; ++i) out(static_cast<Eigen::Index>(i * dim + k)) -= mean;
    }
    return out;
}

Lemma2Report lemma2_check(const CommGraph& g, const Eigen::VectorXd& x, std::size_t dim)
{
    const std::size_t n = g.n_agents();
    if (dim == 0 || static_cast<std::size_t>(x.size()) != n * dim) {
        fail(ErrorCode::DimensionMismatch, "state has size " + std::to_string(x.size()) + ", expected " + std::to_string(n * dim));
    }
    SpectralData s = spectral(g);
    Eigen::MatrixXd lap = g.laplacian();
    Eigen::MatrixXd d = g.incidence();
    Eigen::VectorXd xp = consensus_complement(x, n, dim);

    Lemma2Report report;
    double tilde_sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        Eigen::VectorXd c(static_cast<Eigen::Index>(n));
        Eigen::VectorXd cp(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            c(static_cast<Eigen::Index>(i)) = x(static_cast<Eigen::Index>(i * dim + k));
            cp(static_cast<Eigen::Index>(i)) = xp(static_cast<Eigen::Index>(i * dim + k));
        }
        report.component_slacks.push_back((lap * c).norm() - s.lambda2 * cp.norm());
        tilde_sq += (d.transpose() * c).squaredNorm();
    }
    report.projection_slack = xp.norm() - std::sqrt(tilde_sq) / std::sqrt(2.0 * (static_cast<double>(n) - 1.0));
    return report;
}

}  // namespace tmas
