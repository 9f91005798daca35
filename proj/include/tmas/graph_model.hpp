#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

namespace tmas {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected, connected communication graph. Agents are indexed 0..N-1;
/// edges are stored with first < second in lexicographic order, which fixes
/// the column order of the incidence matrix.
class CommGraph {
public:
    std::size_t n_agents() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::size_t>& neighbors(std::size_t i) const;
    std::size_t degree(std::size_t i) const { return neighbors(i).size(); }

    /// N x |E| incidence matrix, +1 at the lower endpoint and -1 at the upper one.
    Eigen::MatrixXd incidence() const;
    Eigen::MatrixXd laplacian() const;

private:
    friend CommGraph build_graph(std::size_t n, const std::vector<Edge>& edges);
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// Pairs are 0-based. A single agent with no edges is accepted as the
/// degenerate connected graph.
CommGraph build_graph(std::size_t n, const std::vector<Edge>& edges);

struct SpectralData {
    double lambda2 = 0.0;
    double lambda_max = 0.0;
    double incidence_norm = 0.0;
    std::vector<double> eigenvalues;  // ascending
};

SpectralData spectral(const CommGraph& g);

struct BoundParams {
    double v_max = 0.0;
    double margin = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double r_bar = 0.0;
};

BoundParams theorem1_constants(const CommGraph& g, double v_max, double margin = 1.05);

struct Lemma2Report {
    std::vector<double> component_slacks;  // ||L c(x,k)|| - lambda2 ||c(x_perp,k)||
    double projection_slack = 0.0;         // ||x_perp|| - ||x_tilde|| / sqrt(2(N-1))

    bool holds(double eps = 1e-9) const;
};

/// x stacks N points of dimension dim, agent-major.
Lemma2Report lemma2_check(const CommGraph& g, const Eigen::VectorXd& x, std::size_t dim);

/// Subtracts the per-component mean over agents.
Eigen::VectorXd consensus_complement(const Eigen::VectorXd& x, std::size_t n_agents, std::size_t dim);

}  // namespace tmas
