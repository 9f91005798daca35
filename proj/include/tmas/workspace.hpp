#pragma once

#include "tmas/common.hpp"
#include "tmas/dynamics.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace tmas {

struct Box {
    Point lo;
    Point hi;

    std::size_t dim() const { return static_cast<std::size_t>(lo.size()); }
    Point center() const { return (lo + hi) / 2.0; }
    double diagonal() const { return (hi - lo).norm(); }
    double volume() const;
    /// Closed containment with tolerance eps.
    bool contains(const Point& p, double eps = kGeoEps) const;
    /// Squared distance from p to the box (zero inside).
    double squared_distance(const Point& p) const;
};

/// Finite family of axis-aligned boxes partitioning a bounding box.
class CellDecomposition {
public:
    CellDecomposition() = default;
    CellDecomposition(Box bounds, std::vector<Box> cells);

    std::size_t size() const { return cells_.size(); }
    std::size_t dim() const { return bounds_.dim(); }
    const Box& cell(std::size_t i) const;
    const std::vector<Box>& cells() const { return cells_; }
    const Box& bounds() const { return bounds_; }
    /// Largest cell diagonal.
    double diameter() const { return diameter_; }
    /// Smallest half of a cell side (radius of the largest ball that fits in every cell).
    double inradius() const { return inradius_; }

    std::size_t locate(const Point& p) const;
    /// Cells meeting the closed ball of radius r around c, after clipping to the bounds.
    std::vector<std::size_t> cells_meeting_ball(const Point& c, double r) const;
    bool ball_meets_bounds(const Point& c, double r) const;

private:
    std::vector<std::size_t> candidates(const Box& region) const;

    Box bounds_;
    std::vector<Box> cells_;
    double diameter_ = 0.0;
    double inradius_ = 0.0;
    std::vector<std::size_t> buckets_per_axis_;
    std::vector<std::vector<std::size_t>> buckets_;
};

CellDecomposition grid(const Box& bounds, double cell_size);

/// All nonempty overlaps of a cell of `abs_dec` with a cell of `spec_dec`,
/// ordered by (abs index, spec index).
CellDecomposition intersect_decompositions(const CellDecomposition& abs_dec, const CellDecomposition& spec_dec);

/// Per-agent service labels over the cells of one decomposition.
class ServiceLabeling {
public:
    ServiceLabeling() = default;
    explicit ServiceLabeling(std::size_t n_agents);

    std::size_t n_agents() const { return alphabets_.size(); }
    void declare(std::size_t agent, const std::string& service);
    void assign(std::size_t agent, std::size_t cell, const std::string& service);
    const PropSet& alphabet(std::size_t agent) const;
    PropSet labels(std::size_t agent, std::size_t cell) const;
    /// Throws SharedService when two agents declare the same service.
    void check_disjoint() const;
    /// Re-expresses the labels on `target`, each of whose cells must lie inside one cell of `source`.
    ServiceLabeling transfer(const CellDecomposition& source, const CellDecomposition& target) const;

private:
    std::vector<PropSet> alphabets_;
    std::vector<std::map<std::size_t, PropSet>> labels_;
};

}  // namespace tmas
