#include "tmas/workspace.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tmas {

double Box::volume() const
{
    double v = 1.0;
    for (std::size_t k = 0; k < dim(); ++k) v *= hi(static_cast<Eigen::Index>(k)) - lo(static_cast<Eigen::Index>(k));
    return v;
}

bool Box::contains(const Point& p, double eps) const
{
    for (std::size_t k = 0; k < dim(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        if (p(e) < lo(e) - eps || p(e) > hi(e) + eps) return false;
    }
    return true;
}

double Box::squared_distance(const Point& p) const
{
    double s = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        double d = 0.0;
        if (p(e) < lo(e)) d = lo(e) - p(e);
        else if (p(e) > hi(e)) d = p(e) - hi(e);
        s += d * d;
    }
    return s;
}

namespace {

void check_box(const Box& b, const std::string& what)
{
    if (b.lo.size() != b.hi.size() || b.lo.size() == 0) fail(ErrorCode::DimensionMismatch, what + " has inconsistent dimension");
    for (std::size_t k = 0; k < b.dim(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        if (!(b.hi(e) - b.lo(e) > kGeoEps)) fail(ErrorCode::InvalidArgument, what + " has empty interior");
    }
}

bool interiors_overlap(const Box& a, const Box& b)
{
    for (std::size_t k = 0; k < a.dim(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        if (std::min(a.hi(e), b.hi(e)) - std::max(a.lo(e), b.lo(e)) <= kGeoEps) return false;
    }
    return true;
}

}  // namespace

CellDecomposition::CellDecomposition(Box bounds, std::vector<Box> cells)
    : bounds_(std::move(bounds)), cells_(std::move(cells))
{
    check_box(bounds_, "workspace bounds");
    if (cells_.empty()) fail(ErrorCode::InvalidArgument, "decomposition has no cells");
    const std::size_t n = dim();
    inradius_ = std::numeric_limits<double>::infinity();
    double volume = 0.0;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const Box& c = cells_[i];
        check_box(c, "cell " + std::to_string(i));
        if (c.dim() != n) fail(ErrorCode::DimensionMismatch, "cell " + std::to_string(i) + " has wrong dimension");
        if (!bounds_.contains(c.lo) || !bounds_.contains(c.hi)) fail(ErrorCode::OutOfBounds, "cell " + std::to_string(i) + " leaves the bounds");
        diameter_ = std::max(diameter_, c.diagonal());
        for (std::size_t k = 0; k < n; ++k) {
            const auto e = static_cast<Eigen::Index>(k);
            inradius_ = std::min(inradius_, (c.hi(e) - c.lo(e)) / 2.0);
        }
        volume += c.volume();
    }
    const double bv = bounds_.volume();
    if (std::abs(volume - bv) > 1e-6 * bv) fail(ErrorCode::InvalidArgument, "cells do not cover the bounds");

    // Uniform bucket index over the bounds.
    const double per_axis = std::pow(static_cast<double>(cells_.size()), 1.0 / static_cast<double>(n));
    const std::size_t b = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(per_axis)), 1, 512);
    buckets_per_axis_.assign(n, b);
    std::size_t total = 1;
    for (std::size_t k = 0; k < n; ++k) total *= b;
    buckets_.assign(total, {});
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        for (std::size_t id : candidates(cells_[i])) buckets_[id].push_back(i);
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        for (std::size_t id : candidates(cells_[i])) {
            for (std::size_t j : buckets_[id]) {
                if (j < i && interiors_overlap(cells_[i], cells_[j])) {
                    fail(ErrorCode::InvalidArgument, "cells " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
                }
            }
        }
    }
}

const Box& CellDecomposition::cell(std::size_t i) const
{
    if (i >= cells_.size()) fail(ErrorCode::IndexOutOfRange, "cell " + std::to_string(i) + " out of range");
    return cells_[i];
}

std::vector<std::size_t> CellDecomposition::candidates(const Box& region) const
{
    // Bucket ids whose slab range meets the region, in row-major order.
    const std::size_t n = dim();
    std::vector<std::size_t> lo(n), hi(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        const double span = bounds_.hi(e) - bounds_.lo(e);
        const double b = static_cast<double>(buckets_per_axis_[k]);
        auto index_of = [&](double v) {
            double f = std::floor((v - bounds_.lo(e)) / span * b);
            return static_cast<std::size_t>(std::clamp(f, 0.0, b - 1.0));
        };
        if (region.hi(e) < bounds_.lo(e) - kGeoEps || region.lo(e) > bounds_.hi(e) + kGeoEps) return {};
        lo[k] = index_of(region.lo(e) - kGeoEps);
        hi[k] = index_of(region.hi(e) + kGeoEps);
    }
    std::vector<std::size_t> out;
    std::vector<std::size_t> cur = lo;
    while (true) {
        std::size_t id = 0;
        for (std::size_t k = 0; k < n; ++k) id = id * buckets_per_axis_[k] + cur[k];
        out.push_back(id);
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (cur[k] < hi[k]) {
                ++cur[k];
                break;
            }
            cur[k] = lo[k];
            if (k == 0) return out;
        }
    }
}

std::size_t CellDecomposition::locate(const Point& p) const
{
    if (static_cast<std::size_t>(p.size()) != dim()) fail(ErrorCode::DimensionMismatch, "point has wrong dimension");
    if (!bounds_.contains(p)) fail(ErrorCode::OutOfBounds, "point outside the workspace bounds");
    Point q = p;
    for (std::size_t k = 0; k < dim(); ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        q(e) = std::clamp(q(e), bounds_.lo(e), bounds_.hi(e));
    }
    Box probe{q, q};
    for (std::size_t id : candidates(probe)) {
        for (std::size_t i : buckets_[id]) {
            const Box& c = cells_[i];
            bool inside = true;
            for (std::size_t k = 0; k < dim() && inside; ++k) {
                const auto e = static_cast<Eigen::Index>(k);
                const bool at_top = c.hi(e) >= bounds_.hi(e);
                inside = q(e) >= c.lo(e) && (q(e) < c.hi(e) || (at_top && q(e) <= c.hi(e)));
            }
            if (inside) return i;
        }
    }
    fail(ErrorCode::OutOfBounds, "no cell owns the point");
}

bool CellDecomposition::ball_meets_bounds(const Point& c, double r) const
{
    return bounds_.squared_distance(c) <= (r + kGeoEps) * (r + kGeoEps);
}

std::vector<std::size_t> CellDecomposition::cells_meeting_ball(const Point& c, double r) const
{
    std::vector<std::size_t> out;
    if (!ball_meets_bounds(c, r)) return out;
    Box region{c.array() - r, c.array() + r};
    const double limit = (r + kGeoEps) * (r + kGeoEps);
    for (std::size_t id : candidates(region)) {
        for (std::size_t i : buckets_[id]) {
            if (cells_[i].squared_distance(c) <= limit) out.push_back(i);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

CellDecomposition grid(const Box& bounds, double cell_size)
{
    check_box(bounds, "workspace bounds");
    if (!(cell_size > 0.0)) fail(ErrorCode::InvalidArgument, "cell size must be positive");
    const std::size_t n = bounds.dim();
    std::vector<std::size_t> counts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto e = static_cast<Eigen::Index>(k);
        const double side = bounds.hi(e) - bounds.lo(e);
        if (cell_size > side + kGeoEps) fail(ErrorCode::CellSizeTooLarge, "cell size exceeds a workspace side");
        counts[k] = static_cast<std::size_t>(std::ceil(side / cell_size - 1e-9));
    }
    auto edge = [&](std::size_t k, std::size_t idx) {
        const auto e = static_cast<Eigen::Index>(k);
        if (idx >= counts[k]) return bounds.hi(e);
        return std::min(bounds.lo(e) + static_cast<double>(idx) * cell_size, bounds.hi(e));
    };
    std::vector<Box> cells;
    std::vector<std::size_t> cur(n, 0);
    while (true) {
        Box b{Point(static_cast<Eigen::Index>(n)), Point(static_cast<Eigen::Index>(n))};
        for (std::size_t k = 0; k < n; ++k) {
            b.lo(static_cast<Eigen::Index>(k)) = edge(k, cur[k]);
            b.hi(static_cast<Eigen::Index>(k)) = edge(k, cur[k] + 1);
        }
        cells.push_back(std::move(b));
        std::size_t k = n;
        bool done = true;
        while (k > 0) {
            --k;
            if (++cur[k] < counts[k]) {
                done = false;
                break;
            }
            cur[k] = 0;
        }
        if (done) break;
    }
    return CellDecomposition(bounds, std::move(cells));
}

CellDecomposition intersect_decompositions(const CellDecomposition& abs_dec, const CellDecomposition& spec_dec)
{
    const Box& a = abs_dec.bounds();
    const Box& b = spec_dec.bounds();
    if (a.dim() != b.dim() || (a.lo - b.lo).cwiseAbs().maxCoeff() > kGeoEps || (a.hi - b.hi).cwiseAbs().maxCoeff() > kGeoEps) {
        fail(ErrorCode::BoundsMismatch, "decompositions have different bounds");
    }
    std::vector<Box> cells;
    for (const Box& ca : abs_dec.cells()) {
        for (const Box& cb : spec_dec.cells()) {
            Box o{ca.lo.cwiseMax(cb.lo), ca.hi.cwiseMin(cb.hi)};
            if (((o.hi - o.lo).array() > kGeoEps).all()) cells.push_back(std::move(o));
        }
    }
    return CellDecomposition(a, std::move(cells));
}

ServiceLabeling::ServiceLabeling(std::size_t n_agents) : alphabets_(n_agents), labels_(n_agents) {}

void ServiceLabeling::declare(std::size_t agent, const std::string& service)
{
    if (agent >= alphabets_.size()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent) + " out of range");
    alphabets_[agent].insert(service);
}

void ServiceLabeling::assign(std::size_t agent, std::size_t cell, const std::string& service)
{
    declare(agent, service);
    labels_[agent][cell].insert(service);
}

const PropSet& ServiceLabeling::alphabet(std::size_t agent) const
{
    if (agent >= alphabets_.size()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent) + " out of range");
    return alphabets_[agent];
}

PropSet ServiceLabeling::labels(std::size_t agent, std::size_t cell) const
{
    if (agent >= labels_.size()) fail(ErrorCode::IndexOutOfRange, "agent " + std::to_string(agent) + " out of range");
    auto it = labels_[agent].find(cell);
    return it == labels_[agent].end() ? PropSet{} : it->second;
}

void ServiceLabeling::check_disjoint() const
{
    for (std::size_t i = 0; i < alphabets_.size(); ++i) {
        for (std::size_t j = i + 1; j < alphabets_.size(); ++j) {
            for (const std::string& s : alphabets_[i]) {
                if (alphabets_[j].count(s)) {
                    fail(ErrorCode::SharedService, "service '" + s + "' is declared by agents " + std::to_string(i + 1) + " and " + std::to_string(j + 1));
                }
            }
        }
    }
}

ServiceLabeling ServiceLabeling::transfer(const CellDecomposition& source, const CellDecomposition& target) const
{
    ServiceLabeling out(n_agents());
    out.alphabets_ = alphabets_;
    for (std::size_t c = 0; c < target.size(); ++c) {
        std::size_t parent = source.locate(target.cell(c).center());
        for (std::size_t i = 0; i < n_agents(); ++i) {
            auto it = labels_[i].find(parent);
            if (it != labels_[i].end() && !it->second.empty()) out.labels_[i][c] = it->second;
        }
    }
    return out;
}

}  // namespace tmas
