#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tmas/workspace.hpp"

#include <cmath>
#include <random>

using namespace tmas;
using Catch::Approx;
using oracle::error_code;
using oracle::pt;

namespace {

Box box(double x0, double x1, double y0, double y1) { return Box{pt(x0, y0), pt(x1, y1)}; }

Box unit_square() { return box(0, 1, 0, 1); }

CellDecomposition product_cells(const Box& bounds, const std::vector<double>& xs, const std::vector<double>& ys)
{
    std::vector<Box> cells;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        for (std::size_t j = 0; j + 1 < ys.size(); ++j) cells.push_back(box(xs[i], xs[i + 1], ys[j], ys[j + 1]));
    }
    return CellDecomposition(bounds, cells);
}

}  // namespace

TEST_CASE("uniform grids", "[workspace]")
{
    const CellDecomposition a = grid(unit_square(), 0.5);
    CHECK(a.size() == 4);
    CHECK(a.diameter() == Approx(std::sqrt(2.0) / 2));
    CHECK(a.inradius() == Approx(0.25));

    const CellDecomposition b = grid(unit_square(), 0.3);
    CHECK(b.size() == 16);
    // Last row and column are clipped to the bounds.
    CHECK(b.cell(15).hi[0] == Approx(1.0));
    CHECK(b.cell(15).lo[0] == Approx(0.9));

    CHECK(error_code([] { grid(unit_square(), 2.0); }) == ErrorCode::CellSizeTooLarge);
}

TEST_CASE("grid cells partition the bounds", "[workspace]")
{
    const CellDecomposition d = grid(box(-1, 2, 0, 1.3), 0.4);
    double vol = 0.0;
    for (const Box& c : d.cells()) vol += c.volume();
    CHECK(vol == Approx(d.bounds().volume()));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(-1, 2), uy(0, 1.3);
    for (int k = 0; k < 2000; ++k) {
        const Point p = pt(ux(rng), uy(rng));
        const std::size_t c = d.locate(p);
        CHECK(d.cell(c).contains(p));
    }
}

TEST_CASE("locate", "[workspace]")
{
    const CellDecomposition d = grid(unit_square(), 0.5);
    CHECK(d.locate(pt(0.25, 0.25)) == 0);
    CHECK(d.locate(pt(0.25, 0.75)) == 1);
    CHECK(d.locate(pt(0.75, 0.25)) == 2);
    // Shared faces go to the upper cell.
    CHECK(d.locate(pt(0.5, 0.5)) == 3);
    CHECK(d.locate(pt(1.0, 1.0)) == 3);
    CHECK(error_code([&] { d.locate(pt(2, 2)); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("decomposition overlays", "[workspace]")
{
    SECTION("identical decompositions")
    {
        const CellDecomposition g = grid(unit_square(), 0.5);
        CHECK(intersect_decompositions(g, g).size() == 4);
    }
    SECTION("trivial refinement")
    {
        const CellDecomposition g = grid(unit_square(), 0.5);
        const CellDecomposition one(unit_square(), {unit_square()});
        const CellDecomposition r = intersect_decompositions(g, one);
        REQUIRE(r.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK((r.cell(i).lo - g.cell(i).lo).norm() < 1e-12);
            CHECK((r.cell(i).hi - g.cell(i).hi).norm() < 1e-12);
        }
    }
    SECTION("six by six cells give fifteen regions")
    {
        const Box b = box(-10, 0, -5, 0);
        const CellDecomposition red = product_cells(b, {-10, -7.5, -2.5, 0}, {-5, -2.5, 0});
        const CellDecomposition blue = product_cells(b, {-10, -6.5, -3.5, 0}, {-5, -3.5, 0});
        REQUIRE(red.size() == 6);
        REQUIRE(blue.size() == 6);
        const CellDecomposition both = intersect_decompositions(red, blue);
        CHECK(both.size() == 15);
        double vol = 0.0;
        for (const Box& c : both.cells()) vol += c.volume();
        CHECK(vol == Approx(50.0));
    }
    SECTION("bounds must agree")
    {
        const CellDecomposition a = grid(unit_square(), 0.5);
        const CellDecomposition b = grid(box(0, 2, 0, 1), 0.5);
        CHECK(error_code([&] { intersect_decompositions(a, b); }) == ErrorCode::BoundsMismatch);
    }
}

TEST_CASE("cells meeting a ball", "[workspace]")
{
    const CellDecomposition d = grid(unit_square(), 0.5);
    CHECK(d.cells_meeting_ball(pt(0.25, 0.25), 0.1) == std::vector<std::size_t>{0});
    CHECK(d.cells_meeting_ball(pt(0.45, 0.25), 0.1) == std::vector<std::size_t>{0, 2});
    CHECK(d.cells_meeting_ball(pt(0.5, 0.5), 0.01).size() == 4);
    CHECK(d.ball_meets_bounds(pt(1.05, 0.5), 0.1));
    CHECK_FALSE(d.ball_meets_bounds(pt(3, 3), 0.1));
}

TEST_CASE("service labeling", "[workspace]")
{
    ServiceLabeling l(2);
    l.declare(0, "pickUp1");
    l.assign(0, 3, "deliver1");
    l.assign(1, 3, "load2");
    CHECK(l.alphabet(0) == PropSet{"deliver1", "pickUp1"});
    CHECK(l.labels(0, 3) == PropSet{"deliver1"});
    CHECK(l.labels(0, 2).empty());
    CHECK_FALSE(error_code([&] { l.check_disjoint(); }));
    l.assign(1, 0, "pickUp1");
    CHECK(error_code([&] { l.check_disjoint(); }) == ErrorCode::SharedService);

    ServiceLabeling coarse(1);
    coarse.assign(0, 1, "p");
    const CellDecomposition src(unit_square(), {box(0, 0.5, 0, 1), box(0.5, 1, 0, 1)});
    const CellDecomposition dst = grid(unit_square(), 0.5);
    const ServiceLabeling fine = coarse.transfer(src, dst);
    CHECK(fine.labels(0, 0).empty());
    CHECK(fine.labels(0, 1).empty());
    CHECK(fine.labels(0, 2) == PropSet{"p"});
    CHECK(fine.labels(0, 3) == PropSet{"p"});
}
