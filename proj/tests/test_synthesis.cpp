#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tmas/scenario.hpp"
#include "tmas/synthesis.hpp"

#include <sstream>

using namespace tmas;
using oracle::error_code;
using oracle::pt;

namespace {

Scenario single_agent()
{
    Scenario sc;
    sc.n_agents = 1;
    sc.v_max = 1.0;
    sc.initial = {pt(0.1, 0.1)};
    sc.bounds = {pt(0, 0), pt(1, 1)};
    sc.label_grid = 0.25;
    sc.labels = {{0, "goal", {4}}};
    sc.cell_size = 0.25;
    sc.lambda = 0.5;
    sc.dt = Rational(1);
    sc.formulas = {"F[0,3] goal"};
    return sc;
}

}  // namespace

TEST_CASE("model construction", "[synthesis]")
{
    const Model m = build_model(oracle::two_agent_scenario());
    REQUIRE(m.wts.size() == 2);
    CHECK(m.disc.dec.size() == 36);
    CHECK(m.bounds->r_bar == Catch::Approx(105.0));
    CHECK(m.constants.l_combined == Catch::Approx(7.0));
    CHECK(m.step_range.contains(0.05));
    CHECK(m.wts[0].initial() == std::vector<CellId>{0});
    CHECK(m.wts[0].label(21) == PropSet{"p1"});
    CHECK(m.wts[1].alphabet() == PropSet{"p2"});
}

TEST_CASE("decoupled agents are planned separately", "[synthesis]")
{
    Model m = build_model(oracle::two_agent_scenario());
    SynthesisStats stats;
    const Plan p = synthesize(m, &stats);
    CHECK(p.method == "decentralized");
    CHECK(p.consistent);
    CHECK(p.certified());
    REQUIRE(p.runs.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(sat(timed_word(p.runs[i], m.wts[i]), 0, *m.formulas[i]));
        // The service is reached within ten steps.
        bool hit = false;
        for (std::size_t k = 0; k <= 10; ++k) hit = hit || !m.wts[i].label(p.runs[i].value(k)).empty();
        CHECK(hit);
    }
    CHECK(check_consistent(p.runs, m.wts));
    CHECK(stats.combos_tried >= 1);
    CHECK(stats.centralized_states == 0);
    CHECK_FALSE(stats.phases.empty());
    CHECK(plan_transitions(p).size() == p.length());
    REQUIRE(p.controls.size() == p.length());
    CHECK(p.controls.front().size() == 2);

    const PlanSimulation sim = simulate_plan(m, p, p.length() + 4);
    CHECK(sim.membership_failures.empty());
    CHECK(sim.max_input_norm <= m.scenario.v_max + 1e-9);
}

TEST_CASE("certificate and falsification control", "[synthesis]")
{
    Model m = build_model(oracle::two_agent_scenario());
    const Plan p = synthesize(m);
    const SimulationReport full = certify(m, p, 25, 7);
    CHECK(full.passed());
    CHECK(full.transitions_checked == p.length());
    // Half authority still lands here: the feasible time step leaves slack.
    CHECK(certify(m, p, 25, 7, 0.5).passed());
    const SimulationReport weak = certify(m, p, 25, 7, 0.05);
    CHECK(weak.misses > 0);
    CHECK_FALSE(weak.details.empty());
}

TEST_CASE("service offered nowhere", "[synthesis]")
{
    Scenario sc = oracle::two_agent_scenario();
    sc.labels[1].cells.clear();
    Model m = build_model(sc);
    CHECK(error_code([&] { synthesize(m); }) == ErrorCode::Infeasible);
}

TEST_CASE("single agent reaches an adjacent goal", "[synthesis]")
{
    Model m = build_model(single_agent());
    const Plan p = synthesize(m);
    CHECK(p.certified());
    const SimulationReport rep = certify(m, p, 25, 3);
    CHECK(rep.passed());
    CHECK(rep.max_input_norm <= 1.0 + 1e-9);
}

TEST_CASE("nominal law at rest", "[synthesis]")
{
    const Model m = build_model(single_agent());
    const InputLaw u = nominal_law(m)({5}, {5});
    const Point c = m.disc.dec.cell(5).center();
    CHECK(u(0, Rational(0), {c}).norm() < 1e-12);
    CHECK(u(0, Rational(1, 2), {c}).norm() < 1e-12);
    CHECK((saturate(pt(3, 4), 1.0) - pt(0.6, 0.8)).norm() < 1e-12);
    CHECK((saturate(pt(0.3, 0.4), 1.0) - pt(0.3, 0.4)).norm() == 0.0);
}

TEST_CASE("plan files", "[synthesis]")
{
    Model m = build_model(oracle::two_agent_scenario());
    const Plan p = synthesize(m);
    std::stringstream s;
    write_plan_json(s, m, p);
    const Plan q = read_plan_json(s, m);
    CHECK(q.runs == p.runs);
    CHECK(q.method == p.method);

    std::stringstream t;
    write_plan_json(t, m, p);
    const Model other = build_model(single_agent());
    CHECK(error_code([&] { read_plan_json(t, other); }) == ErrorCode::PlanMismatch);
}

TEST_CASE("scenario text round trip", "[synthesis]")
{
    const Scenario sc = oracle::two_agent_scenario();
    std::istringstream in(canonical_text(sc));
    const Scenario back = parse_scenario(in);
    CHECK(canonical_text(back) == canonical_text(sc));
    CHECK(fingerprint(back) == fingerprint(sc));
    CHECK(fingerprint(oracle::path3_scenario(0.14)) != fingerprint(sc));
    std::istringstream bad("[nonsense]\nkey = 1\n");
    CHECK(error_code([&] { parse_scenario(bad); }) == ErrorCode::ScenarioError);
}

TEST_CASE("reachable counts", "[synthesis]")
{
    Scenario one = single_agent();
    one.bounds = {pt(0, 0), pt(0.25, 0.25)};
    one.initial = {pt(0.1, 0.1)};
    one.label_grid.reset();
    one.label_cells = {Box{pt(0, 0), pt(0.25, 0.25)}};
    one.labels = {{0, "goal", {0}}};
    for (const StatsRow& r : product_stats(build_model(one), 4)) {
        CHECK(r.exact == 1);
        CHECK(r.within == 1);
    }
    const auto rows = product_stats(build_model(oracle::path3_scenario(0.14)), 4);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(rows[k].within >= rows[k - 1].within);
        CHECK(rows[k].exact >= rows[k - 1].exact);
    }
}
