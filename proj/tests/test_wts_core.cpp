#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tmas/wts_core.hpp"

#include <sstream>

using namespace tmas;
using oracle::error_code;
using oracle::pt;

namespace {

// Three agents: agent 0 observes agents 1 and 2, each of which observes agent 0.
std::vector<AgentWTS> three_runs_system()
{
    const Rational dt(1, 10);
    std::vector<PropSet> labels(29);
    labels[20] = {"done0"};
    const AgentWTS i = explicit_wts(0, {1, 2}, 29, {14}, dt, labels,
                                    {{14, {14, 28, 2}, 17}, {17, {17, 27, 13}, 10}, {10, {10, 24, 5}, 20},
                                     {20, {20, 22, 9}, 20}});
    const AgentWTS j1 = explicit_wts(1, {0}, 29, {28}, dt, std::vector<PropSet>(29),
                                     {{28, {28, 14}, 27}, {27, {27, 17}, 24}, {24, {24, 10}, 22}, {22, {22, 20}, 22}});
    const AgentWTS j2 = explicit_wts(2, {0}, 29, {2}, dt, std::vector<PropSet>(29),
                                     {{2, {2, 14}, 13}, {13, {13, 17}, 5}, {5, {5, 10}, 9}, {9, {9, 20}, 9}});
    return {i, j1, j2};
}

std::vector<CellRun> three_runs(const Rational& dt)
{
    return {uniform_lasso<CellId>({14, 17, 10, 20}, 3, dt), uniform_lasso<CellId>({28, 27, 24, 22}, 3, dt),
            uniform_lasso<CellId>({2, 13, 5, 9}, 3, dt)};
}

}  // namespace

TEST_CASE("product path of three consistent runs", "[wts_core]")
{
    ProductWTS p(three_runs_system());
    const std::vector<JointState> path{{14, 28, 2}, {17, 27, 13}, {10, 24, 5}, {20, 22, 9}};
    for (std::size_t k = 0; k + 1 < path.size(); ++k) CHECK(p.is_transition(path[k], path[k + 1]));
    CHECK(p.is_transition(path.back(), path.back()));
    CHECK_FALSE(p.is_transition(path[0], path[2]));
    CHECK(p.action_of(path[1], 0) == Action{17, 27, 13});
    CHECK(p.action_of(path[1], 2) == Action{13, 17});

    const auto init = p.initial_states();
    REQUIRE(init.size() == 1);
    CHECK(p.joint(init[0]) == path[0]);
    const auto succ = p.successors(init[0]);
    REQUIRE(succ.size() == 1);
    CHECK(p.joint(succ[0]) == path[1]);
    CHECK(p.label(init[0]).empty());
    CHECK(p.alphabet() == PropSet{"done0"});
}

TEST_CASE("consistency of runs", "[wts_core]")
{
    const auto wts = three_runs_system();
    const Rational dt(1, 10);
    CHECK(check_consistent(three_runs(dt), wts));

    auto shifted = three_runs(dt);
    shifted[2] = uniform_lasso<CellId>({13, 5, 9, 9}, 3, dt);
    CHECK_FALSE(check_consistent(shifted, wts));

    auto short_runs = three_runs(dt);
    short_runs[1] = uniform_lasso<CellId>({28, 27, 24}, 2, dt);
    CHECK(error_code([&] { check_consistent(short_runs, wts); }) == ErrorCode::LengthMismatch);

    // A single agent's own run is consistent with itself.
    const AgentWTS solo = explicit_wts(0, {}, 2, {0}, dt, std::vector<PropSet>(2), {{0, {0}, 1}, {1, {1}, 0}});
    CHECK(check_consistent({uniform_lasso<CellId>({0, 1}, 0, dt)}, {solo}));
}

TEST_CASE("single agent product is the agent system", "[wts_core]")
{
    const Rational dt(1, 2);
    const AgentWTS solo =
        explicit_wts(0, {}, 3, {0}, dt, {{"a"}, {}, {"b"}}, {{0, {0}, 1}, {0, {0}, 2}, {1, {1}, 0}, {2, {2}, 2}});
    ProductWTS p({solo});
    const auto counts = p.reachable_counts(3);
    CHECK(counts.within.back() == 3);
    CHECK(p.alphabet() == PropSet{"a", "b"});
}

TEST_CASE("alignment, projection and words", "[wts_core]")
{
    const Rational dt(1, 10);
    const std::vector<CellRun> runs = three_runs(dt);
    const JointRun joint = zip_runs(runs);
    REQUIRE(joint.size() == 4);
    CHECK(joint.steps[2].value == JointState{10, 24, 5});
    for (std::size_t i = 0; i < 3; ++i) CHECK(project(joint, i) == runs[i]);

    const CellRun r0 = project(joint, 0);
    CHECK(r0.time(3) == Rational(3, 10));
    CHECK(r0.value(3) == 20);

    const auto wts = three_runs_system();
    const TimedWord w = timed_word(r0, wts[0]);
    CHECK(w.steps[0].value.empty());
    CHECK(w.steps[3].value == PropSet{"done0"});
    CHECK(w.period == dt);

    const std::vector<CellRun> uneven{uniform_lasso<CellId>({1, 2, 3}, 1, dt), uniform_lasso<CellId>({4, 5, 6, 7}, 1, dt)};
    const auto aligned = align_runs(uneven);
    CHECK(aligned[0].size() == aligned[1].size());
    CHECK(aligned[0].loop_start == 1);
    CHECK(aligned[0].cycle_length() == 6);
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK(aligned[0].value(k) == uneven[0].value(k));
        CHECK(aligned[1].value(k) == uneven[1].value(k));
    }
}

TEST_CASE("word of a three-state example run", "[wts_core]")
{
    auto sys = oracle::three_state_system();
    TimedRun<StateId> r;
    r.steps = {{0, Rational(0)}, {1, Rational(1)}};
    r.loop_start = 0;
    r.period = Rational(3);
    const TimedWord w = oracle::run_word(*sys, r);
    CHECK(w.value(0) == PropSet{"green"});
    CHECK(w.value(1).empty());
    CHECK(w.value(2) == PropSet{"green"});
    CHECK(w.time(2) == Rational(3));
    CHECK(sys->weight(1, 0) == Rational(2));
}

TEST_CASE("serialization round trips", "[wts_core]")
{
    const Rational dt(1, 10);
    const auto runs = three_runs(dt);
    std::stringstream a;
    write_run(a, runs[1]);
    CHECK(read_cell_run(a) == runs[1]);

    std::stringstream b;
    const JointRun joint = zip_runs(runs);
    write_run(b, joint);
    CHECK(read_joint_run(b) == joint);

    TimedWord w;
    w.steps = {{{"p"}, Rational(0)}, {{}, Rational(1, 3)}, {{"p", "q"}, Rational(2)}};
    w.loop_start = 1;
    w.period = Rational(5, 2);
    std::stringstream c;
    write_word(c, w);
    CHECK(read_word(c) == w);
}

TEST_CASE("simulation check", "[wts_core]")
{
    const CommGraph g = build_graph(1, {});
    Discretization disc;
    disc.dec = grid(Box{pt(0, 0), pt(1, 1)}, 0.25);
    disc.dt = Rational(1, 10);
    disc.v_max = 1.0;
    disc.lambda = 0.5;
    TransitionLaw idle = [](const JointState&, const JointState&) -> InputLaw {
        return [](std::size_t, const Rational&, const Positions&) -> Point { return Point::Zero(2); };
    };
    const SimulationReport stay = simulation_check(disc, g, {{{5}, {5}}}, idle, 25, 1, Rational(1, 200));
    CHECK(stay.passed());
    CHECK(stay.transitions_checked == 1);
    CHECK(stay.samples_per_transition == 25);
    CHECK(stay.max_input_norm == 0.0);

    // Idling never reaches a different cell.
    const SimulationReport moved = simulation_check(disc, g, {{{5}, {6}}}, idle, 25, 1, Rational(1, 200));
    CHECK(moved.misses == 25);
    REQUIRE_FALSE(moved.details.empty());
    CHECK(moved.details.front().target == 6);
}
