#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tmas/tba.hpp"

#include <random>

using namespace tmas;
using oracle::error_code;

namespace {

using CC = ClockConstraint;

Valuation val(std::initializer_list<ClockValue> v) { return Valuation(v); }
ClockValue at(std::int64_t n, std::int64_t d = 1) { return ClockValue{Rational(n, d), false}; }

TimedWord green_at(const Rational& t)
{
    TimedWord w;
    w.steps = {{{}, Rational(0)}, {{"green"}, t}, {{}, t + Rational(1, 2)}};
    w.loop_start = 2;
    w.period = Rational(1);
    return w;
}

// Labels are matched exactly, so the literal automaton needs green to persist.
TimedWord green_from(const Rational& t)
{
    TimedWord w;
    w.steps = {{{}, Rational(0)}, {{"green"}, t}};
    w.loop_start = 1;
    w.period = Rational(1);
    return w;
}

}  // namespace

TEST_CASE("guard evaluation", "[tba]")
{
    CHECK(eval_guard(val({at(0)}), CC::top()));
    const CC window = CC::all({CC::compare(0, CmpOp::Ge, Rational(2)), CC::compare(0, CmpOp::Le, Rational(5))});
    CHECK(eval_guard(val({at(3)}), window));
    CHECK(eval_guard(val({at(5)}), window));
    CHECK_FALSE(eval_guard(val({at(11, 2)}), window));
    CHECK_FALSE(eval_guard(val({ClockValue::infinity()}), CC::compare(0, CmpOp::Le, Rational(5))));
    CHECK(eval_guard(val({ClockValue::infinity()}), CC::compare(0, CmpOp::Gt, Rational(5))));
    CHECK(eval_guard(val({at(1)}), CC::negate(window)));
    CHECK(eval_guard(val({at(1), at(7)}), CC::any({window, CC::compare(1, CmpOp::Eq, Rational(7))})));
    CHECK(error_code([] { eval_guard(val({at(1)}), CC::compare(3, CmpOp::Lt, Rational(1))); }) ==
          ErrorCode::UndeclaredClock);
}

TEST_CASE("clock values", "[tba]")
{
    CHECK(at(3).plus(Rational(1, 2)) == at(7, 2));
    CHECK(at(3).capped(Rational(2)).inf);
    CHECK(at(2).capped(Rational(2)) == at(2));
    CHECK(ClockValue::infinity().plus(Rational(1)).inf);
    CHECK(at(100) < ClockValue::infinity());
}

TEST_CASE("stepping the three-location automaton", "[tba]")
{
    const Tba a = fig2_tba(Rational(2), Rational(5));
    REQUIRE(a.size() == 3);
    REQUIRE(a.initial() == std::vector<std::size_t>{0});
    const TbaState s0 = initial_state(a, 0);
    CHECK(s0.nu == val({at(0)}));

    std::size_t to_accept = a.edges().size();
    for (std::size_t e : a.out_edges(0)) {
        if (a.location(a.edges()[e].to).accepting) to_accept = e;
    }
    REQUIRE(to_accept < a.edges().size());
    const TbaState s1 = step(a, s0, Rational(3), to_accept);
    CHECK(s1.location == a.edges()[to_accept].to);
    CHECK(s1.nu == val({at(0)}));
    CHECK(error_code([&] { step(a, s0, Rational(1), to_accept); }) == ErrorCode::GuardFailed);

    Tba plain({"c"}, {});
    plain.add_location("a", {}, true);
    plain.add_initial(0);
    plain.add_edge(0, CC::top(), {}, 0);
    const TbaState p0 = initial_state(plain, 0);
    CHECK(step(plain, p0, Rational(0), 0).nu == p0.nu);

    Tba bounded({"c"}, {});
    bounded.add_location("a", {}, true, CC::compare(0, CmpOp::Le, Rational(1)));
    bounded.add_initial(0);
    bounded.add_edge(0, CC::top(), {}, 0);
    CHECK(error_code([&] { step(bounded, initial_state(bounded, 0), Rational(2), 0); }) == ErrorCode::InvariantViolated);
}

TEST_CASE("automaton construction errors", "[tba]")
{
    Tba a({"c"}, {"p"});
    a.add_location("a", {}, true);
    CHECK(error_code([&] { a.add_edge(0, CC::compare(2, CmpOp::Le, Rational(1)), {}, 0); }) == ErrorCode::UndeclaredClock);
    CHECK(error_code([&] { a.add_edge(0, CC::top(), {}, 4); }) == ErrorCode::UnknownState);
}

TEST_CASE("acceptance of timed words", "[tba]")
{
    const Tba a = fig2_tba(Rational(2), Rational(5));
    CHECK(accepts(a, green_from(Rational(3))));
    CHECK(accepts(a, green_from(Rational(5))));
    CHECK_FALSE(accepts(a, green_at(Rational(1))));
    CHECK_FALSE(accepts(a, green_from(Rational(6))));
    CHECK_FALSE(accepts(empty_tba({"green"}), green_from(Rational(3))));
    CHECK(accepts(universal_tba({"green"}), green_from(Rational(3))));

    TimedWord foreign = green_from(Rational(3));
    foreign.steps[0].value = {"red"};
    CHECK(error_code([&] { accepts(a, foreign); }) == ErrorCode::AlphabetMismatch);
    CHECK(accepts(a, restrict_word(foreign, a.ap())));
}

TEST_CASE("compiled eventually agrees with sat", "[tba]")
{
    std::mt19937_64 rng(41);
    const Tba compiled = mitl_to_tba(*parse_formula("F[2,5] green"));
    const FormulaPtr f = parse_formula("F[2,5] green");
    for (int k = 0; k < 500; ++k) {
        const TimedWord w = oracle::random_word(rng, {"green"}, 6);
        REQUIRE(accepts(compiled, w) == sat(w, 0, *f));
    }
    // The literal automaton accepts a persistent green exactly when it starts inside the window.
    const Tba literal = fig2_tba(Rational(2), Rational(5));
    for (std::int64_t h = 1; h <= 14; ++h) {
        const Rational t(h, 2);
        REQUIRE(accepts(literal, green_from(t)) == (t >= Rational(2) && t <= Rational(5)));
    }
}

TEST_CASE("fragment membership", "[tba]")
{
    CHECK(in_fragment(*parse_formula("F[0,1] p & G[0,inf] (q | p)")));
    CHECK(in_fragment(*parse_formula("p U[1,2] !q")));
    CHECK(in_fragment(*parse_formula("!F[0,1] p")));
    CHECK_FALSE(in_fragment(*parse_formula("F[0,1] G[0,1] p")));
    CHECK(error_code([] { mitl_to_tba(*parse_formula("F[0,1] G[0,1] p")); }) == ErrorCode::UnsupportedFragment);
    CHECK(mitl_to_tba(*parse_formula("F[0,1] p & G[0,2] q")).ap() == PropSet{"p", "q"});
}

TEST_CASE("intersection", "[tba]")
{
    const Tba a = mitl_to_tba(*parse_formula("F[2,5] p"));
    const Tba b = mitl_to_tba(*parse_formula("F[1,3] q"));
    const Tba both = intersect(a, b);
    CHECK(both.ap() == PropSet{"p", "q"});
    TimedWord w;
    w.steps = {{{}, Rational(0)}, {{"q"}, Rational(2)}, {{"p"}, Rational(3)}, {{}, Rational(4)}};
    w.loop_start = 3;
    w.period = Rational(1);
    CHECK(accepts(both, w));
    CHECK(sat(w, 0, *parse_formula("F[2,5] p & F[1,3] q")));

    std::mt19937_64 rng(43);
    const Tba none = intersect(a, empty_tba({"p"}));
    const FormulaPtr conj = parse_formula("F[2,5] p & F[1,3] q");
    for (int k = 0; k < 100; ++k) {
        const TimedWord r = oracle::random_word(rng, {"p", "q"}, 6);
        REQUIRE_FALSE(accepts(none, restrict_word(r, none.ap())));
        REQUIRE(accepts(both, r) == sat(r, 0, *conj));
    }
}

TEST_CASE("scaling to integer constants", "[tba]")
{
    const ScaledTba s = scale_to_integers(fig2_tba(Rational(1, 5), Rational(1)));
    CHECK(s.scale == 5);
    CHECK(s.automaton.c_max() == Rational(5));
    const ScaledTba id = scale_to_integers(fig2_tba(Rational(2), Rational(5)));
    CHECK(id.scale == 1);
    CHECK(dump(id.automaton) == dump(fig2_tba(Rational(2), Rational(5))));

    std::mt19937_64 rng(47);
    const std::vector<std::string> ap{"p", "q"};
    for (int k = 0; k < 1000; ++k) {
        const Tba a = k % 2 ? oracle::random_tba(rng, ap) : mitl_to_tba(*oracle::random_fragment_formula(rng, ap, 3));
        const TimedWord w = restrict_word(oracle::random_word(rng, ap, 6), a.ap());
        const ScaledTba sc = scale_to_integers(a);
        REQUIRE(accepts(a, w) == accepts(sc.automaton, scale_word(w, sc.scale)));
    }
}
