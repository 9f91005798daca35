#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tmas/mitl.hpp"

#include <random>

using namespace tmas;
using oracle::error_code;

namespace {

TimedWord lasso_word(std::vector<std::pair<PropSet, Rational>> steps, std::size_t loop_start, Rational period)
{
    TimedWord w;
    for (auto& [p, t] : steps) w.steps.push_back({p, t});
    w.loop_start = loop_start;
    w.period = period;
    return w;
}

}  // namespace

TEST_CASE("parsing", "[mitl]")
{
    const FormulaPtr f = parse_formula("F[2,5] green");
    CHECK(f->op == Op::Eventually);
    CHECK(f->interval == make_interval(Rational(2), Rational(5)));
    CHECK(f->lhs->op == Op::Atom);
    CHECK(f->lhs->atom == "green");

    const FormulaPtr g = parse_formula("G[0,inf] p");
    CHECK(g->op == Op::Always);
    CHECK_FALSE(g->interval.bounded());

    CHECK(error_code([] { parse_formula("F[5,2] p"); }) == ErrorCode::EmptyInterval);
    CHECK(error_code([] { parse_formula("F[2,5 p"); }) == ErrorCode::SyntaxError);
    CHECK(error_code([] { parse_formula("p &"); }) == ErrorCode::SyntaxError);

    const FormulaPtr h = parse_formula("a U[0,1] b & !c | X[0.5,1] d");
    CHECK(equal(*parse_formula(to_string(*h)), *h));
    CHECK(atoms(*h) == PropSet{"a", "b", "c", "d"});
    CHECK(depth(*parse_formula("F[0,1] G[0,2] p")) == 2);
    CHECK(is_boolean(*parse_formula("p -> (q | !r)")));
    CHECK_FALSE(is_boolean(*h));
}

TEST_CASE("round trip of random formulas", "[mitl]")
{
    std::mt19937_64 rng(17);
    for (int k = 0; k < 300; ++k) {
        const FormulaPtr f = oracle::random_formula(rng, {"p", "q", "r"}, 4);
        REQUIRE(equal(*parse_formula(to_string(*f)), *f));
    }
}

TEST_CASE("runs of the three-state example", "[mitl]")
{
    // r1 alternates s0 (green) and s1; r2 visits s0 only at the start of each lap.
    const TimedWord r1 = lasso_word({{{"green"}, Rational(0)}, {{}, Rational(1)}}, 0, Rational(3));
    const TimedWord r2 =
        lasso_word({{{"green"}, Rational(0)}, {{}, Rational(1)}, {{}, Rational(5, 2)}, {{}, Rational(3)}}, 0, Rational(5));
    CHECK(sat(r1, 0, *parse_formula("F[2,5] green")));
    CHECK_FALSE(sat(r2, 0, *parse_formula("G[0,5] green")));
    CHECK(sat(r1, 0, *atom("green")));
    CHECK_FALSE(sat(r1, 1, *atom("green")));
    CHECK(sat(r1, 0, *parse_formula("X[1,2] !green")));
    CHECK(sat(r2, 0, *parse_formula("(!green) U[5,6] green")) == false);
    CHECK(sat(r2, 1, *parse_formula("(!green) U[3,4] green")));
    const auto pos = sat_positions(r1, *atom("green"));
    REQUIRE(pos.size() == r1.size());
    CHECK(pos[0]);
    CHECK_FALSE(pos[1]);
}

TEST_CASE("until is non-strict", "[mitl]")
{
    const TimedWord w = lasso_word({{{"q"}, Rational(0)}, {{}, Rational(1)}}, 1, Rational(1));
    CHECK(sat(w, 0, *parse_formula("p U[0,1] q")));
    CHECK_FALSE(sat(w, 0, *parse_formula("p U[1,2] q")));
}

TEST_CASE("service word compliance", "[mitl]")
{
    const TimedWord offered = lasso_word({{{"pickUp1"}, Rational(0)},
                                          {{"throw1"}, Rational(1)},
                                          {{"deliver1"}, Rational(2)},
                                          {{}, Rational(3)}},
                                         3, Rational(1));
    ServiceWordSpec spec;
    spec.choices = {{0, {"pickUp1"}, Rational(1, 2)}, {2, {"deliver1"}, Rational(5, 2)}};
    CHECK(service_compliance(offered, spec));
    CHECK(service_compliance(offered, ServiceWordSpec{}));

    ServiceWordSpec late = spec;
    late.choices[0].time = Rational(1);
    CHECK_FALSE(service_compliance(offered, late));

    ServiceWordSpec wrong = spec;
    wrong.choices[1].services = {"throw1"};
    CHECK_FALSE(service_compliance(offered, wrong));

    ServiceWordSpec unordered = spec;
    std::swap(unordered.choices[0], unordered.choices[1]);
    CHECK_FALSE(service_compliance(offered, unordered));
}

TEST_CASE("temporal dualities", "[mitl]")
{
    std::mt19937_64 rng(23);
    const std::vector<std::string> ap{"p", "q"};
    for (int k = 0; k < 500; ++k) {
        const TimedWord w = oracle::random_word(rng, ap, 6);
        const FormulaPtr b = oracle::random_formula(rng, ap, 1);
        const Rational lo(static_cast<std::int64_t>(rng() % 4), 2);
        const Interval i = make_interval(lo, lo + Rational(static_cast<std::int64_t>(1 + rng() % 4), 2));
        for (std::size_t pos = 0; pos < w.size(); ++pos) {
            REQUIRE(sat(w, pos, *eventually(i, b)) == !sat(w, pos, *always(i, negation(b))));
            REQUIRE(sat(w, pos, *eventually(i, b)) == sat(w, pos, *until(i, parse_formula("p | !p"), b)));
            REQUIRE(sat(w, pos, *disjunction(b, negation(b))));
        }
    }
}

TEST_CASE("agreement with the unrolling evaluator", "[mitl]")
{
    std::mt19937_64 rng(29);
    const std::vector<std::string> ap{"p", "q", "r"};
    for (int k = 0; k < 1000; ++k) {
        const TimedWord w = oracle::random_word(rng, ap, 6);
        const FormulaPtr f = oracle::random_formula(rng, ap, 3);
        for (std::size_t pos = 0; pos < w.size(); ++pos) {
            INFO(to_string(*f) << " at " << pos);
            REQUIRE(sat(w, pos, *f) == oracle::mitl_brute(w, pos, *f));
        }
    }
}
