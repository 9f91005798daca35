#pragma once

#include "tmas/common.hpp"
#include "tmas/rational.hpp"
#include "tmas/timed.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmas {

/// Closed interval [lo, hi]; hi empty means unbounded.
struct Interval {
    Rational lo{0};
    std::optional<Rational> hi;

    bool bounded() const { return hi.has_value(); }
    bool contains(const Rational& d) const { return d >= lo && (!hi || d <= *hi); }
    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

/// Throws EmptyInterval unless 0 <= lo < hi.
Interval make_interval(const Rational& lo, std::optional<Rational> hi);

enum class Op { Atom, Not, And, Next, Eventually, Always, Until };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Op op = Op::Atom;
    std::string atom;
    Interval interval;
    FormulaPtr lhs;  // operand of unary operators
    FormulaPtr rhs;
};

FormulaPtr atom(std::string p);
FormulaPtr negation(FormulaPtr f);
FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
FormulaPtr implication(FormulaPtr a, FormulaPtr b);
FormulaPtr next(Interval i, FormulaPtr f);
FormulaPtr eventually(Interval i, FormulaPtr f);
FormulaPtr always(Interval i, FormulaPtr f);
FormulaPtr until(Interval i, FormulaPtr a, FormulaPtr b);

/// Grammar: p | !f | f & f | f | f | f -> f | X[a,b] f | F[a,b] f | G[a,b] f | f U[a,b] f.
/// Unary operators bind tightest, then U (right associative), &, |, ->.
FormulaPtr parse_formula(std::string_view text);

/// Fully parenthesized form accepted by parse_formula.
std::string to_string(const Formula& f);
bool equal(const Formula& a, const Formula& b);

PropSet atoms(const Formula& f);
/// Nesting depth; atoms have depth 0.
std::size_t depth(const Formula& f);
/// True if f mentions no temporal operator.
bool is_boolean(const Formula& f);

/// Point-wise satisfaction at position i of a lasso word.
bool sat(const TimedWord& w, std::size_t i, const Formula& f);
/// Truth value at every position of the lasso's stem and first cycle.
std::vector<bool> sat_positions(const TimedWord& w, const Formula& f);

/// Truth of a temporal-free formula on a single letter.
bool holds(const Formula& f, const PropSet& letter);

struct ServiceChoice {
    std::size_t index = 0;  // z_j, a position of the trajectory word
    PropSet services;       // beta(z_j)
    Rational time{0};       // chosen provision time
};

struct ServiceWordSpec {
    std::vector<ServiceChoice> choices;
};

/// True iff indices start at 0 and strictly increase, every chosen set lies
/// in the offered labels and every chosen time lies in [tau(z_j), tau(z_j + 1)).
bool service_compliance(const TimedWord& traj_word, const ServiceWordSpec& spec);

}  // namespace tmas
