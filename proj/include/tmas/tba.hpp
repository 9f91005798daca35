#pragma once

#include "tmas/common.hpp"
#include "tmas/mitl.hpp"
#include "tmas/rational.hpp"
#include "tmas/timed.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace tmas {

/// Nonnegative rational or the infinity sentinel.
struct ClockValue {
    Rational value{0};
    bool inf = false;

    static ClockValue infinity() { return {Rational(0), true}; }
    ClockValue plus(const Rational& d) const { return inf ? *this : ClockValue{value + d, false}; }
    /// Values above c_max become infinity.
    ClockValue capped(const Rational& c_max) const { return inf || value > c_max ? infinity() : *this; }

    bool operator==(const ClockValue& o) const { return inf == o.inf && (inf || value == o.value); }
    bool operator<(const ClockValue& o) const
    {
        if (inf != o.inf) return o.inf;
        return !inf && value < o.value;
    }
};

using Valuation = std::vector<ClockValue>;

std::string to_string(const ClockValue& v);

enum class CmpOp { Lt, Le, Eq, Ge, Gt };

/// Boolean combination of clock comparisons. Or is kept as a node for
/// readable dumps; it is equivalent to the negated conjunction of negations.
struct ClockConstraint {
    enum class Kind { True, Cmp, Not, And, Or };

    Kind kind = Kind::True;
    std::size_t clock = 0;
    CmpOp cmp = CmpOp::Le;
    Rational constant{0};
    std::vector<ClockConstraint> children;

    static ClockConstraint top() { return {}; }
    static ClockConstraint compare(std::size_t clock, CmpOp op, const Rational& c);
    static ClockConstraint negate(ClockConstraint a);
    static ClockConstraint all(std::vector<ClockConstraint> parts);
    static ClockConstraint any(std::vector<ClockConstraint> parts);

    bool is_true() const { return kind == Kind::True; }
};

/// Throws UndeclaredClock for clocks outside the valuation.
bool eval_guard(const Valuation& nu, const ClockConstraint& g);

struct TbaLocation {
    std::string name;
    std::uint64_t label = 0;  // bitmask over the automaton's propositions
    bool accepting = false;
    ClockConstraint invariant;
};

struct TbaEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    ClockConstraint guard;
    std::vector<std::size_t> resets;
};

class Tba {
public:
    Tba() = default;
    /// At most 64 propositions.
    Tba(std::vector<std::string> clocks, PropSet ap);

    std::size_t add_location(std::string name, const PropSet& label, bool accepting,
                             ClockConstraint invariant = ClockConstraint::top());
    void add_initial(std::size_t q);
    /// Throws UndeclaredClock or UnknownState on bad references.
    void add_edge(std::size_t from, ClockConstraint guard, std::vector<std::size_t> resets, std::size_t to);

    const std::vector<std::string>& clocks() const { return clocks_; }
    const PropSet& ap() const { return ap_; }
    const std::vector<std::string>& ap_list() const { return ap_list_; }
    const std::vector<TbaLocation>& locations() const { return locations_; }
    const TbaLocation& location(std::size_t q) const { return locations_.at(q); }
    const std::vector<std::size_t>& initial() const { return initial_; }
    const std::vector<TbaEdge>& edges() const { return edges_; }
    const std::vector<std::size_t>& out_edges(std::size_t q) const { return out_.at(q); }
    std::size_t size() const { return locations_.size(); }

    /// Largest constant in any guard or invariant (0 if none).
    Rational c_max() const;
    /// Bitmask of p restricted to the automaton's propositions.
    std::uint64_t mask(const PropSet& p) const;
    /// Like mask() but throws AlphabetMismatch for propositions outside AP.
    std::uint64_t strict_mask(const PropSet& p) const;
    PropSet label_set(std::size_t q) const;

private:
    void check_clocks(const ClockConstraint& g) const;

    std::vector<std::string> clocks_;
    PropSet ap_;
    std::vector<std::string> ap_list_;
    std::vector<TbaLocation> locations_;
    std::vector<std::size_t> initial_;
    std::vector<TbaEdge> edges_;
    std::vector<std::vector<std::size_t>> out_;
};

struct TbaState {
    std::size_t location = 0;
    Valuation nu;

    bool operator==(const TbaState& o) const { return location == o.location && nu == o.nu; }
};

TbaState initial_state(const Tba& a, std::size_t q0);

/// Delay by delta, then fire edge: the guard and the source invariant are
/// checked on nu + delta, the target invariant on the post-reset valuation.
/// Throws GuardFailed or InvariantViolated.
TbaState step(const Tba& a, const TbaState& s, const Rational& delta, std::size_t edge);

/// Whether some run over w with exactly matching labels meets an accepting
/// location infinitely often. Throws AlphabetMismatch if w uses propositions
/// outside the automaton's AP.
bool accepts(const Tba& a, const TimedWord& w);

/// Drops propositions outside ap from every letter.
TimedWord restrict_word(const TimedWord& w, const PropSet& ap);

bool in_fragment(const Formula& f);

/// One clock per temporal operator; conjunctions are intersected. Throws
/// UnsupportedFragment outside the compiled fragment.
Tba mitl_to_tba(const Formula& f);

/// Language intersection with a two-phase acceptance counter. Clocks of b
/// are renamed when they collide with clocks of a.
Tba intersect(const Tba& a, const Tba& b);

struct ScaledTba {
    Tba automaton;
    std::int64_t scale = 1;
};

/// Multiplies every constant by the LCM of their denominators.
ScaledTba scale_to_integers(const Tba& a);
TimedWord scale_word(const TimedWord& w, std::int64_t scale);

/// Literal three-location automaton for eventually-within-[c1,c2] green.
Tba fig2_tba(const Rational& c1, const Rational& c2);
/// Accepts every word over ap.
Tba universal_tba(const PropSet& ap);
/// Accepts nothing.
Tba empty_tba(const PropSet& ap);

std::string to_string(const ClockConstraint& g, const std::vector<std::string>& clocks);
/// Locations, then edges as `q --guard/resets--> q'`, accepting marked with '*'.
std::string dump(const Tba& a);

}  // namespace tmas
