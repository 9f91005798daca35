#pragma once

#include "tmas/tba.hpp"
#include "tmas/wts_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tmas {

struct BuchiState {
    StateId sys = 0;
    std::size_t loc = 0;
    Valuation nu;
};

/// Product of a discrete system and a TBA, explored on demand. A transition
/// s -> s' with weight d pairs with an edge whose guard holds after the
/// delay; clocks then reset or advance, and values above c_max become inf.
class BuchiWTS {
public:
    /// Throws AlphabetMismatch unless the automaton's propositions are part
    /// of the system alphabet.
    BuchiWTS(DiscreteSystem& sys, Tba automaton, std::size_t max_states = 5'000'000);

    const std::vector<std::size_t>& initial_states();
    const std::vector<std::size_t>& successors(std::size_t id);
    bool accepting(std::size_t id) const { return a_.location(states_.at(id).loc).accepting; }
    const BuchiState& state(std::size_t id) const { return states_.at(id); }
    Rational weight(std::size_t from, std::size_t to);
    std::size_t size() const { return states_.size(); }
    const Tba& automaton() const { return a_; }
    DiscreteSystem& system() { return sys_; }
    std::string state_name(std::size_t id);

private:
    std::size_t intern(BuchiState s);
    std::uint64_t sys_mask(StateId s);

    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& k) const noexcept;
    };
    std::vector<std::int64_t> key(const BuchiState& s) const;

    DiscreteSystem& sys_;
    Tba a_;
    Rational c_max_;
    std::size_t max_states_;
    std::vector<BuchiState> states_;
    std::unordered_map<std::vector<std::int64_t>, std::size_t, KeyHash> index_;
    std::unordered_map<std::size_t, std::vector<std::size_t>> succ_;
    std::unordered_map<StateId, std::uint64_t> masks_;
    std::optional<std::vector<std::size_t>> initial_;
};

using BuchiLasso = TimedRun<std::size_t>;

/// Nested depth-first search with lexicographic successor order. Each call
/// of next() resumes the outer search and returns the next accepting lasso;
/// the stem is the outer search path, the cycle closes on an accepting seed.
class LassoEnumerator {
public:
    explicit LassoEnumerator(BuchiWTS& b);
    std::optional<BuchiLasso> next();

private:
    struct Frame {
        std::size_t state;
        std::size_t child;
    };
    BuchiLasso make_lasso(std::size_t seed);
    std::vector<std::size_t> shortest_path(const std::vector<std::size_t>& sources, std::size_t target);
    std::optional<std::vector<std::size_t>> inner_search(std::size_t seed);
    void mark(std::vector<char>& v, std::size_t id);

    BuchiWTS& b_;
    std::vector<std::size_t> roots_;
    std::size_t next_root_ = 0;
    std::vector<Frame> outer_;
    std::vector<char> visited_;
    std::vector<char> flagged_;
    bool started_ = false;
};

std::optional<BuchiLasso> find_accepting(BuchiWTS& b);

/// System run and automaton location run of a product lasso.
struct Projection {
    TimedRun<StateId> system_run;
    TimedRun<std::size_t> tba_run;
};
Projection project_run(const BuchiWTS& b, const BuchiLasso& run);

/// Timed word of the system run, with system labels.
TimedWord projected_word(BuchiWTS& b, const BuchiLasso& run);

/// `stem:` and `cycle:` sections, one `(state, loc, clocks...) @ t` per line.
std::string dump_lasso(BuchiWTS& b, const BuchiLasso& run);

}  // namespace tmas
