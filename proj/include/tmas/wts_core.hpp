#pragma once

#include "tmas/abstraction.hpp"
#include "tmas/timed.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace tmas {

using StateId = std::uint32_t;
using JointState = std::vector<CellId>;
using CellRun = TimedRun<CellId>;
using JointRun = TimedRun<JointState>;

/// Labeled transition system explored on demand. State ids are dense and
/// assigned in discovery order; successor lists are in canonical order.
class DiscreteSystem {
public:
    virtual ~DiscreteSystem() = default;
    virtual std::vector<StateId> initial_states() = 0;
    virtual std::vector<StateId> successors(StateId s) = 0;
    virtual PropSet label(StateId s) = 0;
    virtual PropSet alphabet() = 0;
    virtual Rational weight(StateId from, StateId to) = 0;
    virtual std::string state_name(StateId s) = 0;
};

/// Finite system with an explicit edge list and per-edge weights.
class ExplicitSystem : public DiscreteSystem {
public:
    ExplicitSystem(std::vector<std::string> names, std::vector<PropSet> labels, std::vector<StateId> initial);

    void add_edge(StateId from, StateId to, const Rational& weight);
    std::size_t size() const { return names_.size(); }

    std::vector<StateId> initial_states() override { return initial_; }
    std::vector<StateId> successors(StateId s) override;
    PropSet label(StateId s) override;
    PropSet alphabet() override;
    Rational weight(StateId from, StateId to) override;
    std::string state_name(StateId s) override;

private:
    std::vector<std::string> names_;
    std::vector<PropSet> labels_;
    std::vector<StateId> initial_;
    std::vector<std::vector<std::pair<StateId, Rational>>> edges_;
};

/// Agent-level view of one AgentWTS: s -> s' whenever some action whose
/// neighbor cells lie in the reachable frontier enables it. State ids equal cell ids.
class AgentSystem : public DiscreteSystem {
public:
    AgentSystem(const AgentWTS& wts, const std::vector<std::vector<CellId>>& frontier);

    std::vector<StateId> initial_states() override;
    std::vector<StateId> successors(StateId s) override;
    PropSet label(StateId s) override;
    PropSet alphabet() override { return wts_.alphabet(); }
    Rational weight(StateId, StateId) override { return wts_.weight(); }
    std::string state_name(StateId s) override { return std::to_string(s); }

private:
    AgentWTS wts_;
    std::vector<std::vector<CellId>> frontier_;
    std::unordered_map<StateId, std::vector<StateId>> memo_;
};

struct JointStateHash {
    std::size_t operator()(const JointState& s) const noexcept;
};

/// Synchronous product of agent WTSs, expanded lazily from the initial tuples.
class ProductWTS : public DiscreteSystem {
public:
    ProductWTS(std::vector<AgentWTS> wts, std::size_t max_states = 5'000'000);

    std::size_t n_agents() const { return wts_.size(); }
    const AgentWTS& agent(std::size_t i) const { return wts_[i]; }
    const Rational& dt() const { return wts_.front().weight(); }
    std::size_t size() const { return states_.size(); }

    StateId intern(const JointState& s);
    const JointState& joint(StateId id) const { return states_.at(id); }
    std::optional<StateId> find(const JointState& s) const;
    /// Action pr_i(l) of agent i at joint state l.
    Action action_of(const JointState& l, std::size_t i) const;
    bool is_transition(const JointState& from, const JointState& to) const;

    std::vector<StateId> initial_states() override;
    std::vector<StateId> successors(StateId s) override;
    PropSet label(StateId s) override;
    PropSet alphabet() override;
    Rational weight(StateId, StateId) override { return dt(); }
    std::string state_name(StateId s) override;

    struct Counts {
        std::vector<std::size_t> exact;   // states at exactly k steps
        std::vector<std::size_t> within;  // states within k steps
        std::vector<double> seconds;      // cumulative wall time after step k
    };
    /// Breadth-first reachability counts for k = 0..steps.
    Counts reachable_counts(std::size_t steps);

private:
    std::vector<AgentWTS> wts_;
    std::size_t max_states_;
    std::vector<JointState> states_;
    std::unordered_map<JointState, StateId, JointStateHash> index_;
    std::unordered_map<StateId, std::vector<StateId>> memo_;
};

ProductWTS product(std::vector<AgentWTS> wts, std::size_t max_states = 5'000'000);

/// Unrolls runs to a common stem (the longest) and a common cycle (the LCM
/// of cycle lengths). Throws ResourceBudgetExceeded past max_length steps.
std::vector<CellRun> align_runs(const std::vector<CellRun>& runs, std::size_t max_length = 1'000'000);

/// True iff the zipped runs form a run of the product, including the step
/// that closes the cycle. Throws LengthMismatch on misaligned inputs.
bool check_consistent(const std::vector<CellRun>& runs, const std::vector<AgentWTS>& wts);

JointRun zip_runs(const std::vector<CellRun>& runs);
CellRun project(const JointRun& run, std::size_t agent);

TimedWord timed_word(const CellRun& run, const AgentWTS& wts);
TimedWord timed_word(const JointRun& run, const ProductWTS& p);

/// One step per line: `j; t; state-or-labels`, t as num/den, after a header
/// `lasso <loop_start> <period>`.
void write_word(std::ostream& out, const TimedWord& w);
TimedWord read_word(std::istream& in);
void write_run(std::ostream& out, const CellRun& r);
CellRun read_cell_run(std::istream& in);
void write_run(std::ostream& out, const JointRun& r);
JointRun read_joint_run(std::istream& in);

/// Control law for one product transition, in step-local time [0, dt).
using TransitionLaw = std::function<InputLaw(const JointState& from, const JointState& to)>;

struct SimulationMiss {
    std::size_t step = 0;
    std::size_t sample = 0;
    std::size_t agent = 0;
    CellId target = 0;
    Point endpoint;
};

struct SimulationReport {
    std::size_t transitions_checked = 0;
    std::size_t samples_per_transition = 0;
    std::size_t misses = 0;
    double max_input_norm = 0.0;
    std::vector<SimulationMiss> details;  // first few misses

    bool passed() const { return misses == 0; }
};

/// Integrates the law for each listed transition from uniformly sampled
/// start points inside the source cells and checks that every agent ends in
/// its target cell (inflated by kGeoEps).
SimulationReport simulation_check(const Discretization& disc, const CommGraph& g,
                                  const std::vector<std::pair<JointState, JointState>>& transitions,
                                  const TransitionLaw& law, std::size_t samples, std::uint64_t seed,
                                  const Rational& dt_sim);

}  // namespace tmas
