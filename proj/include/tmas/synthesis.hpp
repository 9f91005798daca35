#pragma once

#include "tmas/abstraction.hpp"
#include "tmas/buchi_product.hpp"
#include "tmas/mitl.hpp"
#include "tmas/tba.hpp"
#include "tmas/wts_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmas {

struct LabelAssignment {
    std::size_t agent = 0;
    std::string service;
    std::vector<std::size_t> cells;  // cells of the label decomposition; empty declares the service only
};

struct Scenario {
    std::size_t n_agents = 0;
    std::vector<Edge> edges;  // 0-based
    double v_max = 1.0;
    double margin = 1.05;
    std::size_t dim = 2;
    Positions initial;
    std::optional<Rational> dt_sim;  // defaults to dt / 20

    Box bounds;
    std::optional<double> label_grid;  // label cells as a uniform grid
    std::vector<Box> label_cells;      // explicit label cells, used when label_grid is unset
    std::vector<LabelAssignment> labels;

    double cell_size = 1.0;
    double lambda = 0.5;
    Rational dt{1};
    bool conservative = false;

    std::vector<std::string> formulas;  // per agent; empty string means unconstrained

    std::size_t r_selec = 100;
    std::size_t max_states = 5'000'000;
    std::size_t samples = 25;
    std::uint64_t seed = 1;
};

/// Everything derived from a scenario before any search.
struct Model {
    Scenario scenario;
    CommGraph graph;
    std::optional<SpectralData> spectrum;  // unset for a single agent
    std::optional<BoundParams> bounds;
    ConditionConstants constants;
    CellDecomposition label_dec;
    ServiceLabeling labeling;  // over disc.dec
    RealInterval diameter_range;
    RealInterval step_range;
    Discretization disc;
    std::vector<AgentWTS> wts;
    std::vector<FormulaPtr> formulas;  // null for unconstrained agents

    Rational dt_sim() const;
};

/// Runs every scenario check and builds the abstraction. Throws the error of
/// the first violated condition.
Model build_model(const Scenario& sc);

struct StepControl {
    CellId source = 0;
    CellId target = 0;
    Point target_point;
};

struct Plan {
    std::vector<CellRun> runs;  // aligned and consistent
    std::vector<TimedWord> words;
    std::vector<bool> certificate;  // sat() per agent
    bool consistent = false;
    std::string method;  // "decentralized" or "centralized"
    std::vector<std::vector<StepControl>> controls;  // [step][agent], including the step that closes the cycle

    JointState joint(std::size_t step) const;
    std::size_t length() const { return runs.empty() ? 0 : runs.front().size(); }
    bool certified() const;
};

struct PhaseTime {
    std::string phase;
    double seconds = 0.0;
};

struct SynthesisStats {
    std::vector<std::size_t> frontier_sizes;
    std::vector<std::size_t> buchi_sizes;
    std::vector<std::size_t> lassos_found;
    std::size_t combos_tried = 0;
    std::size_t product_states = 0;
    std::size_t centralized_states = 0;
    std::vector<PhaseTime> phases;
};

struct SynthesisOptions {
    std::size_t threads = 1;
};

/// Per-agent automata and products, canonical enumeration of lasso combinations,
/// then the centralized product. Throws Infeasible when no plan exists and
/// ResourceBudgetExceeded when a state cap is hit.
Plan synthesize(Model& m, SynthesisStats* stats = nullptr, const SynthesisOptions& opt = {});

/// Builds the control descriptors of a plan from its runs.
void attach_controls(const Model& m, Plan& p);

/// Transitions of a plan: every stem and cycle step plus the wrap-around step.
std::vector<std::pair<JointState, JointState>> plan_transitions(const Plan& p);

/// Direction-preserving saturation to norm at most limit.
Point saturate(const Point& v, double limit);

/// Coupling cancellation plus proportional steering toward the target cell
/// center, saturated at authority * v_max.
TransitionLaw nominal_law(const Model& m, double authority = 1.0);

SimulationReport certify(const Model& m, const Plan& p, std::size_t samples, std::uint64_t seed, double authority = 1.0);

struct PlanSimulation {
    Trajectory trajectory;
    std::vector<std::size_t> membership_failures;  // step indices
    double max_input_norm = 0.0;
};

/// Integrates the plan from the scenario's initial positions for `steps`
/// transitions and checks cell membership at every multiple of dt.
PlanSimulation simulate_plan(const Model& m, const Plan& p, std::size_t steps);

struct StatsRow {
    std::size_t step = 0;
    std::size_t exact = 0;
    std::size_t within = 0;
    double seconds = 0.0;
};

/// Reachable product states per step.
std::vector<StatsRow> product_stats(const Model& m, std::size_t steps);

}  // namespace tmas
