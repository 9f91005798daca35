#include "tmas/cli.hpp"

#include "tmas/scenario.hpp"
#include "tmas/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

namespace tmas {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;
constexpr int kExitCheckFailed = 4;

std::size_t env_threads()
{
    const char* v = std::getenv("TMAS_THREADS");
    if (v == nullptr || *v == '\0') return 1;
    try {
        const long n = std::stol(v);
        return n > 0 ? static_cast<std::size_t>(n) : 1;
    } catch (const std::exception&) {
        return 1;
    }
}

std::string fmt(double v, int precision = 6)
{
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

/// Right-aligned columns separated by two spaces.
std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < width.size(); ++c) {
            if (c) os << "  ";
            os << std::setw(static_cast<int>(width[c])) << (c < r.size() ? r[c] : "");
        }
        os << '\n';
    };
    line(header);
    std::size_t total = 0;
    for (std::size_t w : width) total += w;
    os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (const auto& r : rows) line(r);
    return os.str();
}

/// Output directory plus the list of files written into it.
class RunDir {
public:
    explicit RunDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name)
    {
        std::ofstream f(dir_ / name);
        if (!f) fail(ErrorCode::IoError, "cannot write " + (dir_ / name).string());
        files_.push_back(name);
        return f;
    }

    void manifest(const std::string& command, const std::string& scenario_path, const std::optional<Scenario>& sc,
                  int exit_code, const std::string& status, json extra = json::object())
    {
        json m;
        m["format"] = "tmas-run/1";
        m["command"] = command;
        m["scenario"] = scenario_path;
        if (sc) {
            m["scenario_fingerprint"] = fingerprint(*sc);
            m["seed"] = sc->seed;
        }
        m["threads"] = env_threads();
        m["exit_code"] = exit_code;
        m["status"] = status;
        m["files"] = files_;
        for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
        std::ofstream f(dir_ / "manifest.json");
        if (!f) fail(ErrorCode::IoError, "cannot write manifest");
        f << m.dump(2) << '\n';
    }

    fs::path path() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

int exit_code_for(ErrorCode c)
{
    switch (c) {
    case ErrorCode::Infeasible: return kExitInfeasible;
    case ErrorCode::ResourceBudgetExceeded: return kExitBudget;
    case ErrorCode::MembershipViolation: return kExitCheckFailed;
    default: return kExitError;
    }
}

void print_constants(std::ostream& out, const Model& m)
{
    const Scenario& sc = m.scenario;
    out << "scenario ok\n";
    out << "agents        " << sc.n_agents << '\n';
    out << "edges         " << m.graph.edges().size() << '\n';
    if (m.spectrum) {
        out << "lambda2       " << fmt(m.spectrum->lambda2) << '\n';
        out << "lambda_max    " << fmt(m.spectrum->lambda_max) << '\n';
    }
    if (m.bounds) {
        out << "K1            " << fmt(m.bounds->k1) << '\n';
        out << "K2            " << fmt(m.bounds->k2) << '\n';
        out << "R_bar         " << fmt(m.bounds->r_bar) << '\n';
    }
    out << "M             " << fmt(m.constants.m_bound) << '\n';
    out << "L1            " << fmt(m.constants.l1) << '\n';
    out << "L2            " << fmt(m.constants.l2) << '\n';
    out << "L             " << fmt(m.constants.l_combined) << '\n';
    out << "d_max range   (0, " << fmt(m.diameter_range.hi) << "]\n";
    out << "dt range      [" << fmt(m.step_range.lo) << ", " << fmt(m.step_range.hi) << "]\n";
    out << "dt            " << to_fraction_string(m.disc.dt) << " (" << fmt(to_double(m.disc.dt)) << ")\n";
    out << "cells         " << m.disc.dec.size() << '\n';
    out << "diameter      " << fmt(m.disc.dec.diameter()) << '\n';
    out << "ball radius   " << fmt(m.disc.ball_radius()) << '\n';
    for (std::size_t i = 0; i < sc.n_agents; ++i) {
        out << "agent " << (i + 1) << "       services " << format_props(m.labeling.alphabet(i));
        out << ", formula " << (m.formulas[i] ? to_string(*m.formulas[i]) : std::string("(none)")) << '\n';
    }
}

Scenario load_with_overrides(const std::string& path, std::optional<std::size_t> max_states,
                             std::optional<std::size_t> r_selec, std::optional<std::uint64_t> seed)
{
    Scenario sc = load_scenario(path);
    if (max_states) sc.max_states = *max_states;
    if (r_selec) sc.r_selec = *r_selec;
    if (seed) sc.seed = *seed;
    return sc;
}

void write_box(std::ostream& f, const Box& b)
{
    for (std::size_t k = 0; k < b.dim(); ++k) {
        f << ',' << b.lo(static_cast<Eigen::Index>(k)) << ',' << b.hi(static_cast<Eigen::Index>(k));
    }
}

void box_header(std::ostream& f, std::size_t dim)
{
    for (std::size_t k = 0; k < dim; ++k) f << ",lo" << (k + 1) << ",hi" << (k + 1);
}

int cmd_validate(const std::string& path, std::ostream& out)
{
    const Model m = build_model(load_scenario(path));
    print_constants(out, m);
    return kExitOk;
}

int cmd_synthesize(const std::string& path, const std::string& dir, std::optional<std::size_t> max_states,
                   std::optional<std::size_t> r_selec, std::optional<std::uint64_t> seed, std::ostream& out)
{
    const Scenario sc = load_with_overrides(path, max_states, r_selec, seed);
    Model m = build_model(sc);
    RunDir run(dir);

    SynthesisStats stats;
    SynthesisOptions opt;
    opt.threads = env_threads();

    auto write_stats = [&] {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < stats.buchi_sizes.size(); ++i) {
            rows.push_back({std::to_string(i + 1),
                            i < stats.frontier_sizes.size() ? std::to_string(stats.frontier_sizes[i]) : "-",
                            std::to_string(stats.buchi_sizes[i]),
                            i < stats.lassos_found.size() ? std::to_string(stats.lassos_found[i]) : "-"});
        }
        std::vector<std::vector<std::string>> phases;
        for (const PhaseTime& ph : stats.phases) phases.push_back({ph.phase, fmt(ph.seconds, 4)});
        {
            auto f = run.open("stats.txt");
            f << aligned_table({"agent", "frontier cells", "buchi states", "lassos"}, rows) << '\n';
            f << "combinations tried  " << stats.combos_tried << '\n';
            f << "product states      " << stats.product_states << '\n';
            f << "centralized states  " << stats.centralized_states << "\n\n";
            f << aligned_table({"phase", "seconds"}, phases);
        }
        auto f = run.open("stats.csv");
        f << "kind,name,value\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            f << "frontier_cells,agent" << (i + 1) << ',' << rows[i][1] << '\n';
            f << "buchi_states,agent" << (i + 1) << ',' << rows[i][2] << '\n';
            f << "lassos,agent" << (i + 1) << ',' << rows[i][3] << '\n';
        }
        f << "combinations,total," << stats.combos_tried << '\n';
        f << "product_states,total," << stats.product_states << '\n';
        f << "centralized_states,total," << stats.centralized_states << '\n';
        for (const PhaseTime& ph : stats.phases) f << "seconds," << ph.phase << ',' << ph.seconds << '\n';
    };

    Plan plan;
    try {
        plan = synthesize(m, &stats, opt);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::ResourceBudgetExceeded) throw;
        write_stats();
        const int code = exit_code_for(e.code());
        run.manifest("synthesize", path, sc, code, e.what());
        out << e.what() << '\n';
        return code;
    }

    {
        auto f = run.open("plan.json");
        write_plan_json(f, m, plan);
    }

    const SimulationReport rep = certify(m, plan, sc.samples, sc.seed);
    json cert;
    cert["method"] = plan.method;
    cert["consistent"] = plan.consistent;
    cert["sat"] = json::array();
    for (bool b : plan.certificate) cert["sat"].push_back(b);
    json sim;
    sim["transitions_checked"] = rep.transitions_checked;
    sim["samples_per_transition"] = rep.samples_per_transition;
    sim["misses"] = rep.misses;
    sim["max_input_norm"] = rep.max_input_norm;
    sim["v_max"] = sc.v_max;
    sim["passed"] = rep.passed();
    sim["misses_detail"] = json::array();
    for (const SimulationMiss& miss : rep.details) {
        std::vector<double> ep(miss.endpoint.data(), miss.endpoint.data() + miss.endpoint.size());
        sim["misses_detail"].push_back(
            {{"step", miss.step}, {"sample", miss.sample}, {"agent", miss.agent + 1}, {"target", miss.target}, {"endpoint", ep}});
    }
    cert["simulation"] = sim;
    const bool all_true = plan.certified() && rep.passed();
    cert["all_true"] = all_true;
    {
        auto f = run.open("certificate.json");
        f << cert.dump(2) << '\n';
    }
    write_stats();

    out << "plan found (" << plan.method << "), " << plan.length() << " steps, cycle from step "
        << plan.runs.front().loop_start << '\n';
    for (std::size_t i = 0; i < plan.runs.size(); ++i) {
        out << "agent " << (i + 1) << ": sat " << (plan.certificate[i] ? "true" : "false") << ", cells";
        for (const auto& s : plan.runs[i].steps) out << ' ' << s.value;
        out << '\n';
    }
    out << "consistent " << (plan.consistent ? "true" : "false") << ", simulation " << rep.misses << " misses over "
        << rep.transitions_checked << " transitions x " << rep.samples_per_transition << " samples\n";
    out << "outputs in " << run.path().string() << '\n';

    const int code = all_true ? kExitOk : kExitCheckFailed;
    run.manifest("synthesize", path, sc, code, all_true ? "plan certified" : "certificate check failed",
                 {{"method", plan.method}});
    return code;
}

int cmd_simulate(const std::string& path, const std::string& plan_path, const std::string& dir,
                 std::optional<std::size_t> steps_opt, std::ostream& out)
{
    const Scenario sc = load_scenario(path);
    const Model m = build_model(sc);
    std::ifstream pf(plan_path);
    if (!pf) fail(ErrorCode::IoError, "cannot read " + plan_path);
    const Plan plan = read_plan_json(pf, m);
    const std::size_t steps = steps_opt.value_or(plan.length() + plan.runs.front().cycle_length());

    const PlanSimulation sim = simulate_plan(m, plan, steps);
    RunDir run(dir);
    {
        auto f = run.open("trajectory.csv");
        write_trajectory_csv(f, m.graph, sim.trajectory);
    }
    const std::size_t dim = sc.dim;
    {
        auto f = run.open("cells.csv");
        f << "step,t,agent,cell,labels";
        box_header(f, dim);
        f << '\n';
        for (std::size_t j = 0; j <= steps; ++j) {
            const JointState js = plan.joint(j);
            const std::string t = to_decimal_string(m.disc.dt * Rational(static_cast<std::int64_t>(j)));
            for (std::size_t i = 0; i < js.size(); ++i) {
                f << j << ',' << t << ',' << (i + 1) << ',' << js[i] << ',' << format_props(m.labeling.labels(i, js[i]));
                write_box(f, m.disc.dec.cell(js[i]));
                f << '\n';
            }
        }
    }

    // Cells occupied by some reachable product state, layer by layer.
    bool truncated = false;
    {
        auto f = run.open("reachable.csv");
        f << "step,agent,cell";
        box_header(f, dim);
        f << '\n';
        ProductWTS prod(m.wts, sc.max_states);
        std::vector<StateId> layer;
        std::unordered_set<StateId> seen;
        try {
            layer = prod.initial_states();
            for (StateId s : layer) seen.insert(s);
            for (std::size_t k = 0; k <= steps && !layer.empty(); ++k) {
                std::vector<std::set<CellId>> occupied(sc.n_agents);
                for (StateId s : layer) {
                    const JointState& js = prod.joint(s);
                    for (std::size_t i = 0; i < js.size(); ++i) occupied[i].insert(js[i]);
                }
                for (std::size_t i = 0; i < sc.n_agents; ++i) {
                    for (CellId c : occupied[i]) {
                        f << k << ',' << (i + 1) << ',' << c;
                        write_box(f, m.disc.dec.cell(c));
                        f << '\n';
                    }
                }
                if (k == steps) break;
                std::vector<StateId> next;
                for (StateId s : layer) {
                    for (StateId t : prod.successors(s)) {
                        if (seen.insert(t).second) next.push_back(t);
                    }
                }
                layer = std::move(next);
            }
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ResourceBudgetExceeded) throw;
            truncated = true;
        }
    }

    // Relative-state norm against R_bar after the first entry.
    json lyap;
    if (m.bounds) {
        const double r_bar = m.bounds->r_bar;
        std::optional<std::size_t> entry;
        std::size_t exits = 0;
        double max_after = 0.0;
        for (std::size_t k = 0; k < sim.trajectory.samples.size(); ++k) {
            const double rn = relative_norm(m.graph, sim.trajectory.samples[k].positions);
            if (!entry && rn <= r_bar) entry = k;
            if (entry) {
                max_after = std::max(max_after, rn);
                if (rn > r_bar * (1.0 + 1e-9)) ++exits;
            }
        }
        lyap["r_bar"] = r_bar;
        lyap["entered"] = entry.has_value();
        if (entry) lyap["entry_time"] = to_double(sim.trajectory.samples[*entry].time);
        lyap["max_after_entry"] = max_after;
        lyap["samples_above_after_entry"] = exits;
        out << "relative norm: ";
        if (entry) {
            out << "inside R_bar = " << fmt(r_bar) << " from t = " << fmt(lyap["entry_time"].get<double>())
                << ", max afterwards " << fmt(max_after) << (exits ? ", LEFT the ball" : ", stays inside") << '\n';
        } else {
            out << "never inside R_bar = " << fmt(r_bar) << '\n';
        }
    }

    out << "simulated " << steps << " steps, max input norm " << fmt(sim.max_input_norm) << " (v_max " << fmt(sc.v_max)
        << ")\n";
    if (truncated) out << "reachable.csv truncated at the state budget\n";
    int code = kExitOk;
    std::string status = "all memberships hold";
    if (!sim.membership_failures.empty()) {
        code = kExitCheckFailed;
        status = "MembershipViolation at step " + std::to_string(sim.membership_failures.front());
    }
    out << status << '\n';
    json failures = sim.membership_failures;
    run.manifest("simulate", path, sc, code, status,
                 {{"plan", plan_path}, {"steps", steps}, {"membership_failures", failures}, {"relative_norm", lyap},
                  {"reachable_truncated", truncated}});
    return code;
}

int cmd_stats(const std::string& path, std::size_t steps, const std::string& dir, std::optional<std::size_t> max_states,
              std::ostream& out)
{
    const Scenario sc = load_with_overrides(path, max_states, std::nullopt, std::nullopt);
    const Model m = build_model(sc);
    RunDir run(dir);
    std::vector<StatsRow> rows;
    try {
        rows = product_stats(m, steps);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ResourceBudgetExceeded) throw;
        out << e.what() << '\n';
        run.manifest("stats", path, sc, kExitBudget, e.what());
        return kExitBudget;
    }
    std::vector<std::vector<std::string>> table;
    for (const StatsRow& r : rows) {
        table.push_back({std::to_string(r.step), std::to_string(r.exact), std::to_string(r.within), fmt(r.seconds, 4)});
    }
    const std::string text = aligned_table({"step", "reachable (exact)", "reachable (within)", "seconds"}, table);
    out << text;
    {
        auto f = run.open("stats.txt");
        f << text;
    }
    auto f = run.open("stats.csv");
    f << "step,exact,within,seconds\n";
    for (const StatsRow& r : rows) f << r.step << ',' << r.exact << ',' << r.within << ',' << r.seconds << '\n';
    f.close();
    run.manifest("stats", path, sc, kExitOk, "ok", {{"steps", steps}});
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Timed multi-agent plan synthesis"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string plan_path;
    std::string out_dir = "tmas_run";
    std::optional<std::size_t> max_states;
    std::optional<std::size_t> r_selec;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> sim_steps;
    std::size_t stats_steps = 5;

    auto* validate = app.add_subcommand("validate", "check a scenario and print derived constants");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    auto* synth = app.add_subcommand("synthesize", "synthesize and certify a plan");
    synth->add_option("scenario", scenario_path, "scenario file")->required();
    synth->add_option("--out", out_dir, "run directory");
    synth->add_option("--max-states", max_states, "state budget for product constructions");
    synth->add_option("--r-selec", r_selec, "lasso combinations tried before the centralized product");
    synth->add_option("--seed", seed, "seed for the simulation certificate");

    auto* simulate = app.add_subcommand("simulate", "integrate a plan and check cell membership");
    simulate->add_option("scenario", scenario_path, "scenario file")->required();
    simulate->add_option("plan", plan_path, "plan.json from synthesize")->required();
    simulate->add_option("--out", out_dir, "run directory");
    simulate->add_option("--steps", sim_steps, "number of transitions to integrate");

    auto* stats = app.add_subcommand("stats", "reachable product states per step");
    stats->add_option("scenario", scenario_path, "scenario file")->required();
    stats->add_option("--steps", stats_steps, "number of steps");
    stats->add_option("--out", out_dir, "run directory");
    stats->add_option("--max-states", max_states, "state budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*validate) return cmd_validate(scenario_path, out);
        if (*synth) return cmd_synthesize(scenario_path, out_dir, max_states, r_selec, seed, out);
        if (*simulate) return cmd_simulate(scenario_path, plan_path, out_dir, sim_steps, out);
        if (*stats) return cmd_stats(scenario_path, stats_steps, out_dir, max_states, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace tmas
