#include "tmas/synthesis.hpp"

#include "tmas/error.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <functional>
#include <thread>

namespace tmas {

Rational Model::dt_sim() const
{
    return scenario.dt_sim ? *scenario.dt_sim : disc.dt / Rational(20);
}

Model build_model(const Scenario& sc)
{
    if (sc.n_agents == 0) fail(ErrorCode::ScenarioError, "scenario has no agents");
    if (sc.initial.size() != sc.n_agents) fail(ErrorCode::ScenarioError, "expected one initial position per agent");
    if (sc.formulas.size() > sc.n_agents) fail(ErrorCode::ScenarioError, "more formulas than agents");
    if (sc.r_selec == 0) fail(ErrorCode::ScenarioError, "r_selec must be positive");
    for (const Point& p : sc.initial) {
        if (static_cast<std::size_t>(p.size()) != sc.dim) fail(ErrorCode::DimensionMismatch, "initial position has the wrong dimension");
    }
    if (sc.bounds.dim() != sc.dim) fail(ErrorCode::DimensionMismatch, "workspace bounds have the wrong dimension");

    Model m;
    m.scenario = sc;
    m.graph = build_graph(sc.n_agents, sc.edges);
    if (sc.n_agents >= 2) {
        m.spectrum = spectral(m.graph);
        m.bounds = theorem1_constants(m.graph, sc.v_max, sc.margin);
        m.constants = condition_constants(m.graph, *m.bounds);
    } else {
        m.constants = single_agent_constants(sc.v_max, sc.margin);
    }

    if (sc.label_grid) {
        m.label_dec = grid(sc.bounds, *sc.label_grid);
    } else if (!sc.label_cells.empty()) {
        m.label_dec = CellDecomposition(sc.bounds, sc.label_cells);
    } else {
        m.label_dec = CellDecomposition(sc.bounds, {sc.bounds});
    }
    ServiceLabeling spec_labels(sc.n_agents);
    for (const LabelAssignment& a : sc.labels) {
        if (a.agent >= sc.n_agents) fail(ErrorCode::ScenarioError, "label for unknown agent " + std::to_string(a.agent + 1));
        spec_labels.declare(a.agent, a.service);
        for (std::size_t c : a.cells) {
            if (c >= m.label_dec.size()) fail(ErrorCode::ScenarioError, "label cell " + std::to_string(c) + " does not exist");
            spec_labels.assign(a.agent, c, a.service);
        }
    }
    spec_labels.check_disjoint();

    CellDecomposition abs = grid(sc.bounds, sc.cell_size);
    CellDecomposition hat = intersect_decompositions(abs, m.label_dec);
    m.diameter_range = dmax_range(m.constants, sc.lambda, sc.v_max);
    m.step_range = dt_range(hat.diameter(), m.constants, sc.lambda, sc.v_max);
    m.disc = make_discretization(hat, sc.dt, sc.lambda, m.constants, sc.v_max, sc.conservative);
    m.labeling = spec_labels.transfer(m.label_dec, m.disc.dec);
    if (m.dt_sim() <= Rational(0) || m.dt_sim() > m.disc.dt) fail(ErrorCode::ScenarioError, "dt_sim must lie in (0, dt]");
    if ((m.disc.dt / m.dt_sim()).denominator() != 1) fail(ErrorCode::ScenarioError, "dt must be an integer multiple of dt_sim");

    for (std::size_t i = 0; i < sc.n_agents; ++i) m.wts.push_back(build_wts(m.disc, m.graph, m.labeling, i, sc.initial[i]));
    for (std::size_t i = 0; i < sc.n_agents; ++i) {
        const std::string text = i < sc.formulas.size() ? sc.formulas[i] : std::string();
        if (text.find_first_not_of(" \t") == std::string::npos) {
            m.formulas.push_back(nullptr);
            continue;
        }
        FormulaPtr f = parse_formula(text);
        for (const auto& p : atoms(*f)) {
            if (!m.labeling.alphabet(i).count(p)) {
                fail(ErrorCode::ScenarioError, "formula of agent " + std::to_string(i + 1) + " uses undeclared service '" + p + "'");
            }
        }
        m.formulas.push_back(f);
    }
    return m;
}

JointState Plan::joint(std::size_t step) const
{
    JointState s;
    for (const CellRun& r : runs) s.push_back(r.value(step));
    return s;
}

bool Plan::certified() const
{
    return consistent && std::all_of(certificate.begin(), certificate.end(), [](bool b) { return b; });
}

namespace {

double since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += threads) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

bool certify_words(const Model& m, Plan& p)
{
    p.words.clear();
    p.certificate.clear();
    for (std::size_t i = 0; i < p.runs.size(); ++i) {
        p.words.push_back(timed_word(p.runs[i], m.wts[i]));
        p.certificate.push_back(!m.formulas[i] || sat(p.words.back(), 0, *m.formulas[i]));
    }
    p.consistent = check_consistent(p.runs, m.wts);
    return p.certified();
}

CellRun to_cell_run(const TimedRun<StateId>& r)
{
    CellRun out;
    out.loop_start = r.loop_start;
    out.period = r.period;
    for (const auto& st : r.steps) out.steps.push_back({static_cast<CellId>(st.value), st.time});
    return out;
}

/// Tuples of nonnegative integers with the given sum, in lexicographic order.
void tuples_with_sum(std::size_t n, std::size_t sum, const std::function<bool(const std::vector<std::size_t>&)>& visit)
{
    std::vector<std::size_t> k(n, 0);
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
        if (pos + 1 == n) {
            k[pos] = left;
            return visit(k);
        }
        for (std::size_t v = 0; v <= left; ++v) {
            k[pos] = v;
            if (!rec(pos + 1, left - v)) return false;
        }
        return true;
    };
    rec(0, sum);
}

}  // namespace

Plan synthesize(Model& m, SynthesisStats* stats, const SynthesisOptions& opt)
{
    SynthesisStats local;
    SynthesisStats& st = stats ? *stats : local;
    const std::size_t n = m.wts.size();
    const std::size_t cap = m.scenario.max_states;

    auto t0 = std::chrono::steady_clock::now();
    const auto frontier = reachable_frontier(m.wts, cap);
    for (const auto& f : frontier) st.frontier_sizes.push_back(f.size());
    st.phases.push_back({"frontier", since(t0)});

    // Steps 1-2: per-agent automata and Buchi products.
    t0 = std::chrono::steady_clock::now();
    std::vector<char> compiled(n, 1);
    std::vector<std::unique_ptr<AgentSystem>> systems(n);
    std::vector<std::unique_ptr<BuchiWTS>> buchi(n);
    std::vector<std::unique_ptr<LassoEnumerator>> enums(n);
    std::vector<std::vector<CellRun>> cand(n);
    std::vector<char> exhausted(n, 0);
    st.lassos_found.assign(n, 0);

    auto fetch = [&](std::size_t i, std::size_t k) {
        while (cand[i].size() <= k && !exhausted[i]) {
            auto l = enums[i]->next();
            if (!l) {
                exhausted[i] = 1;
                break;
            }
            ++st.lassos_found[i];
            CellRun r = to_cell_run(project_run(*buchi[i], *l).system_run);
            if (!compiled[i] && !sat(timed_word(r, m.wts[i]), 0, *m.formulas[i])) continue;
            cand[i].push_back(std::move(r));
        }
        return cand[i].size() > k;
    };

    parallel_for(n, opt.threads, [&](std::size_t i) {
        systems[i] = std::make_unique<AgentSystem>(m.wts[i], frontier);
        Tba a;
        if (!m.formulas[i]) {
            a = universal_tba({});
        } else if (in_fragment(*m.formulas[i])) {
            a = mitl_to_tba(*m.formulas[i]);
        } else {
            compiled[i] = 0;
            a = universal_tba(atoms(*m.formulas[i]));
        }
        buchi[i] = std::make_unique<BuchiWTS>(*systems[i], std::move(a), cap);
        enums[i] = std::make_unique<LassoEnumerator>(*buchi[i]);
        fetch(i, 0);
    });
    for (std::size_t i = 0; i < n; ++i) st.buchi_sizes.push_back(buchi[i]->size());
    st.phases.push_back({"buchi", since(t0)});
    for (std::size_t i = 0; i < n; ++i) {
        if (cand[i].empty() && compiled[i]) {
            fail(ErrorCode::Infeasible, "agent " + std::to_string(i + 1) + " has no accepting run under any neighbor behavior");
        }
    }

    // Step 3: canonical enumeration of lasso combinations.
    t0 = std::chrono::steady_clock::now();
    std::optional<Plan> found;
    const bool all_have = std::all_of(cand.begin(), cand.end(), [](const auto& c) { return !c.empty(); });
    if (all_have) {
        for (std::size_t sum = 0; !found && st.combos_tried < m.scenario.r_selec; ++sum) {
            bool any_possible = false;
            tuples_with_sum(n, sum, [&](const std::vector<std::size_t>& k) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (!fetch(i, k[i])) return true;
                }
                any_possible = true;
                ++st.combos_tried;
                std::vector<CellRun> chosen;
                for (std::size_t i = 0; i < n; ++i) chosen.push_back(cand[i][k[i]]);
                Plan p;
                p.runs = align_runs(chosen);
                if (check_consistent(p.runs, m.wts) && certify_words(m, p)) {
                    p.method = "decentralized";
                    found = std::move(p);
                    return false;
                }
                return st.combos_tried < m.scenario.r_selec;
            });
            if (!any_possible && std::all_of(exhausted.begin(), exhausted.end(), [](char e) { return e != 0; })) {
                std::size_t max_sum = 0;
                for (std::size_t i = 0; i < n; ++i) max_sum += cand[i].size() - 1;
                if (sum >= max_sum) break;
            }
        }
    }
    st.phases.push_back({"selection", since(t0)});
    if (found) {
        attach_controls(m, *found);
        return *found;
    }

    // Step 4: centralized product.
    t0 = std::chrono::steady_clock::now();
    ProductWTS prod(m.wts, cap);
    std::optional<Tba> joint_tba;
    bool all_compiled = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!m.formulas[i]) continue;
        Tba a = compiled[i] ? mitl_to_tba(*m.formulas[i]) : universal_tba(atoms(*m.formulas[i]));
        all_compiled = all_compiled && compiled[i];
        joint_tba = joint_tba ? intersect(*joint_tba, a) : a;
    }
    if (!joint_tba) joint_tba = universal_tba({});
    BuchiWTS central(prod, *joint_tba, cap);
    LassoEnumerator en(central);
    while (auto l = en.next()) {
        const auto sys_run = project_run(central, *l).system_run;
        JointRun jr;
        jr.loop_start = sys_run.loop_start;
        jr.period = sys_run.period;
        for (const auto& s : sys_run.steps) jr.steps.push_back({prod.joint(s.value), s.time});
        Plan p;
        for (std::size_t i = 0; i < n; ++i) p.runs.push_back(project(jr, i));
        if (certify_words(m, p)) {
            p.method = "centralized";
            st.product_states = prod.size();
            st.centralized_states = central.size();
            st.phases.push_back({"centralized", since(t0)});
            attach_controls(m, p);
            return p;
        }
        if (all_compiled) fail(ErrorCode::InvalidArgument, "centralized lasso fails its certificate");
    }
    st.product_states = prod.size();
    st.centralized_states = central.size();
    st.phases.push_back({"centralized", since(t0)});
    if (!all_compiled) {
        fail(ErrorCode::ResourceBudgetExceeded,
             "generate-and-check exhausted the enumerated lassos without a satisfying one; infeasibility is not established");
    }
    fail(ErrorCode::Infeasible, "the product of all agents has no accepting run");
}

void attach_controls(const Model& m, Plan& p)
{
    p.controls.clear();
    if (p.runs.empty()) return;
    const CellRun& ref = p.runs.front();
    for (std::size_t j = 0; j < ref.size(); ++j) {
        const std::size_t nxt = j + 1 < ref.size() ? j + 1 : ref.loop_start;
        std::vector<StepControl> row;
        for (const CellRun& r : p.runs) {
            const CellId to = r.steps[nxt].value;
            row.push_back({r.steps[j].value, to, m.disc.dec.cell(to).center()});
        }
        p.controls.push_back(std::move(row));
    }
}

std::vector<std::pair<JointState, JointState>> plan_transitions(const Plan& p)
{
    std::vector<std::pair<JointState, JointState>> out;
    const std::size_t len = p.length();
    for (std::size_t j = 0; j < len; ++j) {
        const std::size_t nxt = j + 1 < len ? j + 1 : p.runs.front().loop_start;
        out.emplace_back(p.joint(j), p.joint(nxt));
    }
    return out;
}

Point saturate(const Point& v, double limit)
{
    const double norm = v.norm();
    if (norm <= limit || norm == 0.0) return v;
    return v * (limit / norm);
}

TransitionLaw nominal_law(const Model& m, double authority)
{
    const Model* mp = &m;
    return [mp, authority](const JointState&, const JointState& to) -> InputLaw {
        Positions targets;
        for (CellId c : to) targets.push_back(mp->disc.dec.cell(c).center());
        const double dt = to_double(mp->disc.dt);
        const double limit = authority * mp->scenario.v_max;
        return [mp, targets, dt, limit](std::size_t i, const Rational& t, const Positions& x) {
            const double remaining = std::max(dt - to_double(t), 1e-12);
            const Point desired = (targets[i] - x[i]) / remaining - coupling(mp->graph, x, i);
            return saturate(desired, limit);
        };
    };
}

SimulationReport certify(const Model& m, const Plan& p, std::size_t samples, std::uint64_t seed, double authority)
{
    return simulation_check(m.disc, m.graph, plan_transitions(p), nominal_law(m, authority), samples, seed, m.dt_sim());
}

PlanSimulation simulate_plan(const Model& m, const Plan& p, std::size_t steps)
{
    PlanSimulation out;
    if (p.length() == 0) fail(ErrorCode::PlanMismatch, "plan has no steps");
    TransitionLaw law = nominal_law(m, 1.0);
    AgentState x;
    x.positions = m.scenario.initial;
    auto check = [&](std::size_t j) {
        const JointState cells = p.joint(j);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!m.disc.dec.cell(cells[i]).contains(x.positions[i], kGeoEps)) {
                out.membership_failures.push_back(j);
                return;
            }
        }
    };
    out.trajectory.samples.push_back({x.positions, Rational(0)});
    for (std::size_t j = 0; j < steps; ++j) {
        check(j);
        InputLaw inner = law(p.joint(j), p.joint(j + 1));
        InputLaw monitored = [&](std::size_t i, const Rational& t, const Positions& pos) {
            Point u = inner(i, t, pos);
            out.max_input_norm = std::max(out.max_input_norm, u.norm());
            return u;
        };
        x.time = Rational(0);
        Trajectory seg = integrate(m.graph, x, monitored, m.dt_sim(), m.disc.dt, m.scenario.v_max);
        const Rational offset = m.disc.dt * Rational(static_cast<std::int64_t>(j));
        for (std::size_t k = 1; k < seg.samples.size(); ++k) {
            AgentState s = seg.samples[k];
            s.time += offset;
            out.trajectory.samples.push_back(std::move(s));
        }
        x.positions = seg.samples.back().positions;
    }
    check(steps);
    return out;
}

std::vector<StatsRow> product_stats(const Model& m, std::size_t steps)
{
    ProductWTS prod(m.wts, m.scenario.max_states);
    const auto c = prod.reachable_counts(steps);
    std::vector<StatsRow> rows;
    for (std::size_t k = 0; k < c.exact.size(); ++k) rows.push_back({k, c.exact[k], c.within[k], c.seconds[k]});
    return rows;
}

}  // namespace tmas
