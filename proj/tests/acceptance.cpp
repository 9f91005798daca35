// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "oracles.hpp"

#include "tmas/abstraction.hpp"
#include "tmas/dynamics.hpp"
#include "tmas/graph_model.hpp"
#include "tmas/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace tmas;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int n, const std::string& title, const Outcome& o)
{
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << n << ": " << title << " (" << o.detail << ")" << std::endl;
    if (!o.pass) ++failures;
}

template <class F>
void run(int n, const std::string& title, F body)
{
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    report(n, title, o);
}

Outcome mitl_tba_equivalence()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    const std::vector<std::string> ap{"p", "q"};
    std::size_t agree = 0, brute_agree = 0, accepted = 0;
    const std::size_t total = 1000;
    std::string first_mismatch;
    for (std::size_t k = 0; k < total; ++k) {
        const TimedWord w = oracle::random_word(rng, ap, 6);
        const FormulaPtr f = oracle::random_fragment_formula(rng, ap, 3);
        const Tba a = mitl_to_tba(*f);
        const bool acc = accepts(a, restrict_word(w, a.ap()));
        const bool s = sat(w, 0, *f);
        const bool b = oracle::mitl_brute(w, 0, *f);
        if (acc == s) {
            ++agree;
        } else if (first_mismatch.empty()) {
            first_mismatch = to_string(*f);
        }
        if (s == b) ++brute_agree;
        if (acc) ++accepted;
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << agree << "/" << total << " agree, brute-force evaluator agrees on " << brute_agree << "/" << total << ", "
       << accepted << " accepted, " << secs << " s";
    if (!first_mismatch.empty()) os << ", first mismatch " << first_mismatch;
    return {agree == total && brute_agree == total && secs < 60.0, os.str()};
}

Outcome example_runs()
{
    auto sys = oracle::three_state_system();
    TimedRun<StateId> r1;
    r1.steps = {{0, Rational(0)}, {1, Rational(1)}};
    r1.loop_start = 0;
    r1.period = Rational(3);
    TimedRun<StateId> r2;
    r2.steps = {{0, Rational(0)}, {1, Rational(1)}, {2, Rational(5, 2)}, {1, Rational(3)}};
    r2.loop_start = 0;
    r2.period = Rational(5);
    const TimedWord w1 = oracle::run_word(*sys, r1);
    const TimedWord w2 = oracle::run_word(*sys, r2);
    const bool s1 = sat(w1, 0, *parse_formula("F[2,5] green"));
    const bool s2 = sat(w2, 0, *parse_formula("G[0,5] green"));
    std::ostringstream os;
    os << "r1 |= F[2,5] green is " << (s1 ? "true" : "false") << ", r2 |= G[0,5] green is " << (s2 ? "true" : "false");
    return {s1 && !s2, os.str()};
}

TimedWord two_phase_word(const Rational& switch_time, bool green_after)
{
    TimedWord w;
    w.steps = {{{}, Rational(0)}, {green_after ? PropSet{"green"} : PropSet{}, switch_time}};
    w.loop_start = 1;
    w.period = Rational(1);
    return w;
}

Outcome eventually_automaton_words()
{
    std::mt19937_64 rng(7);
    std::vector<std::pair<Rational, Rational>> pairs{{Rational(2), Rational(5)}};
    for (int k = 0; k < 20; ++k) {
        const auto c1 = static_cast<std::int64_t>(1 + rng() % 20);
        const auto c2 = c1 + static_cast<std::int64_t>(1 + rng() % 20);
        pairs.emplace_back(Rational(c1, 4), Rational(c2, 4));
    }
    std::size_t ok = 0;
    for (const auto& [c1, c2] : pairs) {
        const Tba a = fig2_tba(c1, c2);
        // alpha_1 in [c1, c2]; alpha_2 in (0, c1).
        const auto u = static_cast<std::int64_t>(rng() % 9);
        const Rational alpha1 = c1 + (c2 - c1) * Rational(u, 8);
        const Rational alpha2 = c1 * Rational(static_cast<std::int64_t>(1 + rng() % 7), 8);
        const TimedWord good = two_phase_word(alpha1, true);
        const TimedWord bad = two_phase_word(alpha2, false);
        const FormulaPtr f = eventually(make_interval(c1, c2), atom("green"));
        if (accepts(a, good) && !accepts(a, bad) && sat(good, 0, *f) && !sat(bad, 0, *f)) ++ok;
    }
    std::ostringstream os;
    os << ok << "/" << pairs.size() << " (c1, c2) pairs: alpha1 word accepted and alpha2 word rejected";
    return {ok == pairs.size(), os.str()};
}

Outcome ball_invariance()
{
    const auto t0 = Clock::now();
    const CommGraph g = build_graph(3, {{0, 1}, {1, 2}});
    const double v_max = 1.0;
    const BoundParams b = theorem1_constants(g, v_max, 1.05);
    AgentState x0;
    x0.positions = {oracle::pt(-4, 4), oracle::pt(0, 6), oracle::pt(7, 0)};
    std::mt19937_64 rng(99);
    std::size_t entered = 0, violations = 0;
    double worst = 0.0;
    const std::size_t signals = 100;
    for (std::size_t k = 0; k < signals; ++k) {
        // Piecewise-constant random inputs; every tenth signal pushes each
        // agent away from the centroid at full authority.
        const bool adversarial = k % 10 == 0;
        const double hold = 0.1 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng);
        std::vector<std::vector<Point>> table;
        for (int seg = 0; seg * hold <= 31.0; ++seg) {
            std::vector<Point> u;
            for (int i = 0; i < 3; ++i) {
                const double ang = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
                const double mag = v_max * std::uniform_real_distribution<double>(0, 1)(rng);
                u.push_back(oracle::pt(mag * std::cos(ang), mag * std::sin(ang)));
            }
            table.push_back(u);
        }
        InputLaw law = [&](std::size_t i, const Rational& t, const Positions& x) -> Point {
            if (adversarial) {
                Point c = (x[0] + x[1] + x[2]) / 3.0;
                Point d = x[i] - c;
                const double n = d.norm();
                return n > 0 ? Point(d * (v_max / n)) : Point(Point::Zero(2));
            }
            return table.at(static_cast<std::size_t>(to_double(t) / hold))[i];
        };
        const Trajectory tr = integrate(g, x0, law, Rational(1, 100), Rational(30), v_max);
        bool inside = false;
        for (const AgentState& s : tr.samples) {
            const double rn = relative_norm(g, s.positions);
            if (rn <= b.r_bar) {
                inside = true;
            } else if (inside) {
                ++violations;
            }
            if (inside) worst = std::max(worst, rn);
        }
        if (inside) ++entered;
    }
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << "K2 = " << b.k2 << ", R_bar = " << b.r_bar << ", " << entered << "/" << signals << " entered, " << violations
       << " exits after entry, max norm after entry " << worst << ", " << secs << " s";
    const bool k2_ok = std::abs(b.k2 - 12.0) < 1e-9 && std::abs(b.r_bar - 12.6) < 1e-9;
    return {k2_ok && entered == signals && violations == 0 && secs < 120.0, os.str()};
}

Outcome feasibility_ranges()
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t cases = 0, bad_nonempty = 0, bad_residual = 0, bad_refine = 0;
    double worst_residual = 0.0;
    for (double lambda : {0.14, 0.21}) {
        for (int k = 0; k < 200; ++k) {
            ConditionConstants c;
            c.m_bound = std::pow(10.0, -1.0 + 3.0 * unit(rng));
            c.l_combined = std::pow(10.0, -1.0 + 2.5 * unit(rng));
            const double v_max = c.m_bound * (0.01 + 0.98 * unit(rng));
            const RealInterval dr = dmax_range(c, lambda, v_max);
            for (int s = 0; s < 5; ++s) {
                const double d = s == 0 ? dr.hi : dr.hi * (0.001 + 0.999 * unit(rng));
                ++cases;
                const RealInterval r = dt_range(d, c, lambda, v_max);
                if (!(r.lo <= r.hi)) ++bad_nonempty;
                const double a2 = c.m_bound * c.l_combined, a1 = (1.0 - lambda) * v_max;
                for (double dt : {r.lo, r.hi}) {
                    const double scale = std::max({a2 * dt * dt, a1 * dt, d});
                    const double res = std::abs(a2 * dt * dt - a1 * dt + d) / scale;
                    worst_residual = std::max(worst_residual, res);
                    if (res > 1e-12) ++bad_residual;
                }
                const double d2 = d * unit(rng);
                if (d2 > 0.0) {
                    const RealInterval r2 = dt_range(d2, c, lambda, v_max);
                    const double tol = 1e-12 * std::max(1.0, r.hi);
                    if (!(r2.lo <= r.lo + tol && r2.hi >= r.hi - tol)) ++bad_refine;
                }
            }
        }
    }
    std::ostringstream os;
    os << cases << " diameters, " << bad_nonempty << " empty ranges, " << bad_residual
       << " endpoint residuals above 1e-12 (worst relative " << worst_residual << "), " << bad_refine
       << " refinement containment failures";
    return {bad_nonempty == 0 && bad_residual == 0 && bad_refine == 0, os.str()};
}

struct BuchiCase {
    std::unique_ptr<ExplicitSystem> sys;
    Tba tba;
    bool oracle_nonempty = false;
};

std::vector<BuchiCase> buchi_cases()
{
    std::mt19937_64 rng(31337);
    const std::vector<std::string> ap{"p", "q"};
    std::vector<BuchiCase> out;
    std::size_t nonempty = 0, empty = 0;
    while (out.size() < 50) {
        BuchiCase c{oracle::random_system(rng, ap, 8), oracle::random_tba(rng, ap)};
        const oracle::Product p = oracle::build_product(*c.sys, c.tba, 10000);
        if (p.size() == 0) continue;
        c.oracle_nonempty = oracle::product_nonempty(p);
        // Balanced sample of both verdicts.
        if (c.oracle_nonempty && nonempty >= 25) continue;
        if (!c.oracle_nonempty && empty >= 25) continue;
        (c.oracle_nonempty ? nonempty : empty)++;
        out.push_back(std::move(c));
    }
    return out;
}

Outcome buchi_emptiness(std::vector<BuchiCase>& cases)
{
    std::size_t agree = 0, count_agree = 0;
    for (auto& c : cases) {
        BuchiWTS b(*c.sys, c.tba, 10000);
        const bool found = find_accepting(b).has_value();
        if (found == c.oracle_nonempty) ++agree;
        // Full exploration for the state-count cross-check.
        std::vector<std::size_t> stack(b.initial_states().begin(), b.initial_states().end());
        std::vector<char> seen(1, 0);
        std::size_t reach = 0;
        auto mark = [&](std::size_t id) {
            if (id >= seen.size()) seen.resize(id + 1, 0);
            if (seen[id]) return false;
            seen[id] = 1;
            return true;
        };
        std::vector<std::size_t> todo;
        for (std::size_t s : stack) {
            if (mark(s)) todo.push_back(s);
        }
        while (!todo.empty()) {
            const std::size_t s = todo.back();
            todo.pop_back();
            ++reach;
            for (std::size_t t : b.successors(s)) {
                if (mark(t)) todo.push_back(t);
            }
        }
        if (reach == oracle::build_product(*c.sys, c.tba, 10000).size()) ++count_agree;
    }
    std::ostringstream os;
    std::size_t nonempty = 0;
    for (const auto& c : cases) nonempty += c.oracle_nonempty;
    os << agree << "/" << cases.size() << " verdicts agree (" << nonempty << " nonempty), reachable state counts agree on "
       << count_agree << "/" << cases.size();
    return {agree == cases.size() && count_agree == cases.size(), os.str()};
}

bool is_system_run(ExplicitSystem& sys, const TimedRun<StateId>& r)
{
    const auto init = sys.initial_states();
    if (std::find(init.begin(), init.end(), r.steps.front().value) == init.end()) return false;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const StateId from = r.value(k), to = r.value(k + 1);
        const auto succ = sys.successors(from);
        if (std::find(succ.begin(), succ.end(), to) == succ.end()) return false;
        if (r.time(k + 1) - r.time(k) != sys.weight(from, to)) return false;
    }
    return true;
}

Outcome lasso_run_correspondence(std::vector<BuchiCase>& cases)
{
    std::size_t lassos = 0, forward_ok = 0;
    for (auto& c : cases) {
        BuchiWTS b(*c.sys, c.tba, 10000);
        LassoEnumerator en(b);
        for (int k = 0; k < 20; ++k) {
            const auto l = en.next();
            if (!l) break;
            ++lassos;
            const Projection pr = project_run(b, *l);
            const TimedWord w = projected_word(b, *l);
            if (is_system_run(*c.sys, pr.system_run) && accepts(c.tba, restrict_word(w, c.tba.ap()))) ++forward_ok;
        }
    }

    // Converse: runs found by random walks whose words satisfy a fragment
    // formula must be the projection of an accepting product lasso.
    std::mt19937_64 rng(4242);
    const std::vector<std::string> ap{"p", "q"};
    std::size_t sampled = 0, converse_ok = 0, attempts = 0;
    while (sampled < 50 && attempts < 200000) {
        ++attempts;
        auto sys = oracle::random_system(rng, ap, 6);
        const FormulaPtr f = oracle::random_fragment_formula(rng, ap, 3);
        const auto r = oracle::random_run(rng, *sys, 8);
        if (!r) continue;
        const TimedWord w = oracle::run_word(*sys, *r);
        if (!sat(w, 0, *f)) continue;
        ++sampled;
        const Tba a = mitl_to_tba(*f);
        // The run itself as a system: position k is state k.
        std::vector<std::string> names;
        std::vector<PropSet> labels;
        for (std::size_t k = 0; k < r->size(); ++k) {
            names.push_back(std::to_string(k));
            labels.push_back(sys->label(r->steps[k].value));
        }
        // Unreachable state carrying the whole alphabet.
        names.push_back("pad");
        labels.emplace_back(ap.begin(), ap.end());
        ExplicitSystem path(names, labels, {0});
        for (std::size_t k = 0; k < r->size(); ++k) {
            const std::size_t nxt = k + 1 < r->size() ? k + 1 : r->loop_start;
            path.add_edge(static_cast<StateId>(k), static_cast<StateId>(nxt), r->time(k + 1) - r->time(k));
        }
        BuchiWTS on_path(path, a, 100000);
        const auto l = find_accepting(on_path);
        BuchiWTS full(*sys, a, 100000);
        if (l && find_accepting(full)) ++converse_ok;
    }
    std::ostringstream os;
    os << forward_ok << "/" << lassos << " enumerated lassos project to accepted system runs; " << converse_ok << "/"
       << sampled << " satisfying runs have an accepting product lasso";
    return {lassos > 0 && forward_ok == lassos && sampled == 50 && converse_ok == sampled, os.str()};
}

Outcome end_to_end()
{
    const auto t0 = Clock::now();
    Model m = build_model(oracle::two_agent_scenario());
    SynthesisStats stats;
    const Plan p = synthesize(m, &stats);
    // Recheck the certificate from scratch.
    bool sat_all = true;
    for (std::size_t i = 0; i < p.runs.size(); ++i) {
        sat_all = sat_all && sat(timed_word(p.runs[i], m.wts[i]), 0, *m.formulas[i]);
    }
    const bool consistent = check_consistent(p.runs, m.wts);
    const SimulationReport rep = certify(m, p, 25, 1);
    const double secs = seconds_since(t0);
    std::ostringstream os;
    os << p.method << " plan of " << p.length() << " steps, sat " << (sat_all ? "all true" : "false")
       << ", consistent " << (consistent ? "true" : "false") << ", " << rep.misses << " misses over "
       << rep.transitions_checked << " transitions x " << rep.samples_per_transition << " samples, max input "
       << rep.max_input_norm << " <= v_max " << m.scenario.v_max << ", " << secs << " s";
    return {sat_all && consistent && p.certified() && rep.passed() && rep.samples_per_transition == 25 &&
                rep.max_input_norm <= m.scenario.v_max + 1e-9 && secs < 120.0,
            os.str()};
}

Outcome table_trend()
{
    const Model lo = build_model(oracle::path3_scenario(0.14));
    const Model hi = build_model(oracle::path3_scenario(0.21));
    const auto a = product_stats(lo, 10);
    const auto b = product_stats(hi, 10);
    bool monotone = true, dominates = true;
    for (std::size_t k = 1; k < a.size(); ++k) {
        monotone = monotone && a[k].exact >= a[k - 1].exact && b[k].exact >= b[k - 1].exact;
        monotone = monotone && a[k].within >= a[k - 1].within && b[k].within >= b[k - 1].within;
    }
    for (std::size_t k = 0; k < a.size(); ++k) dominates = dominates && b[k].exact >= a[k].exact;
    std::ostringstream os;
    os << "lambda 0.14:";
    for (const auto& r : a) os << ' ' << r.exact;
    os << "; lambda 0.21:";
    for (const auto& r : b) os << ' ' << r.exact;
    return {a.size() == 11 && b.size() == 11 && monotone && dominates, os.str()};
}

}  // namespace

int main()
{
    run(1, "fragment automata agree with sat() on 1000 random pairs", mitl_tba_equivalence);
    run(2, "example runs r1 |= F[2,5] green and r2 |/= G[0,5] green", example_runs);
    run(3, "three-location eventually automaton on alpha1/alpha2 words", eventually_automaton_words);
    run(4, "relative-state ball is entered and never left (path-3, 100 inputs)", ball_invariance);
    run(5, "diameter and time-step feasibility ranges", feasibility_ranges);
    std::vector<BuchiCase> cases;
    try {
        cases = buchi_cases();
    } catch (const std::exception& e) {
        std::cout << "error generating Buchi cases: " << e.what() << std::endl;
    }
    run(6, "nested DFS emptiness matches exhaustive cycle search on 50 products",
        [&] { return buchi_emptiness(cases); });
    run(7, "accepting lassos and accepted runs correspond", [&] { return lasso_run_correspondence(cases); });
    run(8, "two-agent synthesis with certificate and simulation check", end_to_end);
    run(9, "reachable counts grow monotonically and dominate for larger lambda", table_trend);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
