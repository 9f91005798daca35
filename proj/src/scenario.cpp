#include "tmas/scenario.hpp"

#include "tmas/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace tmas {

namespace {

using boost::property_tree::ptree;

std::string trim(const std::string& s)
{
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad(const std::string& where, const std::string& msg)
{
    fail(ErrorCode::ScenarioError, where + ": " + msg);
}

double to_number(const std::string& where, const std::string& text)
{
    try {
        if (text.find('/') != std::string::npos) return to_double(parse_rational(text));
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) bad(where, "'" + text + "' is not a number");
        return v;
    } catch (const Error&) {
        bad(where, "'" + text + "' is not a number");
    } catch (const std::exception&) {
        bad(where, "'" + text + "' is not a number");
    }
}

std::size_t to_count(const std::string& where, const std::string& text)
{
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size() || text.front() == '-') bad(where, "'" + text + "' is not a nonnegative integer");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        bad(where, "'" + text + "' is not a nonnegative integer");
    }
}

Rational to_rational(const std::string& where, const std::string& text)
{
    try {
        return parse_rational(text);
    } catch (const Error&) {
        bad(where, "'" + text + "' is not a rational number");
    }
}

bool to_bool(const std::string& where, const std::string& text)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    bad(where, "'" + text + "' is not a boolean");
}

std::vector<double> numbers(const std::string& where, const std::string& text)
{
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) out.push_back(to_number(where, tok));
    return out;
}

Box box_from(const std::string& where, const std::vector<double>& v, std::size_t dim)
{
    if (v.size() != 2 * dim) bad(where, "expected " + std::to_string(2 * dim) + " numbers (lo hi per axis)");
    Box b{Point(dim), Point(dim)};
    for (std::size_t k = 0; k < dim; ++k) {
        b.lo(k) = v[2 * k];
        b.hi(k) = v[2 * k + 1];
    }
    return b;
}

/// "8, 9-11" -> {8, 9, 10, 11}.
std::vector<std::size_t> cell_list(const std::string& where, const std::string& text)
{
    std::vector<std::size_t> out;
    for (const std::string& part : split(text, ',')) {
        const std::size_t dash = part.find('-');
        if (dash == std::string::npos) {
            out.push_back(to_count(where, part));
            continue;
        }
        const std::size_t a = to_count(where, trim(part.substr(0, dash)));
        const std::size_t b = to_count(where, trim(part.substr(dash + 1)));
        if (b < a) bad(where, "descending range '" + part + "'");
        for (std::size_t c = a; c <= b; ++c) out.push_back(c);
    }
    return out;
}

class Section {
public:
    Section(const ptree& tree, std::string name) : name_(std::move(name))
    {
        if (auto child = tree.get_child_optional(boost::property_tree::path(name_, '\0'))) {
            present_ = true;
            for (const auto& kv : *child) {
                if (!values_.emplace(kv.first, trim(kv.second.data())).second) bad(name_, "duplicate key '" + kv.first + "'");
            }
        }
    }

    bool present() const { return present_; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::optional<std::string> get(const std::string& key)
    {
        auto it = values_.find(key);
        if (it == values_.end()) return std::nullopt;
        used_.insert(key);
        return it->second;
    }

    std::string need(const std::string& key)
    {
        auto v = get(key);
        if (!v) bad(name_, "missing key '" + key + "'");
        return *v;
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    void finish() const
    {
        for (const auto& kv : values_) {
            if (!used_.count(kv.first)) bad(name_, "unknown key '" + kv.first + "'");
        }
    }

private:
    std::string name_;
    bool present_ = false;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

std::string num_text(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Scenario parse_scenario(std::istream& in)
{
    ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        fail(ErrorCode::ScenarioError, std::string("malformed scenario: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    static const std::set<std::string> sections = {"graph", "dynamics", "workspace", "labels", "abstraction", "formulas", "synthesis"};
    bool have_format = false;
    for (const auto& kv : tree) {
        if (sections.count(kv.first)) continue;
        if (kv.second.empty()) {
            if (kv.first != "format") fail(ErrorCode::ScenarioError, "unknown top-level key '" + kv.first + "'");
            if (trim(kv.second.data()) != kScenarioFormat) {
                fail(ErrorCode::ScenarioError, "unsupported format '" + kv.second.data() + "', expected " + kScenarioFormat);
            }
            have_format = true;
        } else {
            fail(ErrorCode::ScenarioError, "unknown section [" + kv.first + "]");
        }
    }
    if (!have_format) fail(ErrorCode::ScenarioError, std::string("missing 'format = ") + kScenarioFormat + "' header");

    Scenario sc;
    Section graph(tree, "graph");
    sc.n_agents = to_count(graph.where("agents"), graph.need("agents"));
    if (auto e = graph.get("edges")) {
        for (const std::string& pair : split(*e, ',')) {
            const std::size_t dash = pair.find('-');
            if (dash == std::string::npos) bad(graph.where("edges"), "edge '" + pair + "' must read i-j");
            const std::size_t a = to_count(graph.where("edges"), trim(pair.substr(0, dash)));
            const std::size_t b = to_count(graph.where("edges"), trim(pair.substr(dash + 1)));
            if (a == 0 || b == 0) bad(graph.where("edges"), "agents are numbered from 1");
            sc.edges.emplace_back(a - 1, b - 1);
        }
    }
    graph.finish();

    Section dyn(tree, "dynamics");
    sc.v_max = to_number(dyn.where("v_max"), dyn.need("v_max"));
    if (auto v = dyn.get("margin")) sc.margin = to_number(dyn.where("margin"), *v);
    if (auto v = dyn.get("dim")) sc.dim = to_count(dyn.where("dim"), *v);
    for (const std::string& p : split(dyn.need("initial"), ';')) {
        const auto xs = numbers(dyn.where("initial"), p);
        if (xs.size() != sc.dim) bad(dyn.where("initial"), "position '" + p + "' does not have " + std::to_string(sc.dim) + " coordinates");
        Point pt(sc.dim);
        for (std::size_t k = 0; k < sc.dim; ++k) pt(k) = xs[k];
        sc.initial.push_back(pt);
    }
    if (auto v = dyn.get("dt_sim")) sc.dt_sim = to_rational(dyn.where("dt_sim"), *v);
    dyn.finish();

    Section ws(tree, "workspace");
    sc.bounds = box_from(ws.where("bounds"), numbers(ws.where("bounds"), ws.need("bounds")), sc.dim);
    if (auto v = ws.get("label_grid")) sc.label_grid = to_number(ws.where("label_grid"), *v);
    if (auto v = ws.get("label_cells")) {
        if (sc.label_grid) bad("workspace", "label_grid and label_cells are mutually exclusive");
        for (const std::string& c : split(*v, ';')) sc.label_cells.push_back(box_from(ws.where("label_cells"), numbers(ws.where("label_cells"), c), sc.dim));
    }
    ws.finish();

    Section labels(tree, "labels");
    for (const auto& kv : labels.values()) {
        const std::size_t dot = kv.first.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == kv.first.size()) bad("labels", "key '" + kv.first + "' must read <agent>.<service>");
        const std::size_t agent = to_count(labels.where(kv.first), kv.first.substr(0, dot));
        if (agent == 0) bad(labels.where(kv.first), "agents are numbered from 1");
        sc.labels.push_back({agent - 1, kv.first.substr(dot + 1), cell_list(labels.where(kv.first), *labels.get(kv.first))});
    }
    labels.finish();

    Section abs(tree, "abstraction");
    sc.cell_size = to_number(abs.where("cell_size"), abs.need("cell_size"));
    sc.lambda = to_number(abs.where("lambda"), abs.need("lambda"));
    sc.dt = to_rational(abs.where("dt"), abs.need("dt"));
    if (auto v = abs.get("conservative")) sc.conservative = to_bool(abs.where("conservative"), *v);
    abs.finish();

    Section formulas(tree, "formulas");
    sc.formulas.assign(sc.n_agents, std::string());
    for (const auto& kv : formulas.values()) {
        const std::size_t agent = to_count(formulas.where(kv.first), kv.first);
        if (agent == 0 || agent > sc.n_agents) bad(formulas.where(kv.first), "no such agent");
        sc.formulas[agent - 1] = *formulas.get(kv.first);
    }
    formulas.finish();

    Section syn(tree, "synthesis");
    if (auto v = syn.get("r_selec")) sc.r_selec = to_count(syn.where("r_selec"), *v);
    if (auto v = syn.get("max_states")) sc.max_states = to_count(syn.where("max_states"), *v);
    if (auto v = syn.get("samples")) sc.samples = to_count(syn.where("samples"), *v);
    if (auto v = syn.get("seed")) sc.seed = to_count(syn.where("seed"), *v);
    syn.finish();
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open scenario '" + path + "'");
    return parse_scenario(in);
}

std::string canonical_text(const Scenario& s)
{
    std::ostringstream os;
    auto box_text = [](const Box& b) {
        std::string out;
        for (std::size_t k = 0; k < b.dim(); ++k) out += (k ? " " : "") + num_text(b.lo(k)) + " " + num_text(b.hi(k));
        return out;
    };
    os << "format = " << kScenarioFormat << "\n\n[graph]\nagents = " << s.n_agents << "\nedges = ";
    for (std::size_t k = 0; k < s.edges.size(); ++k) os << (k ? ", " : "") << s.edges[k].first + 1 << "-" << s.edges[k].second + 1;
    os << "\n\n[dynamics]\nv_max = " << num_text(s.v_max) << "\nmargin = " << num_text(s.margin) << "\ndim = " << s.dim << "\ninitial = ";
    for (std::size_t i = 0; i < s.initial.size(); ++i) {
        os << (i ? "; " : "");
        for (Eigen::Index k = 0; k < s.initial[i].size(); ++k) os << (k ? " " : "") << num_text(s.initial[i](k));
    }
    if (s.dt_sim) os << "\ndt_sim = " << to_fraction_string(*s.dt_sim);
    os << "\n\n[workspace]\nbounds = " << box_text(s.bounds);
    if (s.label_grid) os << "\nlabel_grid = " << num_text(*s.label_grid);
    if (!s.label_cells.empty()) {
        os << "\nlabel_cells = ";
        for (std::size_t k = 0; k < s.label_cells.size(); ++k) os << (k ? "; " : "") << box_text(s.label_cells[k]);
    }
    os << "\n\n[labels]\n";
    std::map<std::string, std::vector<std::size_t>> labels;
    for (const auto& a : s.labels) {
        auto& cells = labels[std::to_string(a.agent + 1) + "." + a.service];
        cells.insert(cells.end(), a.cells.begin(), a.cells.end());
    }
    for (auto& [key, cells] : labels) {
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        os << key << " =";
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? ", " : " ") << cells[k];
        os << "\n";
    }
    os << "\n[abstraction]\ncell_size = " << num_text(s.cell_size) << "\nlambda = " << num_text(s.lambda) << "\ndt = " << to_fraction_string(s.dt)
       << "\nconservative = " << (s.conservative ? "true" : "false") << "\n\n[formulas]\n";
    for (std::size_t i = 0; i < s.formulas.size(); ++i) {
        if (!trim(s.formulas[i]).empty()) os << i + 1 << " = " << trim(s.formulas[i]) << "\n";
    }
    os << "\n[synthesis]\nr_selec = " << s.r_selec << "\nmax_states = " << s.max_states << "\nsamples = " << s.samples << "\nseed = " << s.seed << "\n";
    return os.str();
}

std::string fingerprint(const Scenario& s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : canonical_text(s)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_plan_json(std::ostream& out, const Model& m, const Plan& p)
{
    using nlohmann::json;
    json j;
    j["format"] = kPlanFormat;
    j["scenario_fingerprint"] = fingerprint(m.scenario);
    j["method"] = p.method;
    j["dt"] = to_fraction_string(m.disc.dt);
    j["consistent"] = p.consistent;
    j["loop_start"] = p.runs.empty() ? 0 : p.runs.front().loop_start;
    j["period"] = p.runs.empty() ? "0/1" : to_fraction_string(p.runs.front().period);
    json agents = json::array();
    for (std::size_t i = 0; i < p.runs.size(); ++i) {
        json a;
        a["agent"] = i + 1;
        a["formula"] = m.formulas[i] ? to_string(*m.formulas[i]) : std::string();
        a["satisfied"] = i < p.certificate.size() && p.certificate[i];
        json cells = json::array(), times = json::array(), words = json::array();
        for (const auto& st : p.runs[i].steps) {
            cells.push_back(st.value);
            times.push_back(to_fraction_string(st.time));
        }
        if (i < p.words.size()) {
            for (const auto& st : p.words[i].steps) words.push_back(format_props(st.value));
        }
        a["cells"] = cells;
        a["times"] = times;
        a["labels"] = words;
        agents.push_back(a);
    }
    j["agents"] = agents;
    json controls = json::array();
    for (std::size_t step = 0; step < p.controls.size(); ++step) {
        json row = json::array();
        for (const StepControl& c : p.controls[step]) {
            json point = json::array();
            for (Eigen::Index k = 0; k < c.target_point.size(); ++k) point.push_back(c.target_point(k));
            row.push_back({{"source", c.source}, {"target", c.target}, {"target_point", point}});
        }
        controls.push_back({{"step", step}, {"law", "coupling cancellation plus steering to target_point, saturated at v_max"}, {"agents", row}});
    }
    j["controls"] = controls;
    out << j.dump(2) << '\n';
}

Plan read_plan_json(std::istream& in, const Model& m)
{
    using nlohmann::json;
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorCode::PlanMismatch, std::string("plan is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kPlanFormat) fail(ErrorCode::PlanMismatch, "unsupported plan format");
        if (j.at("scenario_fingerprint").get<std::string>() != fingerprint(m.scenario)) {
            fail(ErrorCode::PlanMismatch, "plan was produced for a different scenario");
        }
        Plan p;
        p.method = j.at("method").get<std::string>();
        const auto loop_start = j.at("loop_start").get<std::size_t>();
        const Rational period = parse_rational(j.at("period").get<std::string>());
        const auto& agents = j.at("agents");
        if (agents.size() != m.wts.size()) fail(ErrorCode::PlanMismatch, "plan has the wrong number of agents");
        for (const auto& a : agents) {
            CellRun r;
            r.loop_start = loop_start;
            r.period = period;
            const auto& cells = a.at("cells");
            const auto& times = a.at("times");
            if (cells.size() != times.size()) fail(ErrorCode::PlanMismatch, "cells and times differ in length");
            for (std::size_t k = 0; k < cells.size(); ++k) {
                const auto c = cells[k].get<CellId>();
                if (c >= m.disc.dec.size()) fail(ErrorCode::PlanMismatch, "plan refers to a cell outside the decomposition");
                r.steps.push_back({c, parse_rational(times[k].get<std::string>())});
            }
            r.validate();
            p.runs.push_back(std::move(r));
        }
        for (std::size_t i = 0; i < p.runs.size(); ++i) {
            p.words.push_back(timed_word(p.runs[i], m.wts[i]));
            p.certificate.push_back(!m.formulas[i] || sat(p.words.back(), 0, *m.formulas[i]));
        }
        p.consistent = check_consistent(p.runs, m.wts);
        attach_controls(m, p);
        return p;
    } catch (const json::exception& e) {
        fail(ErrorCode::PlanMismatch, std::string("malformed plan: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::PlanMismatch) throw;
        fail(ErrorCode::PlanMismatch, std::string("plan does not fit the scenario: ") + e.what());
    }
}

}  // namespace tmas
