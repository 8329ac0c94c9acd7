#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "horn/fields.hpp"
#include "horn/hamiltonian.hpp"
#include "horn/ladder.hpp"
#include "horn/legendre.hpp"
#include "horn/verify.hpp"

#ifndef HORN_VERSION
#define HORN_VERSION "0.0.0"
#endif

namespace horn::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || p != end) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

const std::map<std::string, std::set<std::string>>& sections() {
    static const std::map<std::string, std::set<std::string>> s{
        {"model", {"g2", "g3", "kappa", "chart"}},
        {"run", {"field", "case", "emit", "tol", "seed", "points", "expr_limit", "out"}},
    };
    return s;
}

// ---- expression emission ----------------------------------------------------------

class Emitter {
public:
    Emitter(std::size_t limit, bool latex, Outcome& sink) : limit_(limit), latex_(latex), sink_(sink) {}

    /// Emits `e`; with a label, also records "label = e" for LaTeX output.
    json operator()(Expr e, const std::string& label = {}) const { return emit(e, label, false); }
    /// Emits a constraint expression and records "e = 0".
    json constraint(Expr e) const { return emit(e, {}, true); }

private:
    json emit(Expr e, const std::string& label, bool constraint) const {
        json j;
        j["dagSize"] = dag_size(e);
        if (tree_size(e, limit_ + 1) > limit_) {
            j["omitted"] = true;
            return j;
        }
        j["text"] = to_string(e);
        if (latex_) {
            const std::string tex = to_latex(e);
            j["latex"] = tex;
            if (constraint) sink_.equations.emplace_back(tex, "0");
            else if (!label.empty()) sink_.equations.emplace_back(label, tex);
        }
        return j;
    }

    std::size_t limit_;
    bool latex_;
    Outcome& sink_;
};

LagrangianSpec make_spec(const RunConfig& cfg) {
    Rational kappa;
    try {
        kappa = Rational::parse(cfg.kappa);
    } catch (const std::exception& e) {
        throw ConfigError("kappa: " + std::string(e.what()));
    }
    if (kappa.is_zero()) throw ConfigError("kappa must be nonzero");
    try {
        return LagrangianSpec::parse(cfg.g2, cfg.g3, kappa);
    } catch (const dsl::ParseError& e) {
        throw ConfigError("model function: " + std::string(e.what()));
    }
}

FieldConfiguration make_field(const RunConfig& cfg) {
    try {
        return FieldConfiguration::named(cfg.field);
    } catch (const std::exception& e) {
        throw ConfigError("field: " + std::string(e.what()));
    }
}

json projectability_json(const ProjectabilityReport& p, const Emitter& emit) {
    json j;
    j["projects"] = p.projects;
    j["affineInSecondJets"] = p.affine;
    j["obstructionEntries"] = p.obstruction.size();
    json entries = json::array();
    for (std::size_t k = 0; k < p.obstruction.size() && k < 6; ++k) {
        const auto& o = p.obstruction[k];
        json e;
        e["pair"] = o.alpha.str() + " / " + o.beta.str();
        e["indices"] = {o.a, o.h, o.i};
        e["residual"] = emit(o.residual);
        entries.push_back(e);
    }
    j["obstructionSample"] = entries;
    return j;
}

std::string obstruction_warning(const ProjectabilityReport& p) {
    return "not projectable: dG3/dX is not identically zero, so the Poincare-Cartan form does not descend to the "
           "first-order jet bundle (" + std::to_string(p.obstruction.size()) + " nonzero affineness residuals)";
}

json derive(const RunConfig& cfg, const LagrangianSpec& spec, const Emitter& emit, json& warnings) {
    json out;
    const Chart chart = cfg.chart == "partial" ? Chart::Partial : Chart::Covariant;
    out["lagrangian"] = emit(build_lagrangian(spec, chart), "L");
    const auto fl = restricted_legendre(spec, chart);
    json table = json::array();
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < fl.momenta.size(); ++i) {
        if (is_zero(fl.values[i])) {
            ++zeros;
            continue;
        }
        json row;
        row["momentum"] = fl.momenta[i].str();
        row["value"] = emit(fl.values[i], fl.momenta[i].latex());
        table.push_back(row);
    }
    out["legendre"] = {{"chart", cfg.chart}, {"entries", fl.momenta.size()}, {"zeroEntries", zeros}, {"nonzero", table}};
    const auto proj = projectability(spec);
    out["projectability"] = projectability_json(proj, emit);
    if (!proj.projects) warnings.push_back(obstruction_warning(proj));
    out["unifiedHamiltonian"] = emit(build_unified_hamiltonian(spec), "\\hat H");
    return out;
}

json constraints(const RunConfig& cfg, const LagrangianSpec& spec, const Emitter& emit, json& warnings) {
    json out;
    static const std::map<std::string, std::size_t> expected{{"Wc", 110}, {"WL", 44}, {"W1", 11}, {"Wf", 44}};
    json stages = json::array();
    bool census = true;
    for (const auto& st : run_ladder(spec)) {
        json s;
        s["name"] = st.name;
        s["count"] = st.constraints.size();
        s["expected"] = expected.at(st.name);
        census = census && st.constraints.size() == expected.at(st.name);
        int metric_order = -1, scalar_order = -1;
        bool momentum = false;
        std::map<std::string, int> families;
        json rows = json::array();
        for (const auto& c : st.constraints) {
            metric_order = std::max(metric_order, max_metric_order(c.expr));
            scalar_order = std::max(scalar_order, max_scalar_order(c.expr));
            momentum = momentum || contains_momentum(c.expr);
            ++families[c.family];
            rows.push_back({{"family", c.family}, {"label", c.label}, {"expr", emit.constraint(c.expr)}});
        }
        s["families"] = families;
        s["maxMetricOrder"] = metric_order;
        s["maxScalarOrder"] = scalar_order;
        s["momentumFree"] = !momentum;
        s["determinedCoefficients"] = st.determined.size();
        s["notes"] = st.notes;
        s["constraints"] = rows;
        stages.push_back(s);
    }
    out["stages"] = stages;
    out["censusMatches"] = census;

    std::mt19937_64 rng(cfg.seed);
    const auto jp = random_jet_point(rng);
    const auto codim = codimension(spec, jp);
    out["codimension"] = {{"ambient", codim.ambient}, {"graphRank", codim.graph_rank}, {"numeric", codim.codimension},
                          {"naive", codim.naive}, {"stated", codim.stated}};
    warnings.push_back("graph codimension computed numerically is " + std::to_string(codim.codimension) +
                       "; the stated figure is 140 and the naive equation count is 154");
    return out;
}

json hamiltonian(const RunConfig& cfg, const LagrangianSpec& spec, const Emitter& emit, json& warnings) {
    HamiltonianSystem sys;
    if (cfg.hamilton_case == "particular") {
        const auto proj = projectability(spec);
        if (!proj.projects)
            throw InapplicableCase("the particular case needs G3 independent of X; " + obstruction_warning(proj));
        sys = hamiltonian_particular(spec);
    } else {
        sys = hamiltonian_general(spec);
    }
    json out;
    out["case"] = cfg.hamilton_case;
    out["hamiltonian"] = emit(sys.hamiltonian, "H");
    json coords = json::array();
    for (const auto& c : sys.coordinates) coords.push_back(c.str());
    out["coordinates"] = coords;
    json eqs = json::array();
    for (const auto& e : sys.eqs.equations)
        eqs.push_back({{"family", e.family}, {"label", e.label}, {"coordinate", e.coordinate.str()},
                       {"lhs", emit(e.lhs)},
                       {"rhs", emit(e.rhs, "\\partial H / \\partial " + e.coordinate.latex())}});
    out["equations"] = eqs;
    out["tangencyEntries"] = sys.eqs.tangency.size();
    json classes = json::array();
    for (const auto& m : sys.classification) {
        json deps = json::array();
        for (const auto& d : m.second_order_dependencies) deps.push_back(d.str());
        classes.push_back({{"family", m.family}, {"constraint", m.constraint}, {"secondOrderDependencies", deps}});
    }
    out["classification"] = classes;
    for (const auto& n : sys.notes) warnings.push_back(n);
    return out;
}

json verify(const RunConfig& cfg, const LagrangianSpec& spec, bool& failed) {
    VerifyOptions opt;
    opt.points = cfg.points;
    opt.seed = cfg.seed;
    opt.tolerance = cfg.tolerance;
    const auto field = make_field(cfg);
    json checks = json::array();
    double worst = 0.0;
    failed = false;
    for (const auto& r : verify_configuration(spec, field, opt)) {
        checks.push_back({{"name", r.name}, {"detail", r.detail}, {"maxResidual", r.max_residual},
                          {"tolerance", r.tolerance}, {"points", r.points}, {"skipped", r.skipped}, {"passed", r.passed()}});
        if (!r.skipped) worst = std::max(worst, r.max_residual);
        failed = failed || !r.passed();
    }
    json pts = json::array();
    for (const auto& x : sample_points(field, cfg.points, cfg.seed)) pts.push_back(x);
    return {{"field", cfg.field}, {"samplePoints", pts}, {"checks", checks}, {"maxResidual", worst}, {"passed", !failed}};
}

const char* emit_name(Emit e) { return e == Emit::Json ? "json" : e == Emit::Latex ? "latex" : "text"; }

void render_text(const json& j, const std::string& indent, std::ostringstream& os) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        os << indent;
        if (j.is_object()) os << it.key() << ":";
        else os << "-";
        const json& v = it.value();
        if (v.is_object() || v.is_array()) {
            if (v.empty()) {
                os << (v.is_object() ? " {}" : " []") << "\n";
            } else {
                os << "\n";
                render_text(v, indent + "  ", os);
            }
        } else {
            os << " " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
        }
    }
}

}  // namespace

void set_option(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "g2") cfg.g2 = value;
    else if (key == "g3") cfg.g3 = value;
    else if (key == "kappa") cfg.kappa = value;
    else if (key == "chart") {
        if (value != "partial" && value != "covariant") throw ConfigError("chart must be 'partial' or 'covariant'");
        cfg.chart = value;
    } else if (key == "field") cfg.field = value;
    else if (key == "case") {
        if (value != "particular" && value != "general") throw ConfigError("case must be 'particular' or 'general'");
        cfg.hamilton_case = value;
    } else if (key == "emit") {
        if (value == "json") cfg.emit = Emit::Json;
        else if (value == "latex") cfg.emit = Emit::Latex;
        else if (value == "text") cfg.emit = Emit::Text;
        else throw ConfigError("emit must be json, latex or text");
    } else if (key == "tol") {
        cfg.tolerance = parse_number<double>(key, value);
        if (!(cfg.tolerance > 0)) throw ConfigError("tol must be positive");
    } else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "points") {
        cfg.points = parse_number<int>(key, value);
        if (cfg.points < 1) throw ConfigError("points must be at least 1");
    } else if (key == "expr_limit") cfg.expr_limit = parse_number<std::size_t>(key, value);
    else if (key == "out") cfg.out = value;
    else throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::set<std::string> seen;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = origin + ":" + std::to_string(number) + ": ";
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!sections().count(section)) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        bool known = false;
        for (const auto& [name, keys] : sections())
            if ((section.empty() || section == name) && keys.count(key)) known = true;
        if (!known) throw ConfigError(where + "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            set_option(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return cfg;
}

RunConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

Outcome run_command(const std::string& command, const RunConfig& cfg) {
    Outcome outcome;
    json& r = outcome.report;
    r["schema"] = "horndeski-report";
    r["schemaVersion"] = kSchemaVersion;
    r["toolVersion"] = HORN_VERSION;
    r["command"] = command;
    r["spec"] = {{"g2", cfg.g2}, {"g3", cfg.g3}, {"kappa", cfg.kappa}, {"chart", cfg.chart}};
    r["run"] = {{"seed", cfg.seed}, {"points", cfg.points}, {"tolerance", cfg.tolerance}, {"field", cfg.field},
                {"case", cfg.hamilton_case}, {"emit", emit_name(cfg.emit)}};
    json warnings = json::array();
    warnings.push_back("momenta carry the overall coupling kappa = " + cfg.kappa);
    try {
        const LagrangianSpec spec = make_spec(cfg);
        const Emitter emit(cfg.expr_limit, cfg.emit == Emit::Latex, outcome);
        if (command == "derive") {
            r["derive"] = derive(cfg, spec, emit, warnings);
        } else if (command == "constraints") {
            r["constraints"] = constraints(cfg, spec, emit, warnings);
        } else if (command == "hamiltonian") {
            r["hamiltonian"] = hamiltonian(cfg, spec, emit, warnings);
        } else if (command == "verify") {
            bool failed = false;
            r["verify"] = verify(cfg, spec, failed);
            if (failed) outcome.exit_code = kExitVerification;
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
    } catch (const ConfigError& e) {
        outcome.exit_code = kExitConfig;
        outcome.error = e.what();
    } catch (const InapplicableCase& e) {
        outcome.exit_code = kExitInapplicable;
        outcome.error = e.what();
    }
    if (!outcome.error.empty()) r["error"] = outcome.error;
    r["warnings"] = warnings;
    return outcome;
}

std::string render(const Outcome& outcome, Emit emit) {
    if (emit == Emit::Json) return outcome.report.dump(2) + "\n";
    std::ostringstream os;
    if (emit == Emit::Text) {
        render_text(outcome.report, "", os);
        return os.str();
    }
    os << "% " << outcome.report["schema"].get<std::string>() << " v" << kSchemaVersion << ", command "
       << outcome.report["command"].get<std::string>() << "\n";
    for (const auto& w : outcome.report["warnings"]) os << "% warning: " << w.get<std::string>() << "\n";
    if (!outcome.error.empty()) os << "% error: " << outcome.error << "\n";
    if (!outcome.equations.empty()) {
        os << "\\begin{align*}\n";
        for (std::size_t i = 0; i < outcome.equations.size(); ++i)
            os << "  " << outcome.equations[i].first << " &= " << outcome.equations[i].second
               << (i + 1 < outcome.equations.size() ? " \\\\" : "") << "\n";
        os << "\\end{align*}\n";
    }
    return os.str();
}

}  // namespace horn::cli
