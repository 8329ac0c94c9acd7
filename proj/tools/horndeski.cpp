#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "report.hpp"

using namespace horn::cli;

int main(int argc, char** argv) {
    CLI::App app{"Cubic Horndeski derivations: Legendre tables, constraint ladder, Hamilton equations and numeric checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> flags;
    auto add_flag = [&](CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
    };
    const std::vector<std::pair<std::string, std::string>> commands{
        {"derive", "Lagrangian, Legendre tables, projectability and the unified Hamiltonian"},
        {"constraints", "constraint ladder stages and graph codimension"},
        {"hamiltonian", "Hamiltonian and Hamilton equations (--case particular|general)"},
        {"verify", "numeric agreement with the independent oracles on a field configuration"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", config_path, "key=value config file; flags override its entries");
        add_flag(cmd, "--g2", "g2", "G2(phi, X) in the model DSL");
        add_flag(cmd, "--g3", "g3", "G3(phi, X) in the model DSL");
        add_flag(cmd, "--kappa", "kappa", "overall coupling as p/q");
        add_flag(cmd, "--chart", "chart", "partial or covariant");
        add_flag(cmd, "--emit", "emit", "json, latex or text");
        add_flag(cmd, "--tol", "tol", "verification tolerance");
        add_flag(cmd, "--seed", "seed", "random seed for sample points");
        add_flag(cmd, "--points", "points", "number of sample points");
        add_flag(cmd, "--field", "field", "field configuration: minkowski, minkowski_wave, flrw(H), schwarzschild(M), ...");
        add_flag(cmd, "--case", "case", "particular or general");
        add_flag(cmd, "--expr-limit", "expr_limit", "largest printed expression, in tree nodes");
        add_flag(cmd, "--out", "out", "write the report to this path instead of stdout");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = read_config_file(config_path);
        for (const auto& [key, value] : flags) set_option(cfg, key, value);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Outcome outcome;
    try {
        outcome = run_command(command, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";

    const std::string text = render(outcome, cfg.emit);
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out);
        if (!out) {
            std::cerr << "cannot write '" << cfg.out << "'\n";
            return kExitConfig;
        }
        out << text;
    }
    return outcome.exit_code;
}
