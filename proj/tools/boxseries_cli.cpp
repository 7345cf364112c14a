// boxseries: command-line front end.
//
//   boxseries solve --preset harmonic --format text --paper-style
//   boxseries scan --potential "x^4" --mu 1 --L 3.5 --I 75 --scan 0,20,80
//   boxseries zj-check --preset zj-dw --jobs 2
//
// Exit codes: 0 success, 2 validation error, 3 numerical non-convergence.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace boxseries;
using namespace boxseries::cli;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void print_error(const std::string& kind, const std::string& message) {
    Json e;
    e["error"]["kind"] = kind;
    e["error"]["message"] = message;
    std::cerr << e.dump() << "\n";
}

struct FlagSet {
    std::map<std::string, std::optional<std::string>> values;
    std::optional<std::string> preset;
    std::optional<std::string> config;
    bool paper_style = false;
    bool reference_only = false;

    void attach(CLI::App* app) {
        static const std::map<std::string, std::string> help = {
            {"potential", "polynomial potential, e.g. \"-10*x^2 + x^4\""},
            {"var", "variable name in the potential"},
            {"mu", "kinetic coefficient (H = -mu d^2 + nu V)"},
            {"nu", "potential scale"},
            {"g", "double-well coupling; sets mu = g/2, nu = 1/g"},
            {"shift", "coordinate shift q -> q + s"},
            {"L", "wall position"},
            {"I", "non-vanishing series terms"},
            {"b", "Gaussian prefactor parameter"},
            {"mode", "exact | decimal"},
            {"precision", "decimal digits in decimal mode"},
            {"parity", "even | odd | both"},
            {"bracket", "a,c energy bracket"},
            {"scan", "min,max,steps energy scan"},
            {"levels", "number of levels"},
            {"target-digits", "digits to certify"},
            {"bisect-iters", "bisection halvings"},
            {"stability-step", "truncation step for stabilization (0: off)"},
            {"max-terms", "truncation ceiling for stabilization"},
            {"bound-pair", "true | false: pair Psi and Psi' zeros"},
            {"out", "output file (default stdout)"},
            {"format", "json | csv | text"},
            {"ledger", "append a JSON-lines record to this file"},
            {"jobs", "concurrent levels or bench cells"},
            {"level", "wavefunction level index"},
            {"points", "wavefunction sample count"},
            {"normalize", "true | false"},
            {"reference-plus", "reference E0,+ digits for zj-check"},
            {"reference-minus", "reference E0,- digits for zj-check"},
            {"reference", "reference energy for bench"},
            {"cells", "bench matrix b:I:precision;... (I may be auto, precision exact)"}};
        for (const auto& [key, text] : help) app->add_option("--" + key, values[key], text);
        app->add_option("--preset", preset, "harmonic | zj-dw | quartic-dw | pure-quartic | x2x8");
        app->add_option("--config", config, "key=value config file");
        app->add_flag("--paper-style", paper_style, "group digits in blocks of five");
        app->add_flag("--reference-only", reference_only, "zj-check: compare references without solving");
    }

    Settings merged() const {
        Settings s;
        std::optional<std::string> p = preset;
        Settings file;
        if (config) {
            file = read_config_file(*config);
            if (!p && file.count("preset")) p = file["preset"];
        }
        if (p) {
            s = preset_settings(*p);
            s["preset"] = *p;
        }
        for (const auto& [k, v] : file) s[k] = v;
        for (const auto& [k, v] : values)
            if (v) s[k] = *v;
        if (paper_style) s["paper-style"] = "true";
        if (reference_only) s["reference-only"] = "true";
        return s;
    }
};

int run(const std::string& command, const FlagSet& flags) {
    RunConfig rc = build_run_config(flags.merged());
    CommandOutput out;
    if (command == "solve") out = cmd_solve(rc);
    else if (command == "scan") out = cmd_scan(rc);
    else if (command == "wavefunction") out = cmd_wavefunction(rc);
    else if (command == "zj-check") out = cmd_zj_check(rc);
    else if (command == "bench") out = cmd_bench(rc);

    if (rc.out_path.empty()) {
        std::cout << out.text;
    } else {
        std::ofstream f(rc.out_path);
        if (!f) throw ValidationError("cannot write '" + rc.out_path + "'");
        f << out.text;
    }
    if (!rc.ledger_path.empty()) append_ledger(rc.ledger_path, command, rc, out.levels, out.oracles);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boxed power-series eigenvalue solver"};
    app.require_subcommand(1);
    std::map<std::string, FlagSet> flags;
    const std::map<std::string, std::string> commands = {
        {"solve", "solve levels with bound pairs"},
        {"scan", "sign scan of the boundary value"},
        {"wavefunction", "tab-separated samples of a solved level"},
        {"zj-check", "splitting versus the instanton estimate"},
        {"bench", "precision / truncation / b matrix"}};
    for (const auto& [name, desc] : commands) flags[name].attach(app.add_subcommand(name, desc));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("validation", e.what());
        return kExitValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, flags[command]);
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return (e.kind() == ErrorKind::NonConvergence || e.kind() == ErrorKind::Bracket) ? kExitNumerical
                                                                                        : kExitValidation;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
}
