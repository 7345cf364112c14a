#pragma once

// Run configuration for the command-line tool: presets, key=value config
// files and flags are merged as plain string settings (later layers win),
// then validated into a RunConfig before anything is computed.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "boxseries.hpp"

namespace boxseries::cli {

using Settings = std::map<std::string, std::string>;

enum class ParitySelection { Even, Odd, Both };
enum class OutputFormat { Json, Csv, Text };

struct BenchCell {
    ExactRational b;
    std::optional<std::size_t> terms;  // nullopt: search with stabilization
    unsigned precision = 0;            // 0: exact mode
};

struct RunConfig {
    std::string preset;
    std::string potential_text;
    std::string variable;
    HamiltonianSpec hamiltonian;
    std::optional<ExactRational> g;
    SolveConfig solve;
    ParitySelection parity = ParitySelection::Both;
    std::optional<Bracket> bracket;  // parity filled per solve
    std::optional<EnergyRange> scan;
    std::size_t levels = 1;
    OutputFormat format = OutputFormat::Json;
    std::string out_path;
    std::string ledger_path;
    bool paper_style = false;
    unsigned jobs = 1;
    std::size_t level = 0;
    std::size_t points = 201;
    bool normalize = true;
    std::string reference_plus;
    std::string reference_minus;
    bool reference_only = false;
    std::vector<BenchCell> cells;
    std::string reference;  // bench reference energy
    Settings settings;      // merged source settings, for the record
};

inline const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "potential", "var", "mu", "nu", "g", "shift", "L", "I", "b", "mode", "precision", "parity",
        "bracket", "scan", "levels", "target-digits", "bisect-iters", "stability-step", "max-terms",
        "bound-pair", "out", "format", "ledger", "paper-style", "jobs", "level", "points", "normalize",
        "reference-plus", "reference-minus", "reference-only", "cells", "reference"};
    return keys;
}

inline const std::string kZJPlus =
    "0.49899545486210917168913083948192163682094724020809665329327869722013911513528505382944579845759959990673955175"
    "8472267802813069690601325259437728994365882552444017437127892797899793989220053606978041386525573028377235024167"
    "171";
inline const std::string kZJMinus =
    "0.49899545486210917168913083948192163682094724020809665329327869722013912983992959558037081227749924484825936743"
    "6475768328848353551134663063098233151885233080862284780527221010367282720476134001672248036552352410137981630458"
    "360";
inline const std::string kQuarticGround =
    "-20.6335767029477991499585548374315087653159460577355139057103114289292";

/// Settings for the shipped experiments.
inline Settings preset_settings(const std::string& name) {
    if (name == "harmonic")
        return {{"potential", "1/2*q^2"}, {"mu", "1/2"}, {"nu", "1"}, {"L", "8"}, {"I", "250"},
                {"mode", "exact"}, {"levels", "4"}, {"scan", "0,4,40"}, {"bisect-iters", "200"},
                {"target-digits", "25"}};
    if (name == "zj-dw")
        return {{"potential", "1/2*q^2*(1-q)^2"}, {"g", "1/1000"}, {"shift", "1/2"}, {"L", "3"}, {"I", "22000"},
                {"mode", "decimal"}, {"precision", "800"}, {"levels", "2"}, {"bracket", "0.4989,0.4991"},
                {"target-digits", "140"}, {"bound-pair", "false"}, {"reference-plus", kZJPlus},
                {"reference-minus", kZJMinus}};
    if (name == "quartic-dw")
        return {{"potential", "-10*x^2 + x^4"}, {"mu", "1"}, {"nu", "1"}, {"L", "8"}, {"I", "750"},
                {"mode", "decimal"}, {"precision", "100"}, {"levels", "4"}, {"scan", "-21,-12,64"},
                {"target-digits", "69"}, {"reference", kQuarticGround}};
    if (name == "pure-quartic")
        return {{"potential", "x^4"}, {"mu", "1"}, {"nu", "1"}, {"L", "3.5"}, {"I", "75"}, {"mode", "exact"},
                {"levels", "5"}, {"scan", "0,20,80"}, {"target-digits", "9"}};
    if (name == "x2x8")
        return {{"potential", "x^2 + x^8"}, {"mu", "1"}, {"nu", "1"}, {"L", "2.5"}, {"I", "125"},
                {"mode", "exact"}, {"levels", "5"}, {"scan", "0,40,160"}, {"target-digits", "9"}};
    throw ValidationError("unknown preset '" + name + "' (harmonic, zj-dw, quartic-dw, pure-quartic, x2x8)");
}

/// key=value lines; '#' starts a comment.
inline Settings parse_config_text(const std::string& text) {
    Settings s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string x) {
        const char* ws = " \t\r";
        x.erase(0, x.find_first_not_of(ws));
        x.erase(x.find_last_not_of(ws) + 1);
        return x;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        bool known = false;
        for (const auto& k : known_keys()) known = known || k == key;
        if (!known && key != "preset")
            throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        s[key] = trim(line.substr(eq + 1));
    }
    return s;
}

inline Settings read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline unsigned long parse_count(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ValidationError(key + " must be a non-negative integer, got '" + v + "'");
    try {
        return std::stoul(v);
    } catch (const std::exception&) {
        throw ValidationError(key + " out of range: '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ValidationError(key + " must be true or false, got '" + v + "'");
}

inline ExactRational parse_rational(const std::string& key, const std::string& v) {
    try {
        return rational_from_decimal_text(v);
    } catch (const ValidationError& e) {
        throw ValidationError(key + ": " + e.what());
    }
}

inline std::vector<BenchCell> parse_cells(const std::string& text) {
    std::vector<BenchCell> cells;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) continue;
        auto parts = split(item, ':');
        if (parts.size() != 3) throw ValidationError("bench cell '" + item + "' must be b:I:precision");
        BenchCell c;
        c.b = parse_rational("cells", parts[0]);
        if (parts[1] != "auto") c.terms = parse_count("cells", parts[1]);
        c.precision = parts[2] == "exact" ? 0u : static_cast<unsigned>(parse_count("cells", parts[2]));
        if (c.precision != 0 && c.precision < 10) throw ValidationError("bench cell precision must be >= 10");
        cells.push_back(c);
    }
    if (cells.empty()) throw ValidationError("bench needs at least one cell");
    return cells;
}

}  // namespace detail

/// Builds and validates a RunConfig. Nothing is computed here.
inline RunConfig build_run_config(const Settings& s) {
    using namespace detail;
    RunConfig rc;
    rc.settings = s;
    auto get = [&](const std::string& k) -> std::optional<std::string> {
        auto it = s.find(k);
        if (it == s.end()) return std::nullopt;
        return it->second;
    };
    if (auto p = get("preset")) rc.preset = *p;
    auto pot = get("potential");
    if (!pot || pot->empty()) throw ValidationError("no potential given (use --potential or --preset)");
    rc.potential_text = *pot;
    if (auto v = get("var")) rc.variable = *v;
    HamiltonianSpec& h = rc.hamiltonian;
    h.potential_text = rc.potential_text;
    h.potential = parse_potential(rc.potential_text,
                                  rc.variable.empty() ? std::nullopt : std::optional<std::string>(rc.variable));
    h.mu = ExactRational(1, 2);
    h.nu = ExactRational(1);
    if (auto g = get("g")) {
        rc.g = parse_rational("g", *g);
        if (rc.g->sign() <= 0) throw ValidationError("coupling g must be positive");
        h.mu = *rc.g / ExactRational(2);
        h.nu = ExactRational(1) / *rc.g;
    }
    if (auto v = get("mu")) h.mu = parse_rational("mu", *v);
    if (auto v = get("nu")) h.nu = parse_rational("nu", *v);
    if (auto v = get("shift")) h.shift = parse_rational("shift", *v);
    h.validate();

    SolveConfig& c = rc.solve;
    if (auto v = get("L")) c.L = parse_rational("L", *v);
    if (auto v = get("I")) c.terms = parse_count("I", *v);
    if (auto v = get("b")) c.b = parse_rational("b", *v);
    const std::string mode = get("mode").value_or("exact");
    if (mode == "exact") {
        c.mode = ScalarMode::exact();
    } else if (mode == "decimal") {
        unsigned p = ScalarMode::kDefaultPrecision;
        if (auto v = get("precision")) p = static_cast<unsigned>(parse_count("precision", *v));
        c.mode = ScalarMode::decimal(p);
    } else {
        throw ValidationError("mode must be exact or decimal, got '" + mode + "'");
    }
    if (auto v = get("target-digits")) c.target_digits = static_cast<unsigned>(parse_count("target-digits", *v));
    if (auto v = get("bisect-iters")) {
        c.n_bisect = static_cast<unsigned>(parse_count("bisect-iters", *v));
        if (c.n_bisect < 1) throw ValidationError("bisect-iters must be at least 1");
    }
    if (auto v = get("stability-step")) c.stability_step = parse_count("stability-step", *v);
    if (auto v = get("max-terms")) c.max_terms = parse_count("max-terms", *v);
    if (auto v = get("bound-pair")) c.bound_pair = parse_bool("bound-pair", *v);
    c.validate();

    if (auto v = get("parity")) {
        if (*v == "even") rc.parity = ParitySelection::Even;
        else if (*v == "odd") rc.parity = ParitySelection::Odd;
        else if (*v == "both") rc.parity = ParitySelection::Both;
        else throw ValidationError("parity must be even, odd or both");
    }
    if (auto v = get("bracket")) {
        auto parts = split(*v, ',');
        if (parts.size() != 2) throw ValidationError("bracket must be a,c");
        Bracket br{parse_rational("bracket", parts[0]), parse_rational("bracket", parts[1]), Parity::Even};
        if (!(br.a < br.c)) throw ValidationError("bracket must satisfy a < c");
        rc.bracket = br;
    }
    if (auto v = get("scan")) {
        auto parts = split(*v, ',');
        if (parts.size() != 3) throw ValidationError("scan must be min,max,steps");
        EnergyRange r{parse_rational("scan", parts[0]), parse_rational("scan", parts[1]),
                      parse_count("scan", parts[2])};
        if (!(r.e_min < r.e_max)) throw ValidationError("scan range must satisfy min < max");
        if (r.steps < 2) throw ValidationError("scan needs at least 2 steps");
        rc.scan = r;
    }
    if (auto v = get("levels")) {
        rc.levels = parse_count("levels", *v);
        if (rc.levels < 1) throw ValidationError("levels must be at least 1");
    }
    if (auto v = get("format")) {
        if (*v == "json") rc.format = OutputFormat::Json;
        else if (*v == "csv") rc.format = OutputFormat::Csv;
        else if (*v == "text") rc.format = OutputFormat::Text;
        else throw ValidationError("format must be json, csv or text");
    }
    if (auto v = get("out")) rc.out_path = *v;
    if (auto v = get("ledger")) rc.ledger_path = *v;
    if (auto v = get("paper-style")) rc.paper_style = parse_bool("paper-style", *v);
    if (auto v = get("jobs")) {
        rc.jobs = static_cast<unsigned>(parse_count("jobs", *v));
        if (rc.jobs < 1) throw ValidationError("jobs must be at least 1");
    }
    if (auto v = get("level")) rc.level = parse_count("level", *v);
    if (auto v = get("points")) {
        rc.points = parse_count("points", *v);
        if (rc.points < 2) throw ValidationError("points must be at least 2");
    }
    if (auto v = get("normalize")) rc.normalize = parse_bool("normalize", *v);
    if (auto v = get("reference-plus")) rc.reference_plus = ungroup_digits(*v);
    if (auto v = get("reference-minus")) rc.reference_minus = ungroup_digits(*v);
    if (auto v = get("reference-only")) rc.reference_only = parse_bool("reference-only", *v);
    if (auto v = get("reference")) rc.reference = ungroup_digits(*v);
    if (auto v = get("cells")) rc.cells = parse_cells(*v);
    for (const auto* ref : {&rc.reference_plus, &rc.reference_minus, &rc.reference})
        if (!ref->empty()) parse_rational("reference", *ref);
    return rc;
}

inline EffectiveODE effective_ode(const RunConfig& rc) { return build_effective_ode(rc.hamiltonian, rc.solve.b); }

}  // namespace boxseries::cli
