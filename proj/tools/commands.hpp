#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "records.hpp"
#include "run_config.hpp"

namespace boxseries::cli {

struct CommandOutput {
    std::string text;  // records in the requested format
    std::vector<Json> levels;
    std::vector<Json> oracles;
};

inline std::vector<Parity> selected_parities(ParitySelection p) {
    if (p == ParitySelection::Even) return {Parity::Even};
    if (p == ParitySelection::Odd) return {Parity::Odd};
    return {Parity::Even, Parity::Odd};
}

inline std::string show(const std::string& digits, bool paper_style) {
    return paper_style ? group_digits(digits) : digits;
}

/// Levels requested by the configuration: a given bracket is bisected once
/// per selected parity; otherwise both parities are scanned and merged.
inline std::vector<EigenLevel> solve_levels(const RunConfig& rc, const EffectiveODE& ode) {
    if (!ode.is_even())
        throw ValidationError("potential is not even-symmetric after the shift; parity solving needs V(-q) = V(q)");
    std::vector<Bracket> brackets;
    if (rc.bracket) {
        for (Parity p : selected_parities(rc.parity)) brackets.push_back({rc.bracket->a, rc.bracket->c, p});
    } else {
        EnergyRange range = rc.scan ? *rc.scan : EnergyRange{potential_floor(ode, rc.solve.L), ExactRational(0), 64};
        if (!rc.scan) range.e_max = range.e_min + ExactRational(64);
        std::vector<Bracket> all;
        for (Parity p : selected_parities(rc.parity)) {
            auto b = scan_brackets(ode, rc.solve, p, range.e_min, range.e_max, range.steps);
            all.insert(all.end(), b.begin(), b.end());
        }
        std::stable_sort(all.begin(), all.end(),
                         [](const Bracket& x, const Bracket& y) { return x.a + x.c < y.a + y.c; });
        if (all.size() < rc.levels)
            throw NonConvergenceError("found only " + std::to_string(all.size()) + " levels in the scan range");
        all.resize(rc.levels);
        brackets = std::move(all);
    }
    std::vector<EigenLevel> levels(brackets.size());
    boxseries::detail::parallel_for(brackets.size(), rc.jobs,
                         [&](std::size_t i) { levels[i] = solve_level(ode, rc.solve, brackets[i]); });
    std::stable_sort(levels.begin(), levels.end(),
                     [](const EigenLevel& x, const EigenLevel& y) { return x.upper_exact < y.upper_exact; });
    int per_parity[2] = {0, 0};
    for (std::size_t k = 0; k < levels.size(); ++k) {
        levels[k].N = static_cast<int>(k);
        levels[k].parity_index = per_parity[static_cast<int>(levels[k].parity)]++;
    }
    return levels;
}

inline std::string render_levels(const RunConfig& rc, const std::string& command, const std::vector<Json>& rows,
                                  const std::vector<Json>& oracles = {}) {
    if (rc.format == OutputFormat::Csv) return to_csv(rows.empty() ? oracles : rows);
    if (rc.format == OutputFormat::Text) {
        std::ostringstream s;
        for (const auto& r : rows) {
            s << "N=" << r["N"].get<int>() << " " << r["parity"].get<std::string>()
              << " E=" << show(r["energy"].get<std::string>(), rc.paper_style)
              << " matched=" << r["matched_digits"].get<unsigned>() << "\n";
            if (!r["upper"].get<std::string>().empty())
                s << "  upper " << show(r["upper"].get<std::string>(), rc.paper_style) << "\n";
            if (!r["lower"].get<std::string>().empty())
                s << "  lower " << show(r["lower"].get<std::string>(), rc.paper_style) << "\n";
        }
        for (const auto& o : oracles) s << o.dump(2) << "\n";
        return s.str();
    }
    Json doc;
    doc["command"] = command;
    doc["config"] = settings_json(rc.settings);
    doc["levels"] = rows;
    if (!oracles.empty()) doc["oracles"] = oracles;
    return doc.dump(2) + "\n";
}

inline CommandOutput cmd_solve(const RunConfig& rc) {
    const EffectiveODE ode = effective_ode(rc);
    CommandOutput out;
    for (const auto& lv : solve_levels(rc, ode)) out.levels.push_back(level_record(lv, rc, rc.solve));
    out.text = render_levels(rc, "solve", out.levels);
    return out;
}

inline CommandOutput cmd_scan(const RunConfig& rc) {
    if (!rc.scan) throw ValidationError("scan needs --scan min,max,steps");
    const EffectiveODE ode = effective_ode(rc);
    std::vector<Json> rows;
    std::vector<Json> found;
    for (Parity p : selected_parities(rc.parity)) {
        BoundaryProbe probe(ode, p, rc.solve.terms, rc.solve.L, rc.solve.mode);
        auto pts = scan_signs(probe, rc.scan->e_min, rc.scan->e_max, rc.scan->steps);
        for (const auto& pt : pts) {
            Json r;
            r["kind"] = "grid";
            r["parity"] = to_string(p);
            r["E"] = decimal_string(pt.energy, 12);
            r["sign"] = pt.sign ? std::to_string(*pt.sign) : std::string("?");
            r["value"] = scientific_string(probe.sample(pt.energy).value, 6);
            r["a"] = "";
            r["c"] = "";
            rows.push_back(r);
        }
        for (const auto& b : brackets_from_scan(pts, p)) {
            Json r;
            r["kind"] = "bracket";
            r["parity"] = to_string(p);
            r["E"] = "";
            r["sign"] = "";
            r["value"] = "";
            r["a"] = decimal_string(b.a, 12);
            r["c"] = decimal_string(b.c, 12);
            rows.push_back(r);
            found.push_back(r);
        }
    }
    CommandOutput out;
    if (rc.format == OutputFormat::Json) {
        Json doc;
        doc["command"] = "scan";
        doc["config"] = settings_json(rc.settings);
        doc["brackets"] = found;
        doc["grid"] = rows;
        out.text = doc.dump(2) + "\n";
    } else {
        out.text = to_csv(rows);
    }
    return out;
}

inline CommandOutput cmd_wavefunction(const RunConfig& rc) {
    const EffectiveODE ode = effective_ode(rc);
    RunConfig cfg = rc;
    cfg.levels = std::max(rc.levels, rc.level + 1);
    auto levels = solve_levels(cfg, ode);
    if (rc.level >= levels.size()) throw ValidationError("level " + std::to_string(rc.level) + " was not found");
    const EigenLevel& lv = levels[rc.level];
    const unsigned digits = rc.solve.mode.is_exact() ? 100u : rc.solve.mode.precision();
    DecimalField f{digits};
    auto series = compute_coefficients(ode, f.make(lv.upper_exact), lv.parity, lv.terms, f);
    auto samples = sample_wavefunction(series, rc.solve.L, rc.points, rc.normalize, digits);
    std::ostringstream s;
    for (const auto& smp : samples)
        s << decimal_string(smp.q, 12) << "\t" << scientific_string(smp.psi, 12) << "\n";
    CommandOutput out;
    out.text = s.str();
    out.levels.push_back(level_record(lv, rc, rc.solve));
    return out;
}

inline CommandOutput cmd_zj_check(const RunConfig& rc) {
    if (!rc.g) throw ValidationError("zj-check needs the coupling --g");
    const ExactRational g = *rc.g;
    const unsigned digits = 60;
    SplittingEstimate est = zj_split_estimate(0, g, digits);
    ZJCheckReport rep;
    rep.N = 0;
    rep.g = g;
    rep.e_pert = decimal_string(est.e_pert, 30);
    rep.A = decimal_string(est.A_used, 30);
    rep.dD_dE = decimal_string(est.dD_dE_used, 30);
    rep.delta = scientific_string(est.delta, 6);
    rep.delta_E_estimate = scientific_string(est.delta_E, 6);
    CommandOutput out;
    auto relative = [&](const ExactRational& computed) {
        ExactRational e = est.delta_E.to_exact();
        return abs(e - computed).to_double() / abs(computed).to_double();
    };
    if (!rc.reference_plus.empty() && !rc.reference_minus.empty()) {
        ExactRational d = rational_from_decimal_text(rc.reference_minus) - rational_from_decimal_text(rc.reference_plus);
        ZJCheckReport ref = rep;
        ref.delta_E_computed = scientific_string(d, 6);
        ref.relative_error = relative(d);
        out.oracles.push_back(oracle_record(ref));
    }
    if (!rc.reference_only) {
        RunConfig cfg = rc;
        cfg.parity = ParitySelection::Both;
        cfg.levels = 2;
        const EffectiveODE ode = effective_ode(cfg);
        auto levels = solve_levels(cfg, ode);
        if (levels.size() < 2 || levels[0].parity != Parity::Even || levels[1].parity != Parity::Odd)
            throw NonConvergenceError("lowest doublet not resolved as an even/odd pair");
        ExactRational d = levels[1].upper_exact - levels[0].upper_exact;
        ZJCheckReport solved = rep;
        solved.delta_E_computed = scientific_string(d, 6);
        solved.relative_error = relative(d);
        out.oracles.push_back(oracle_record(solved));
        for (const auto& lv : levels) out.levels.push_back(level_record(lv, cfg, cfg.solve));
    }
    if (out.oracles.empty()) throw ValidationError("zj-check has nothing to compare (reference-only without references)");
    out.text = render_levels(rc, "zj-check", out.levels, out.oracles);
    return out;
}

struct BenchResult {
    BenchCell cell;
    bool reached = false;
    unsigned digits = 0;  // certified digits that also agree with the reference, if any
    std::size_t terms = 0;
    double seconds = 0.0;
    std::string energy;
    std::string error;
};

inline BenchResult run_bench_cell(const RunConfig& rc, const BenchCell& cell, const Bracket& bracket) {
    BenchResult r;
    r.cell = cell;
    auto t0 = std::chrono::steady_clock::now();
    try {
        SolveConfig cfg = rc.solve;
        cfg.b = cell.b;
        cfg.mode = cell.precision ? ScalarMode::decimal(cell.precision) : ScalarMode::exact();
        const EffectiveODE ode = build_effective_ode(rc.hamiltonian, cell.b);
        if (cell.terms) {
            cfg.terms = *cell.terms;
            cfg.stability_step = 0;
            EigenLevel lv = solve_level(ode, cfg, bracket);
            r.terms = lv.terms;
            r.energy = lv.energy;
            r.digits = significant_digit_count(lv.energy);
        } else {
            if (cfg.stability_step == 0) cfg.stability_step = 5;
            auto st = stabilize_truncation(ode, cfg, bracket, cfg.target_digits);
            r.terms = st.terms_final;
            r.energy = st.level.energy;
            r.digits = cfg.target_digits;
        }
        if (!rc.reference.empty()) {
            const std::string ref = decimal_string(rational_from_decimal_text(rc.reference), rc.solve.target_digits);
            const std::string got = decimal_string(rational_from_decimal_text(r.energy), rc.solve.target_digits);
            r.reached = r.digits >= rc.solve.target_digits && ref == got;
        } else {
            r.reached = r.digits >= rc.solve.target_digits;
        }
    } catch (const Error& e) {
        r.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline CommandOutput cmd_bench(const RunConfig& rc) {
    if (rc.cells.empty()) throw ValidationError("bench needs --cells b:I:precision;...");
    if (!rc.bracket) throw ValidationError("bench needs --bracket a,c around the benchmarked level");
    Parity parity = rc.parity == ParitySelection::Odd ? Parity::Odd : Parity::Even;
    Bracket br{rc.bracket->a, rc.bracket->c, parity};
    std::vector<BenchResult> results(rc.cells.size());
    boxseries::detail::parallel_for(rc.cells.size(), rc.jobs,
                         [&](std::size_t i) { results[i] = run_bench_cell(rc, rc.cells[i], br); });
    CommandOutput out;
    std::vector<Json> rows;
    for (const auto& r : results) {
        Json j;
        j["b"] = r.cell.b.to_fraction_string();
        j["I"] = r.cell.terms ? std::to_string(*r.cell.terms) : std::string("auto");
        j["precision"] = r.cell.precision ? std::to_string(r.cell.precision) : std::string("exact");
        j["target_digits"] = rc.solve.target_digits;
        j["reached"] = r.reached;
        j["digits"] = r.digits;
        j["I_used"] = r.terms;
        std::ostringstream sec;
        sec << std::fixed << std::setprecision(3) << r.seconds;
        j["seconds"] = sec.str();
        j["energy"] = r.energy;
        j["error"] = r.error;
        rows.push_back(j);
    }
    out.levels = rows;
    if (rc.format == OutputFormat::Csv) {
        out.text = to_csv(rows);
    } else if (rc.format == OutputFormat::Text) {
        std::ostringstream s;
        s << std::left << std::setw(8) << "b" << std::setw(8) << "I" << std::setw(10) << "precision" << std::setw(9)
          << "reached" << std::setw(8) << "digits" << "seconds\n";
        for (const auto& j : rows)
            s << std::setw(8) << j["b"].get<std::string>() << std::setw(8) << j["I"].get<std::string>()
              << std::setw(10) << j["precision"].get<std::string>() << std::setw(9)
              << (j["reached"].get<bool>() ? "yes" : "no") << std::setw(8) << j["digits"].get<unsigned>()
              << j["seconds"].get<std::string>() << "\n";
        out.text = s.str();
    } else {
        Json doc;
        doc["command"] = "bench";
        doc["config"] = settings_json(rc.settings);
        doc["cells"] = rows;
        out.text = doc.dump(2) + "\n";
    }
    return out;
}

}  // namespace boxseries::cli
