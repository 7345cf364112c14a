#pragma once

// Serialization of solver and oracle results: one JSON object per level,
// CSV with a header row, and an append-only JSON-lines ledger.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "run_config.hpp"

namespace boxseries::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string mode_name(const ScalarMode& m) { return m.name(); }

inline Json level_record(const EigenLevel& lv, const RunConfig& rc, const SolveConfig& cfg) {
    Json j;
    j["N"] = lv.N;
    j["parity"] = to_string(lv.parity);
    j["parity_index"] = lv.parity_index;
    j["energy"] = lv.energy;
    j["upper"] = lv.upper;
    j["lower"] = lv.lower;
    j["matched_digits"] = lv.matched_digits;
    j["L"] = cfg.L.to_fraction_string();
    j["I"] = lv.terms;
    j["b"] = cfg.b.to_fraction_string();
    j["mode"] = mode_name(cfg.mode);
    j["precision"] = cfg.mode.is_exact() ? 0u : cfg.mode.precision();
    j["n_bisect"] = lv.n_bisect;
    j["epsilon"] = lv.epsilon.is_zero() ? std::string("0") : scientific_string(lv.epsilon, 3);
    j["potential_text"] = rc.potential_text;
    j["mu"] = rc.hamiltonian.mu.to_fraction_string();
    j["nu"] = rc.hamiltonian.nu.to_fraction_string();
    j["shift"] = rc.hamiltonian.shift.to_fraction_string();
    return j;
}

inline Json oracle_record(const ZJCheckReport& r) {
    Json j;
    j["N"] = r.N;
    j["g"] = r.g.to_fraction_string();
    j["E_pert"] = r.e_pert;
    j["A"] = r.A;
    j["dD_dE"] = r.dD_dE;
    j["delta"] = r.delta;
    j["delta_E_estimate"] = r.delta_E_estimate;
    j["delta_E_computed"] = r.delta_E_computed;
    std::ostringstream rel;
    rel << std::setprecision(4) << r.relative_error;
    j["relative_error"] = rel.str();
    return j;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

/// Flat objects with identical keys to CSV, header first.
inline std::string to_csv(const std::vector<Json>& rows) {
    if (rows.empty()) return "";
    std::ostringstream out;
    bool first = true;
    for (auto it = rows.front().begin(); it != rows.front().end(); ++it) {
        out << (first ? "" : ",") << it.key();
        first = false;
    }
    out << "\n";
    for (const auto& r : rows) {
        first = true;
        for (auto it = r.begin(); it != r.end(); ++it) {
            out << (first ? "" : ",");
            first = false;
            out << csv_escape(it->is_string() ? it->get<std::string>() : it->dump());
        }
        out << "\n";
    }
    return out.str();
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string config_hash(const std::string& payload) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << h;
    return s.str();
}

inline Json settings_json(const Settings& s) {
    Json j = Json::object();
    for (const auto& [k, v] : s) {
        if (k == "out" || k == "ledger" || k == "jobs" || k == "format" || k == "paper-style") continue;
        j[k] = v;
    }
    return j;
}

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

inline void append_ledger(const std::string& path, const std::string& command, const RunConfig& rc,
                          const std::vector<Json>& levels, const std::vector<Json>& oracles) {
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    Json rec;
    rec["timestamp"] = utc_timestamp();
    rec["command"] = command;
    rec["config_hash"] = config_hash(command + settings_json(rc.settings).dump());
    rec["tool_version"] = kToolVersion;
    rec["levels"] = levels;
    rec["oracles"] = oracles;
    std::ofstream f(path, std::ios::app);
    if (!f) throw ValidationError("cannot open ledger '" + path + "'");
    f << rec.dump() << "\n";
}

}  // namespace boxseries::cli
