// First four levels of the boxed harmonic oscillator (L = 8, I = 250),
// upper and lower bounds and the matched digits.

#include <iostream>

#include "boxseries.hpp"

int main() {
    using namespace boxseries;
    const EffectiveODE ode = build_effective_ode(HamiltonianSpec::harmonic());
    SolveConfig cfg;
    cfg.L = ExactRational(8);
    cfg.terms = 250;
    cfg.n_bisect = 200;
    auto levels = solve_spectrum(ode, cfg, 4, EnergyRange{ExactRational(0), ExactRational(4), 40}, 4);
    for (const auto& lv : levels) {
        std::cout << "N=" << lv.N << " (" << to_string(lv.parity) << ")  E = " << group_digits(lv.energy) << "  ["
                  << lv.matched_digits << " digits]\n"
                  << "    E  " << group_digits(lv.upper.substr(0, 62)) << "\n"
                  << "    E' " << group_digits(lv.lower.substr(0, 62)) << "\n";
    }
}
