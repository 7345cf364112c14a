#pragma once

#include <string>
#include <utility>
#include <vector>

#include "boxseries/expression.hpp"
#include "boxseries/polynomial.hpp"

namespace boxseries {

/// H = -mu d^2/dq^2 + nu V(q), solved after the substitution q -> q + shift.
struct HamiltonianSpec {
    ExactRational mu{1, 2};
    ExactRational nu{1};
    Polynomial potential;
    ExactRational shift{0};
    std::string potential_text;  // provenance only

    /// Potential after the coordinate shift, i.e. V(q + shift).
    Polynomial shifted_potential() const { return shift_polynomial(potential, shift); }

    void validate() const {
        if (mu.sign() <= 0) throw ValidationError("kinetic coefficient mu must be positive");
        if (nu.is_zero()) throw ValidationError("potential scale nu must be nonzero");
    }

    /// -(1/2) d^2 + (1/2) q^2
    static HamiltonianSpec harmonic() {
        HamiltonianSpec h;
        h.mu = ExactRational(1, 2);
        h.nu = ExactRational(1);
        h.potential_text = "1/2*q^2";
        h.potential = parse_potential(h.potential_text);
        return h;
    }

    /// -(g/2) d^2 + (1/g) q^2 (1-q)^2 / 2, symmetrised by q -> q + 1/2.
    static HamiltonianSpec double_well_zj(const ExactRational& g) {
        if (g.sign() <= 0) throw ValidationError("coupling g must be positive");
        HamiltonianSpec h;
        h.mu = g / ExactRational(2);
        h.nu = ExactRational(1) / g;
        h.potential_text = "1/2*q^2*(1-q)^2";
        h.potential = parse_potential(h.potential_text);
        h.shift = ExactRational(1, 2);
        return h;
    }

    /// -d^2 + V with V given as text (the hbar = 1, m = 1/2 convention).
    static HamiltonianSpec unit_mass_half(const std::string& text) {
        HamiltonianSpec h;
        h.mu = ExactRational(1);
        h.nu = ExactRational(1);
        h.potential_text = text;
        h.potential = parse_potential(text);
        return h;
    }
};

/// Affine-in-energy coefficient w(E) = alpha + beta * E.
struct AffineCoefficient {
    ExactRational alpha;
    ExactRational beta;

    bool is_zero() const { return alpha.is_zero() && beta.is_zero(); }
    ExactRational at(const ExactRational& energy) const { return alpha + beta * energy; }
    friend bool operator==(const AffineCoefficient&, const AffineCoefficient&) = default;
};

/// psi''(q) = (sum_k w_k(E) q^k) psi(q), with psi = exp(-b q^2) * series.
struct EffectiveODE {
    std::vector<AffineCoefficient> w;
    ExactRational b{0};

    bool is_even() const {
        for (std::size_t k = 1; k < w.size(); k += 2)
            if (!w[k].is_zero()) return false;
        return true;
    }
};

inline EffectiveODE build_effective_ode(const HamiltonianSpec& h, const ExactRational& b = ExactRational(0)) {
    if (h.mu.is_zero()) throw ValidationError("kinetic coefficient mu must be nonzero");
    h.validate();
    if (b.sign() < 0) throw ValidationError("Gaussian prefactor parameter b must be non-negative");
    Polynomial v = h.shifted_potential();
    EffectiveODE ode;
    ode.b = b;
    std::size_t n = std::max<std::size_t>(v.coefficients().size(), 1);
    ode.w.resize(n);
    for (std::size_t k = 0; k < n; ++k) ode.w[k].alpha = h.nu * v.coefficient(k) / h.mu;
    ode.w[0].beta = ExactRational(-1) / h.mu;
    return ode;
}

}  // namespace boxseries
