#pragma once

// Cross-checks that do not use the series solver: the perturbative and
// instanton functions of the double-well quantization condition through
// O(g^2), the leading tunneling splitting they imply, and a WKB tail.
//
// Near D = N + 1/2 the condition reduces at one-instanton order to
//   D - N - 1/2 = -+ (2/g)^(N+1/2) exp(-A/2) / (sqrt(2 pi) N!) = -+ delta,
// so E_{N,-} - E_{N,+} = 2 delta / (dD/dE).

#include <cmath>
#include <functional>
#include <string>

#include "boxseries/polynomial.hpp"
#include "boxseries/scalars.hpp"

namespace boxseries {

namespace detail {

inline void require_positive_g(const ExactRational& g) {
    if (g.sign() <= 0) throw ValidationError("coupling g must be positive");
}

}  // namespace detail

/// D(E, g) = E + g (3E^2 + 1/4) + g^2 (35E^3 + 25E/4)
template <typename T, typename Field>
T zj_D(const T& e, const ExactRational& g, const Field& f) {
    const T e2 = e * e;
    T first = e2 * 3L + f.make(ExactRational(1, 4));
    T second = e2 * e * 35L + e * f.make(ExactRational(25, 4));
    return e + first * f.make(g) + second * f.make(g * g);
}

/// dD/dE = 1 + g 6E + g^2 (105E^2 + 25/4)
template <typename T, typename Field>
T zj_dD_dE(const T& e, const ExactRational& g, const Field& f) {
    T second = e * e * 105L + f.make(ExactRational(25, 4));
    return f.make(1L) + e * f.make(ExactRational(6) * g) + second * f.make(g * g);
}

/// A(E, g) = 1/(3g) + g (17E^2 + 19/12) + g^2 (227E^3 + 187E/4)
template <typename T, typename Field>
T zj_A(const T& e, const ExactRational& g, const Field& f) {
    if (g.is_zero()) throw ValidationError("A(E, g) has a pole at g = 0");
    const T e2 = e * e;
    T first = e2 * 17L + f.make(ExactRational(19, 12));
    T second = e2 * e * 227L + e * f.make(ExactRational(187, 4));
    return f.make(ExactRational(1) / (ExactRational(3) * g)) + first * f.make(g) + second * f.make(g * g);
}

inline ExactRational zj_D(const ExactRational& e, const ExactRational& g) { return zj_D(e, g, ExactField{}); }
inline ExactRational zj_dD_dE(const ExactRational& e, const ExactRational& g) {
    return zj_dD_dE(e, g, ExactField{});
}
inline ExactRational zj_A(const ExactRational& e, const ExactRational& g) { return zj_A(e, g, ExactField{}); }

/// xi(g) = exp(-1/(6g)) / sqrt(pi g)
inline BigDecimal zj_xi(const ExactRational& g, unsigned digits = 50) {
    detail::require_positive_g(g);
    DecimalField f{digits};
    BigDecimal num = exp(f.make(ExactRational(-1) / (ExactRational(6) * g)));
    return num / sqrt(BigDecimal::pi(digits) * f.make(g));
}

/// The printed argument of the logarithm is -2/g; only the real part
/// ln(2/g) is returned and the i pi branch is left as metadata.
struct ZJLambda {
    BigDecimal real_part;
    bool negative_argument = true;
    std::string branch_note = "ln(-2/g) = ln(2/g) + i pi; imaginary part not carried";
};

inline ZJLambda zj_lambda(const ExactRational& g, unsigned digits = 50) {
    detail::require_positive_g(g);
    DecimalField f{digits};
    return {log(f.make(ExactRational(2) / g))};
}

/// Root of D(E, g) = N + 1/2 by Newton iteration from E = N + 1/2.
inline BigDecimal zj_perturbative_level(unsigned n, const ExactRational& g, unsigned digits = 60) {
    if (g.sign() < 0) throw ValidationError("coupling g must be non-negative");
    DecimalField f{digits};
    const ExactRational target = ExactRational(static_cast<long>(n)) + ExactRational(1, 2);
    if (g.is_zero()) return f.make(target);
    BigDecimal e = f.make(target);
    const BigDecimal t = f.make(target);
    const ExactRational tol = pow10(-static_cast<long>(digits) + 5);
    for (int it = 0; it < 200; ++it) {
        BigDecimal step = (zj_D(e, g, f) - t) / zj_dD_dE(e, g, f);
        e = e - step;
        if (abs(step.to_exact()) <= tol * (ExactRational(1) + abs(e.to_exact()))) return e;
    }
    throw NonConvergenceError("perturbative level iteration did not converge");
}

struct SplittingEstimate {
    unsigned N = 0;
    ExactRational g;
    BigDecimal e_pert;
    BigDecimal A_used;
    BigDecimal dD_dE_used;
    BigDecimal delta;    // half-splitting in D
    BigDecimal delta_E;  // 2 delta / (dD/dE)
    std::string note = "leading order, n=1";
};

inline SplittingEstimate zj_split_estimate(unsigned n, const ExactRational& g, unsigned digits = 60) {
    detail::require_positive_g(g);
    DecimalField f{digits};
    SplittingEstimate s;
    s.N = n;
    s.g = g;
    s.e_pert = zj_perturbative_level(n, g, digits);
    s.A_used = zj_A(s.e_pert, g, f);
    s.dD_dE_used = zj_dD_dE(s.e_pert, g, f);
    const ExactRational power = ExactRational(static_cast<long>(n)) + ExactRational(1, 2);
    BigDecimal log_pref = log(f.make(ExactRational(2) / g)) * f.make(power);
    mpz_class fact;
    mpz_fac_ui(fact.get_mpz_t(), n);
    BigDecimal denom = sqrt(BigDecimal::pi(digits) * 2L) * f.make(ExactRational(fact));
    s.delta = exp(log_pref - s.A_used / 2L) / denom;
    s.delta_E = s.delta * 2L / s.dD_dE_used;
    return s;
}

/// Oracle record compared against a solver splitting.
struct ZJCheckReport {
    unsigned N = 0;
    ExactRational g;
    std::string e_pert;
    std::string A;
    std::string dD_dE;
    std::string delta;
    std::string delta_E_estimate;
    std::string delta_E_computed;
    double relative_error = 0.0;
};

// ---------------------------------------------------------------------------
// WKB tail
// ---------------------------------------------------------------------------

struct WKBTail {
    double value = 0.0;
    double log10_value = 0.0;
    double turning_point = 0.0;
    double action = 0.0;  // integral of sqrt(m (V - E)) from q_t to q
};

/// (V(q) - E)^(-1/4) exp(-int_{q_t}^{q} sqrt(m (V - E)) dq'), with the
/// prefactor dropped when `unit_prefactor` is set. q_t is the turning point
/// nearest to q on its left.
inline WKBTail wkb_tail(const Polynomial& v, double energy, double q, double mass_factor = 2.0,
                        bool unit_prefactor = true) {
    if (mass_factor <= 0) throw ValidationError("mass factor must be positive");
    auto excess = [&](double x) { return eval_potential(v, x) - energy; };
    if (!(excess(q) > 0)) throw ValidationError("q is not in the classically forbidden region");

    const double span = 4.0 * std::max(1.0, std::fabs(q));
    const int scan = 40000;
    double right = q, left = q;
    bool found = false;
    for (int k = 1; k <= scan; ++k) {
        left = q - span * k / scan;
        if (excess(left) <= 0) {
            found = true;
            break;
        }
        right = left;
    }
    if (!found) throw BracketError("no turning point found left of q");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (left + right);
        (excess(mid) <= 0 ? left : right) = mid;
    }
    const double qt = 0.5 * (left + right);

    // q' = q_t + u^2 removes the square-root behaviour at the turning point
    const double umax = std::sqrt(q - qt);
    auto integrand = [&](double u) {
        double ex = std::max(0.0, excess(qt + u * u));
        return 2.0 * u * std::sqrt(mass_factor * ex);
    };
    auto simpson = [&](int panels) {
        const double h = umax / panels;
        double s = integrand(0.0) + integrand(umax);
        for (int i = 1; i < panels; ++i) s += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    double prev = simpson(64), action = prev;
    for (int panels = 128; panels <= (1 << 22); panels *= 2) {
        action = simpson(panels);
        if (std::fabs(action - prev) <= 1e-12 * std::fabs(action)) break;
        prev = action;
    }

    const double ex_q = excess(q);
    if (!unit_prefactor && ex_q <= 0) throw ValidationError("prefactor singular at the turning point");
    WKBTail t;
    t.turning_point = qt;
    t.action = action;
    t.log10_value = -action / std::log(10.0);
    if (!unit_prefactor) t.log10_value -= 0.25 * std::log10(ex_q);
    t.value = std::pow(10.0, t.log10_value);
    return t;
}

}  // namespace boxseries
