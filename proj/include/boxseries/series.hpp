#pragma once

// Truncated power-series solution of psi'' = (sum_k w_k(E) q^k) psi with
// psi(q) = exp(-b q^2) * sum_i a_i q^i. Substituting into the ODE gives, for
// i >= 2 (a_j = 0 for j < 0),
//
//   i (i-1) a_i = sum_k w_k(E) a_{i-2-k} + b (4i - 6) a_{i-2} - 4 b^2 a_{i-4}.
//
// For b = 0 this is the plain Taylor recurrence.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "boxseries/hamiltonian.hpp"
#include "boxseries/scalars.hpp"

namespace boxseries {

/// Even seeds a0 = 1, a1 = 0; odd seeds a0 = 0, a1 = 1.
enum class Parity { Even = 0, Odd = 1 };

inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

/// Highest coefficient index kept when `terms` non-vanishing terms are
/// retained for the given parity: a_0, a_2, ..., a_{2(terms-1)} (even) or
/// a_1, a_3, ..., a_{2 terms - 1} (odd).
inline std::size_t max_index(Parity parity, std::size_t terms) {
    return 2 * (terms - 1) + static_cast<std::size_t>(parity);
}

template <typename T>
struct TruncatedSeries {
    std::vector<T> coefficients;  // a_0 .. a_maxindex
    std::size_t terms = 0;        // retained non-vanishing terms (I)
    Parity parity = Parity::Even;
    T energy;
    ExactRational b;
};

namespace detail {

inline void check_terms(std::size_t terms) {
    if (terms < 2) throw ValidationError("truncation order must be at least 2 terms");
}

}  // namespace detail

template <typename Field>
TruncatedSeries<typename Field::value_type> compute_coefficients(const EffectiveODE& ode,
                                                                 const typename Field::value_type& energy,
                                                                 Parity parity, std::size_t terms,
                                                                 const Field& field) {
    using T = typename Field::value_type;
    detail::check_terms(terms);
    const std::size_t imax = max_index(parity, terms);
    const bool even = ode.is_even();
    const bool has_b = !ode.b.is_zero();

    std::vector<std::optional<T>> w(ode.w.size());
    for (std::size_t k = 0; k < ode.w.size(); ++k) {
        if (ode.w[k].is_zero()) continue;
        T v = field.make(ode.w[k].alpha);
        if (!ode.w[k].beta.is_zero()) v = v + field.make(ode.w[k].beta) * energy;
        w[k] = std::move(v);
    }
    const T four_b_sq = field.make(ExactRational(4) * ode.b * ode.b);

    TruncatedSeries<T> s{std::vector<T>(imax + 1, field.make(0L)), terms, parity, energy, ode.b};
    auto& a = s.coefficients;
    a[static_cast<std::size_t>(parity)] = field.make(1L);
    for (std::size_t i = 2; i <= imax; ++i) {
        if (even && ((i - static_cast<std::size_t>(parity)) % 2 != 0)) continue;
        T r = field.make(0L);
        for (std::size_t k = 0; k < w.size() && k + 2 <= i; ++k) {
            if (!w[k]) continue;
            const std::size_t j = i - 2 - k;
            if (even && ((j - static_cast<std::size_t>(parity)) % 2 != 0)) continue;
            r = r + *w[k] * a[j];
        }
        if (has_b) {
            r = r + field.make(ode.b * ExactRational(static_cast<long>(4 * i) - 6)) * a[i - 2];
            if (i >= 4) r = r - four_b_sq * a[i - 4];
        }
        a[i] = r / static_cast<long>(i * (i - 1));
    }
    return s;
}

/// Exact-mode convenience overload.
inline TruncatedSeries<ExactRational> compute_coefficients(const EffectiveODE& ode, const ExactRational& energy,
                                                           Parity parity, std::size_t terms) {
    return compute_coefficients(ode, energy, parity, terms, ExactField{});
}

/// Residual i(i-1) a_i - RHS of the recurrence for every i >= 2; all zero
/// for coefficients produced by compute_coefficients in exact mode.
inline std::vector<ExactRational> recurrence_residuals(const EffectiveODE& ode,
                                                       const TruncatedSeries<ExactRational>& s) {
    const auto& a = s.coefficients;
    auto at = [&](long j) { return j < 0 ? ExactRational(0) : a[static_cast<std::size_t>(j)]; };
    std::vector<ExactRational> res;
    for (std::size_t i = 2; i < a.size(); ++i) {
        ExactRational rhs(0);
        for (std::size_t k = 0; k < ode.w.size(); ++k)
            rhs += ode.w[k].at(s.energy) * at(static_cast<long>(i) - 2 - static_cast<long>(k));
        rhs += ode.b * ExactRational(static_cast<long>(4 * i) - 6) * at(static_cast<long>(i) - 2);
        rhs -= ExactRational(4) * ode.b * ode.b * at(static_cast<long>(i) - 4);
        res.push_back(ExactRational(static_cast<long>(i * (i - 1))) * a[i] - rhs);
    }
    return res;
}

/// Polynomial factor sum_i a_i L^i. The exp(-b L^2) prefactor is strictly
/// positive and never changes the sign, so root finding uses this alone.
template <typename T, typename Field>
T boundary_value(const TruncatedSeries<T>& s, const ExactRational& wall, const Field& field) {
    const T x = field.make(wall);
    T acc = field.make(0L);
    for (std::size_t i = s.coefficients.size(); i-- > 0;) acc = acc * x + s.coefficients[i];
    return acc;
}

/// d/dq of the polynomial factor at q = L: sum_i i a_i L^(i-1).
template <typename T, typename Field>
T boundary_derivative(const TruncatedSeries<T>& s, const ExactRational& wall, const Field& field) {
    const T x = field.make(wall);
    T acc = field.make(0L);
    for (std::size_t i = s.coefficients.size(); i-- > 1;)
        acc = acc * x + s.coefficients[i] * static_cast<long>(i);
    return acc;
}

inline ExactRational boundary_value(const TruncatedSeries<ExactRational>& s, const ExactRational& wall) {
    return boundary_value(s, wall, ExactField{});
}
inline ExactRational boundary_derivative(const TruncatedSeries<ExactRational>& s, const ExactRational& wall) {
    return boundary_derivative(s, wall, ExactField{});
}

/// Physical psi(L) = exp(-b L^2) * sum a_i L^i, and psi'(L) including the
/// -2 b L psi term, at `digits` decimal digits.
template <typename T>
std::pair<BigDecimal, BigDecimal> physical_boundary(const TruncatedSeries<T>& s, const ExactRational& wall,
                                                    unsigned digits) {
    DecimalField f{digits};
    BigDecimal poly = f.make(0L);
    BigDecimal dpoly = f.make(0L);
    if constexpr (std::is_same_v<T, ExactRational>) {
        poly = f.make(boundary_value(s, wall));
        dpoly = f.make(boundary_derivative(s, wall));
    } else {
        poly = boundary_value(s, wall, f);
        dpoly = boundary_derivative(s, wall, f);
    }
    if (s.b.is_zero()) return {poly, dpoly};
    BigDecimal damp = exp(f.make(-(s.b * wall * wall)));
    BigDecimal value = poly * damp;
    BigDecimal slope = dpoly * damp - f.make(ExactRational(2) * s.b * wall) * value;
    return {value, slope};
}

// ---------------------------------------------------------------------------
// Boundary evaluators used by the root finder.
// ---------------------------------------------------------------------------

enum class BoundaryQuantity { Value, Derivative };

template <typename T>
struct BoundarySample {
    T value;       // polynomial factor at the wall
    T derivative;  // its q-derivative at the wall
};

/// Streams the recurrence at each trial energy and evaluates at the wall.
template <typename Field>
class BoundaryEvaluator {
public:
    using value_type = typename Field::value_type;

    BoundaryEvaluator(EffectiveODE ode, Parity parity, std::size_t terms, ExactRational wall, Field field)
        : ode_(std::move(ode)), parity_(parity), terms_(terms), wall_(std::move(wall)), field_(field) {
        detail::check_terms(terms_);
        if (wall_.sign() <= 0) throw ValidationError("wall position L must be positive");
    }

    BoundarySample<value_type> evaluate(const ExactRational& energy) const {
        auto s = compute_coefficients(ode_, field_.make(energy), parity_, terms_, field_);
        return {boundary_value(s, wall_, field_), boundary_derivative(s, wall_, field_)};
    }

    /// Certified sign of the requested quantity; nullopt when the working
    /// precision does not resolve it.
    std::optional<int> sign(const ExactRational& energy, BoundaryQuantity what) const {
        auto s = compute_coefficients(ode_, field_.make(energy), parity_, terms_, field_);
        if (what == BoundaryQuantity::Value) return certified_sign(boundary_value(s, wall_, field_));
        return certified_sign(boundary_derivative(s, wall_, field_));
    }

    const Field& field() const { return field_; }

private:
    EffectiveODE ode_;
    Parity parity_;
    std::size_t terms_;
    ExactRational wall_;
    Field field_;
};

/// Exact evaluation without rational canonicalisation. With E = P/Q and a
/// common denominator D of the ODE constants, T = D Q, the coefficients are
/// a_i = N_i / (i! T^floor(i/2)) with integer N_i:
///
///   N_i = sum_j K_j N_{i-j} (i-2)!/(i-j)! T^(floor(i/2) - 1 - floor((i-j)/2)),
///
/// where K_j = T * (coefficient of a_{i-j} in the recurrence) is an integer.
/// The wall sum is then accumulated over a single common denominator, so
/// only its sign needs the numerator.
template <>
class BoundaryEvaluator<ExactField> {
public:
    using value_type = ExactRational;

    BoundaryEvaluator(EffectiveODE ode, Parity parity, std::size_t terms, ExactRational wall,
                      ExactField field = {})
        : ode_(std::move(ode)), parity_(parity), terms_(terms), wall_(std::move(wall)), field_(field) {
        detail::check_terms(terms_);
        if (wall_.sign() <= 0) throw ValidationError("wall position L must be positive");
        mpz_class d = 1;
        auto fold = [&d](const ExactRational& x) { mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.raw().get_den_mpz_t()); };
        for (const auto& wk : ode_.w) {
            fold(wk.alpha);
            fold(wk.beta);
        }
        fold(ode_.b);
        fold(ode_.b * ode_.b);
        den_ = d;
        for (const auto& wk : ode_.w) {
            alpha_.push_back((wk.alpha * ExactRational(d)).numerator());
            beta_.push_back((wk.beta * ExactRational(d)).numerator());
        }
        db_ = (ode_.b * ExactRational(d)).numerator();
        d4b2_ = (ExactRational(4) * ode_.b * ode_.b * ExactRational(d)).numerator();
    }

    BoundarySample<ExactRational> evaluate(const ExactRational& energy) const {
        Sums s = sums(energy, true);
        ExactRational value(s.value_num, s.den);
        ExactRational deriv(s.deriv_num * wall_.denominator(), s.den * wall_.numerator());
        return {value, deriv};
    }

    std::optional<int> sign(const ExactRational& energy, BoundaryQuantity what) const {
        const bool deriv = what == BoundaryQuantity::Derivative;
        Sums s = sums(energy, deriv);
        return deriv ? sgn(s.deriv_num) : sgn(s.value_num);
    }

    const ExactField& field() const { return field_; }

private:
    struct Sums {
        mpz_class value_num;
        mpz_class deriv_num;
        mpz_class den;
    };

    Sums sums(const ExactRational& energy, bool with_derivative) const {
        const std::size_t imax = max_index(parity_, terms_);
        const bool even = ode_.is_even();
        const bool has_b = !ode_.b.is_zero();
        const mpz_class& P = energy.raw().get_num();
        const mpz_class& Q = energy.raw().get_den();
        const mpz_class T = den_ * Q;

        const std::size_t nlag = ode_.w.size() + 2;  // lags 2 .. w.size()+1, plus lag 4 from b
        const std::size_t max_lag = std::max<std::size_t>(nlag, 5);
        std::vector<mpz_class> tpow(max_lag / 2 + 2);
        tpow[0] = 1;
        for (std::size_t e = 1; e < tpow.size(); ++e) tpow[e] = tpow[e - 1] * T;

        // energy-dependent lag multipliers (without the i-dependent b part)
        std::vector<mpz_class> kw(max_lag + 1);
        std::vector<bool> kw_nonzero(max_lag + 1, false);
        for (std::size_t k = 0; k < ode_.w.size(); ++k) {
            kw[k + 2] = alpha_[k] * Q + beta_[k] * P;
            kw_nonzero[k + 2] = kw[k + 2] != 0;
        }
        const mpz_class bq = db_ * Q;
        const mpz_class b2q = d4b2_ * Q;

        std::vector<mpz_class> n(imax + 1);
        n[static_cast<std::size_t>(parity_)] = 1;
        mpz_class term, k_ij;
        for (std::size_t i = 2; i <= imax; ++i) {
            if (even && ((i - static_cast<std::size_t>(parity_)) % 2 != 0)) continue;
            mpz_class acc = 0;
            for (std::size_t j = 2; j <= max_lag && j <= i; ++j) {
                const std::size_t src = i - j;
                if (n[src] == 0) continue;
                k_ij = (j < kw.size() && kw_nonzero[j]) ? kw[j] : mpz_class(0);
                if (has_b && j == 2) k_ij += bq * static_cast<long>(4 * i - 6);
                if (has_b && j == 4) k_ij -= b2q;
                if (k_ij == 0) continue;
                term = n[src] * k_ij;
                for (std::size_t t = 0; t + 2 < j; ++t) term *= static_cast<unsigned long>(i - 2 - t);
                const std::size_t e = i / 2 - 1 - src / 2;
                if (e > 0) term *= tpow[e];
                acc += term;
            }
            n[i] = std::move(acc);
        }

        const mpz_class& l = wall_.raw().get_num();
        const mpz_class& m = wall_.raw().get_den();
        mpz_class value = n[0];
        mpz_class deriv = 0;
        mpz_class lp = 1;
        for (std::size_t i = 1; i <= imax; ++i) {
            // r_{i-1} = m i T^(floor(i/2) - floor((i-1)/2))
            mpz_class r = m * static_cast<unsigned long>(i);
            if (i / 2 != (i - 1) / 2) r *= T;
            lp *= l;
            value *= r;
            if (with_derivative) deriv *= r;
            if (n[i] != 0) {
                term = n[i] * lp;
                value += term;
                if (with_derivative) deriv += term * static_cast<unsigned long>(i);
            }
        }
        mpz_class den;
        mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(imax));
        mpz_class tp;
        mpz_pow_ui(tp.get_mpz_t(), T.get_mpz_t(), static_cast<unsigned long>(imax / 2));
        mpz_class mp;
        mpz_pow_ui(mp.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(imax));
        den *= tp;
        den *= mp;
        return {value, deriv, den};
    }

    EffectiveODE ode_;
    Parity parity_;
    std::size_t terms_;
    ExactRational wall_;
    ExactField field_;
    mpz_class den_;
    std::vector<mpz_class> alpha_;
    std::vector<mpz_class> beta_;
    mpz_class db_;
    mpz_class d4b2_;
};

// ---------------------------------------------------------------------------
// Wavefunction sampling
// ---------------------------------------------------------------------------

struct WavefunctionSample {
    ExactRational q;
    BigDecimal psi;
};

namespace detail {

// Composite Simpson over uniformly spaced values; a trailing odd panel is
// handled with Simpson's 3/8 rule (or the trapezoid for a single panel).
inline BigDecimal simpson(const std::vector<BigDecimal>& f, const ExactRational& h, unsigned digits) {
    DecimalField fd{digits};
    const std::size_t panels = f.size() - 1;
    BigDecimal sum = fd.make(0L);
    if (panels == 1) return (f[0] + f[1]) * fd.make(h / ExactRational(2));
    std::size_t simpson_panels = panels % 2 == 0 ? panels : panels - 3;
    BigDecimal s = fd.make(0L);
    for (std::size_t i = 0; i + 2 <= simpson_panels; i += 2) s = s + f[i] + f[i + 1] * 4L + f[i + 2];
    sum = s * fd.make(h / ExactRational(3));
    if (simpson_panels != panels) {
        std::size_t i = simpson_panels;
        BigDecimal t = f[i] + f[i + 1] * 3L + f[i + 2] * 3L + f[i + 3];
        sum = sum + t * fd.make(ExactRational(3) * h / ExactRational(8));
    }
    return sum;
}

}  // namespace detail

/// Uniform samples of psi on [-L, L]; with `normalize` the Simpson estimate
/// of the integral of psi^2 over the box is scaled to 1.
template <typename T>
std::vector<WavefunctionSample> sample_wavefunction(const TruncatedSeries<T>& s, const ExactRational& wall,
                                                    std::size_t n_points, bool normalize, unsigned digits = 40) {
    if (n_points < 2) throw ValidationError("need at least 2 sample points");
    if (wall.sign() <= 0) throw ValidationError("wall position L must be positive");
    DecimalField f{digits};
    const ExactRational h = ExactRational(2) * wall / ExactRational(static_cast<long>(n_points - 1));
    std::vector<WavefunctionSample> out;
    out.reserve(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
        ExactRational q = -wall + h * ExactRational(static_cast<long>(k));
        BigDecimal poly = f.make(0L);
        if constexpr (std::is_same_v<T, ExactRational>) {
            poly = f.make(boundary_value(s, q));
        } else {
            BigDecimal x = f.make(q);
            for (std::size_t i = s.coefficients.size(); i-- > 0;) poly = poly * x + s.coefficients[i];
        }
        if (!s.b.is_zero()) poly = poly * exp(f.make(-(s.b * q * q)));
        out.push_back({q, poly});
    }
    if (normalize) {
        std::vector<BigDecimal> sq;
        sq.reserve(out.size());
        for (const auto& smp : out) sq.push_back(smp.psi * smp.psi);
        BigDecimal norm = detail::simpson(sq, h, digits);
        if (norm.raw_sign() <= 0) throw NonConvergenceError("wavefunction has zero norm on the grid");
        BigDecimal scale = f.make(1L) / sqrt(norm);
        for (auto& smp : out) smp.psi = smp.psi * scale;
    }
    return out;
}

}  // namespace boxseries
