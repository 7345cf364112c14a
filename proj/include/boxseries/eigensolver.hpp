#pragma once

// Eigenvalues of the boxed problem as zeros of the truncated boundary
// polynomial. Brackets come from a uniform sign scan, refinement is plain
// bisection on exact rational endpoints, and the Psi' zero supplies a lower
// bound to pair with the Psi zero.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "boxseries/digits.hpp"
#include "boxseries/series.hpp"

namespace boxseries {

struct Bracket {
    ExactRational a;
    ExactRational c;
    Parity parity = Parity::Even;

    bool degenerate() const { return a == c; }
};

struct SolveConfig {
    ExactRational L{8};
    std::size_t terms = 250;  // I, non-vanishing terms
    ScalarMode mode = ScalarMode::exact();
    ExactRational b{0};
    unsigned n_bisect = 0;  // 0 selects ceil(target_digits * log2(10)) + 10
    unsigned target_digits = 25;
    std::size_t stability_step = 0;  // Delta I; 0 disables stabilization
    std::size_t max_terms = 0;       // stabilization ceiling; 0 means 8 * terms
    bool bound_pair = true;

    void validate() const {
        if (L.sign() <= 0) throw ValidationError("wall position L must be positive");
        if (terms < 2) throw ValidationError("truncation order must be at least 2 terms");
        if (b.sign() < 0) throw ValidationError("Gaussian prefactor parameter b must be non-negative");
        if (target_digits < 1) throw ValidationError("target digits must be at least 1");
        if (!mode.is_exact() && mode.precision() < 10)
            throw ValidationError("decimal precision must be at least 10 digits");
    }

    unsigned bisection_steps() const {
        if (n_bisect) return n_bisect;
        return static_cast<unsigned>(std::ceil(target_digits * std::log2(10.0))) + 10;
    }

    std::size_t terms_ceiling() const { return max_terms ? max_terms : 8 * terms; }
};

/// Sign oracle for one (parity, I, L, mode) combination.
class BoundaryProbe {
public:
    BoundaryProbe(const EffectiveODE& ode, Parity parity, std::size_t terms, const ExactRational& wall,
                  const ScalarMode& mode)
        : impl_(make(ode, parity, terms, wall, mode)) {}

    std::optional<int> sign(const ExactRational& energy, BoundaryQuantity what) const {
        return std::visit([&](const auto& ev) { return ev.sign(energy, what); }, impl_);
    }

    /// Polynomial factor and its derivative at the wall, as exact rationals
    /// (the decimal backend's value is converted exactly).
    BoundarySample<ExactRational> sample(const ExactRational& energy) const {
        return std::visit(
            [&](const auto& ev) {
                auto s = ev.evaluate(energy);
                return BoundarySample<ExactRational>{to_exact(s.value), to_exact(s.derivative)};
            },
            impl_);
    }

private:
    using Impl = std::variant<BoundaryEvaluator<ExactField>, BoundaryEvaluator<DecimalField>>;

    static Impl make(const EffectiveODE& ode, Parity parity, std::size_t terms, const ExactRational& wall,
                     const ScalarMode& mode) {
        if (mode.is_exact()) return BoundaryEvaluator<ExactField>(ode, parity, terms, wall);
        return BoundaryEvaluator<DecimalField>(ode, parity, terms, wall, DecimalField{mode.precision()});
    }

    Impl impl_;
};

// ---------------------------------------------------------------------------
// Scan
// ---------------------------------------------------------------------------

struct ScanPoint {
    ExactRational energy;
    std::optional<int> sign;  // nullopt: unresolved at the working precision
};

inline std::vector<ScanPoint> scan_signs(const BoundaryProbe& probe, const ExactRational& e_min,
                                         const ExactRational& e_max, std::size_t steps) {
    if (!(e_min < e_max)) throw ValidationError("scan range must satisfy E_min < E_max");
    if (steps < 2) throw ValidationError("scan needs at least 2 steps");
    std::vector<ScanPoint> pts;
    pts.reserve(steps + 1);
    const ExactRational h = (e_max - e_min) / ExactRational(static_cast<long>(steps));
    for (std::size_t k = 0; k <= steps; ++k) {
        ExactRational e = e_min + h * ExactRational(static_cast<long>(k));
        pts.push_back({e, probe.sign(e, BoundaryQuantity::Value)});
    }
    return pts;
}

/// Adjacent resolved grid points with opposite signs. Unresolved points are
/// skipped over; an exact zero on the grid yields a degenerate bracket.
inline std::vector<Bracket> brackets_from_scan(const std::vector<ScanPoint>& pts, Parity parity) {
    std::vector<Bracket> out;
    const ScanPoint* prev = nullptr;
    for (const auto& p : pts) {
        if (!p.sign) continue;
        if (*p.sign == 0) {
            out.push_back({p.energy, p.energy, parity});
            prev = nullptr;
            continue;
        }
        if (prev && *prev->sign != *p.sign) out.push_back({prev->energy, p.energy, parity});
        prev = &p;
    }
    return out;
}

inline std::vector<Bracket> scan_brackets(const EffectiveODE& ode, const SolveConfig& config, Parity parity,
                                          const ExactRational& e_min, const ExactRational& e_max,
                                          std::size_t steps) {
    config.validate();
    BoundaryProbe probe(ode, parity, config.terms, config.L, config.mode);
    return brackets_from_scan(scan_signs(probe, e_min, e_max, steps), parity);
}

// ---------------------------------------------------------------------------
// Bisection
// ---------------------------------------------------------------------------

struct BisectResult {
    ExactRational root;     // midpoint of the final interval
    ExactRational epsilon;  // final interval width, (c - a) / 2^steps
    ExactRational lo;
    ExactRational hi;
    unsigned steps = 0;
    bool exact_zero = false;         // a trial energy hit the zero exactly
    bool precision_limited = false;  // stopped early on an unresolved sign
};

inline BisectResult bisect(const BoundaryProbe& probe, const Bracket& bracket, unsigned n,
                           BoundaryQuantity what = BoundaryQuantity::Value) {
    if (bracket.c < bracket.a) throw ValidationError("bracket endpoints out of order");
    if (n < 1) throw ValidationError("bisection needs at least one step");
    BisectResult r;
    r.lo = bracket.a;
    r.hi = bracket.c;
    auto finish_at = [&](const ExactRational& e) {
        r.lo = r.hi = r.root = e;
        r.epsilon = ExactRational(0);
        r.exact_zero = true;
        return r;
    };

    auto sa = probe.sign(bracket.a, what);
    if (!sa) throw NonConvergenceError("sign at bracket endpoint " + decimal_string(bracket.a, 12) +
                                       " not resolved at working precision");
    if (*sa == 0) return finish_at(bracket.a);
    if (bracket.degenerate()) throw BracketError("degenerate bracket is not a zero");
    auto sc = probe.sign(bracket.c, what);
    if (!sc) throw NonConvergenceError("sign at bracket endpoint " + decimal_string(bracket.c, 12) +
                                       " not resolved at working precision");
    if (*sc == 0) return finish_at(bracket.c);
    if (*sa == *sc) throw BracketError("no sign change between " + decimal_string(bracket.a, 12) + " and " +
                                       decimal_string(bracket.c, 12));

    const ExactRational half(1, 2);
    for (; r.steps < n; ++r.steps) {
        ExactRational mid = (r.lo + r.hi) * half;
        auto sm = probe.sign(mid, what);
        if (!sm) {
            r.precision_limited = true;
            break;
        }
        if (*sm == 0) {
            ++r.steps;
            return finish_at(mid);
        }
        (*sm == *sa ? r.lo : r.hi) = std::move(mid);
    }
    r.epsilon = r.hi - r.lo;
    r.root = (r.lo + r.hi) * half;
    return r;
}

inline BisectResult bisect(const EffectiveODE& ode, const SolveConfig& config, const Bracket& bracket,
                           BoundaryQuantity what = BoundaryQuantity::Value) {
    config.validate();
    BoundaryProbe probe(ode, bracket.parity, config.terms, config.L, config.mode);
    return bisect(probe, bracket, config.bisection_steps(), what);
}

/// Fractional digits resolved by an interval of width eps.
inline unsigned resolved_fraction_digits(const ExactRational& eps, unsigned fallback) {
    if (eps.is_zero()) return fallback;
    long e = detail::decimal_exponent(eps);
    return e >= -1 ? 0u : static_cast<unsigned>(-e - 1);
}

/// True when both interval ends round to the same `digits` significant digits.
inline bool certified_to(const BisectResult& r, unsigned digits) {
    return agree_significant(r.lo, r.hi, digits);
}

// ---------------------------------------------------------------------------
// Bound pair
// ---------------------------------------------------------------------------

struct BoundPair {
    BisectResult upper;  // zero of Psi
    BisectResult lower;  // zero of Psi'
    Bracket derivative_bracket;
};

/// Psi' bracket near a level: the level's own bracket if Psi' changes sign
/// across it, else windows of the same width stepping away from it.
inline Bracket derivative_bracket(const BoundaryProbe& probe, const Bracket& level, unsigned max_widen = 16) {
    ExactRational w = level.c - level.a;
    if (w.is_zero()) w = abs(level.a) / ExactRational(1000) + ExactRational(1, 1000);
    auto s = [&](const ExactRational& e) { return probe.sign(e, BoundaryQuantity::Derivative); };
    auto sa = s(level.a);
    auto sc = s(level.c);
    if (sa && *sa == 0) return {level.a, level.a, level.parity};
    if (sc && *sc == 0) return {level.c, level.c, level.parity};
    if (sa && sc && *sa != *sc) return {level.a, level.c, level.parity};
    for (unsigned k = 1; k <= max_widen; ++k) {
        ExactRational lo = level.a - w * ExactRational(static_cast<long>(k));
        auto sl = s(lo);
        if (sl && sc && *sl != *sc) return {lo, level.c, level.parity};
        ExactRational hi = level.c + w * ExactRational(static_cast<long>(k));
        auto sh = s(hi);
        if (sh && sa && *sh != *sa) return {level.a, hi, level.parity};
    }
    throw BracketError("no sign change of the boundary derivative near " + decimal_string(level.a, 12));
}

inline BoundPair bound_pair(const EffectiveODE& ode, const SolveConfig& config, const Bracket& bracket) {
    config.validate();
    BoundaryProbe probe(ode, bracket.parity, config.terms, config.L, config.mode);
    BoundPair bp;
    bp.upper = bisect(probe, bracket, config.bisection_steps(), BoundaryQuantity::Value);
    bp.derivative_bracket = derivative_bracket(probe, bracket);
    // keep the resolution of both zeros comparable
    unsigned n = config.bisection_steps();
    ExactRational wv = bracket.c - bracket.a;
    ExactRational wd = bp.derivative_bracket.c - bp.derivative_bracket.a;
    while (!wv.is_zero() && wd > wv) {
        wd = wd / ExactRational(2);
        ++n;
    }
    bp.lower = bisect(probe, bp.derivative_bracket, n, BoundaryQuantity::Derivative);
    return bp;
}

// ---------------------------------------------------------------------------
// Levels
// ---------------------------------------------------------------------------

struct EigenLevel {
    int N = -1;
    Parity parity = Parity::Even;
    int parity_index = -1;
    std::string energy;  // certified digits only
    std::string upper;   // Psi zero
    std::string lower;   // Psi' zero (empty without a bound pair)
    unsigned matched_digits = 0;  // fractional digits in `energy`
    ExactRational upper_exact;
    ExactRational lower_exact;
    ExactRational epsilon;
    std::size_t terms = 0;  // I actually used
    unsigned n_bisect = 0;
    bool bound_pair = false;
    bool precision_limited = false;
};

namespace detail {

inline EigenLevel level_from_bisection(const BisectResult& r, std::size_t terms, unsigned n, unsigned target) {
    EigenLevel lv;
    const unsigned frac = resolved_fraction_digits(r.epsilon, target + 10);
    DigitMatch m = matched_digits(fixed_string(r.lo, frac + 2), fixed_string(r.hi, frac + 2));
    lv.energy = m.prefix;
    lv.matched_digits = m.count;
    lv.upper = fixed_string(r.root, frac);
    lv.upper_exact = r.root;
    lv.lower_exact = r.root;
    lv.epsilon = r.epsilon;
    lv.terms = terms;
    lv.n_bisect = n;
    lv.precision_limited = r.precision_limited;
    return lv;
}

inline EigenLevel level_from_pair(const BoundPair& bp, std::size_t terms, unsigned n, unsigned target) {
    EigenLevel lv;
    const ExactRational eps = bp.upper.epsilon < bp.lower.epsilon ? bp.lower.epsilon : bp.upper.epsilon;
    const unsigned frac = resolved_fraction_digits(eps, target + 10);
    lv.upper = fixed_string(bp.upper.root, frac);
    lv.lower = fixed_string(bp.lower.root, frac);
    // digits shared by every point between the two enclosures
    const ExactRational& lo = bp.lower.lo < bp.upper.lo ? bp.lower.lo : bp.upper.lo;
    const ExactRational& hi = bp.upper.hi < bp.lower.hi ? bp.lower.hi : bp.upper.hi;
    DigitMatch m = matched_digits(fixed_string(hi, frac + 2), fixed_string(lo, frac + 2));
    lv.energy = m.prefix;
    lv.matched_digits = m.count;
    lv.upper_exact = bp.upper.root;
    lv.lower_exact = bp.lower.root;
    lv.epsilon = eps;
    lv.terms = terms;
    lv.n_bisect = n;
    lv.bound_pair = true;
    lv.precision_limited = bp.upper.precision_limited || bp.lower.precision_limited;
    return lv;
}

}  // namespace detail

struct StabilizedLevel {
    std::size_t terms_final = 0;
    EigenLevel level;
    std::vector<std::pair<std::size_t, std::string>> history;  // (I, rounded root)
};

/// Bisects at I, I + dI, ... until two consecutive runs agree on
/// `target_digits` significant digits. The reported I is the first of the
/// agreeing pair and the energy carries only the agreed digits.
inline StabilizedLevel stabilize_truncation(const EffectiveODE& ode, const SolveConfig& config,
                                            const Bracket& bracket, unsigned target_digits) {
    config.validate();
    if (config.stability_step < 1) throw ValidationError("stability step must be at least 1");
    if (target_digits < 1) throw ValidationError("target digits must be at least 1");
    const unsigned n = config.bisection_steps();
    StabilizedLevel out;
    std::optional<std::string> prev;
    BisectResult prev_result;
    std::size_t prev_terms = 0;
    for (std::size_t terms = config.terms; terms <= config.terms_ceiling(); terms += config.stability_step) {
        BoundaryProbe probe(ode, bracket.parity, terms, config.L, config.mode);
        BisectResult r;
        try {
            r = bisect(probe, bracket, n);
        } catch (const BracketError&) {
            // bracket not yet valid at this truncation
            prev.reset();
            continue;
        } catch (const NonConvergenceError&) {
            prev.reset();
            continue;
        }
        std::optional<std::string> cur;
        if (certified_to(r, target_digits)) cur = decimal_string(r.root, target_digits);
        out.history.emplace_back(terms, cur ? *cur : decimal_string(r.root, std::max(1u, target_digits)) + "?");
        if (cur && prev && *cur == *prev) {
            out.terms_final = prev_terms;
            out.level = detail::level_from_bisection(prev_result, prev_terms, n, target_digits);
            out.level.energy = *prev;
            return out;
        }
        prev = cur;
        prev_result = r;
        prev_terms = terms;
    }
    throw NonConvergenceError("energy did not stabilize to " + std::to_string(target_digits) +
                              " digits below I = " + std::to_string(config.terms_ceiling()));
}

/// Solves one bracketed level: optional truncation stabilization, then the
/// bound pair (or a single bisection) at the resulting I.
inline EigenLevel solve_level(const EffectiveODE& ode, const SolveConfig& config, const Bracket& bracket) {
    config.validate();
    SolveConfig cfg = config;
    if (config.stability_step > 0) cfg.terms = stabilize_truncation(ode, config, bracket, config.target_digits).terms_final;
    EigenLevel lv;
    if (cfg.bound_pair) {
        lv = detail::level_from_pair(bound_pair(ode, cfg, bracket), cfg.terms, cfg.bisection_steps(),
                                     cfg.target_digits);
    } else {
        lv = detail::level_from_bisection(bisect(ode, cfg, bracket), cfg.terms, cfg.bisection_steps(),
                                          cfg.target_digits);
    }
    lv.parity = bracket.parity;
    return lv;
}

namespace detail {

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

struct EnergyRange {
    ExactRational e_min;
    ExactRational e_max;
    std::size_t steps = 64;
};

/// Lowest value of nu V on a grid over [-L, L], from the ODE coefficients.
inline ExactRational potential_floor(const EffectiveODE& ode, const ExactRational& wall) {
    const ExactRational mu = ExactRational(-1) / ode.w[0].beta;
    std::vector<ExactRational> c;
    for (const auto& wk : ode.w) c.push_back(wk.alpha * mu);
    const Polynomial v{std::move(c)};
    const double l = wall.to_double();
    double lowest = eval_potential(v, 0.0);
    for (int k = -400; k <= 400; ++k) lowest = std::min(lowest, eval_potential(v, l * k / 400.0));
    return ExactRational(static_cast<long>(std::floor(lowest)) - 1);
}

/// (nu V(L) - V_floor) / (E - V_floor): how far the wall sits above a level,
/// with energies measured from the bottom of the potential on [-L, L].
inline double wall_ratio(const HamiltonianSpec& h, const ExactRational& wall, const ExactRational& energy) {
    const Polynomial v = h.shifted_potential();
    const double l = wall.to_double();
    double lowest = eval_potential(v, 0.0);
    for (int k = -400; k <= 400; ++k) lowest = std::min(lowest, eval_potential(v, l * k / 400.0));
    const double nu = h.nu.to_double();
    const double top = nu * std::max(eval_potential(v, l), eval_potential(v, -l));
    return (top - nu * lowest) / (energy.to_double() - nu * lowest);
}

/// Brackets for both parities over the range, merged in energy order.
inline std::vector<Bracket> merged_brackets(const EffectiveODE& ode, const SolveConfig& config,
                                            const EnergyRange& range, unsigned jobs = 1) {
    std::vector<Bracket> found[2];
    detail::parallel_for(2, jobs, [&](std::size_t p) {
        found[p] = scan_brackets(ode, config, static_cast<Parity>(p), range.e_min, range.e_max, range.steps);
    });
    std::vector<Bracket> all = found[0];
    all.insert(all.end(), found[1].begin(), found[1].end());
    std::stable_sort(all.begin(), all.end(), [](const Bracket& x, const Bracket& y) {
        return x.a + x.c < y.a + y.c;
    });
    return all;
}

/// Lowest `count` levels. Without an explicit range the window starts just
/// below the potential minimum and doubles until enough brackets appear.
inline std::vector<EigenLevel> solve_spectrum(const EffectiveODE& ode, const SolveConfig& config,
                                              std::size_t count, std::optional<EnergyRange> range = std::nullopt,
                                              unsigned jobs = 1) {
    config.validate();
    if (!ode.is_even())
        throw ValidationError("potential is not even-symmetric after the shift; parity solving needs V(-q) = V(q)");
    if (count < 1) throw ValidationError("at least one level must be requested");

    std::vector<Bracket> brackets;
    if (range) {
        brackets = merged_brackets(ode, config, *range, jobs);
    } else {
        EnergyRange r{potential_floor(ode, config.L), ExactRational(0), 64};
        ExactRational width(4);
        for (int attempt = 0; attempt < 12; ++attempt, width = width * ExactRational(2)) {
            r.e_max = r.e_min + width;
            brackets = merged_brackets(ode, config, r, jobs);
            if (brackets.size() >= count + 1) break;
        }
    }
    if (brackets.size() < count)
        throw NonConvergenceError("found only " + std::to_string(brackets.size()) + " levels in the scan range");
    brackets.resize(count);

    std::vector<EigenLevel> levels(count);
    detail::parallel_for(count, jobs, [&](std::size_t i) { levels[i] = solve_level(ode, config, brackets[i]); });

    std::vector<int> per_parity(2, 0);
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return levels[x].upper_exact < levels[y].upper_exact; });
    std::vector<EigenLevel> sorted;
    for (std::size_t k = 0; k < count; ++k) {
        EigenLevel lv = levels[order[k]];
        lv.N = static_cast<int>(k);
        lv.parity_index = per_parity[static_cast<int>(lv.parity)]++;
        sorted.push_back(std::move(lv));
    }
    return sorted;
}

}  // namespace boxseries
