#pragma once

// Numeric backends: an exact rational type and a fixed-precision decimal
// type that carries a propagated error bound (significance arithmetic).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include <gmpxx.h>
#include <mpfr.h>

#include "boxseries/errors.hpp"

namespace boxseries {

// ---------------------------------------------------------------------------
// ExactRational
// ---------------------------------------------------------------------------

/// Exact rational number, always in lowest terms with a positive
/// denominator. Arithmetic never rounds.
class ExactRational {
public:
    ExactRational() = default;
    ExactRational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    ExactRational(long num, long den) {
        if (den == 0) throw ValidationError("zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    ExactRational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw ValidationError("zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    explicit ExactRational(const mpz_class& v) : q_(v) {}
    explicit ExactRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    const mpq_class& raw() const { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    ExactRational& operator+=(const ExactRational& o) { q_ += o.q_; return *this; }
    ExactRational& operator-=(const ExactRational& o) { q_ -= o.q_; return *this; }
    ExactRational& operator*=(const ExactRational& o) { q_ *= o.q_; return *this; }
    ExactRational& operator/=(const ExactRational& o) {
        if (o.is_zero()) throw ValidationError("division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
    friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
    friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
    friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
    friend ExactRational operator-(const ExactRational& a) { return ExactRational(mpq_class(-a.q_)); }

    friend bool operator==(const ExactRational& a, const ExactRational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const ExactRational& a, const ExactRational& b) { return a.q_ != b.q_; }
    friend bool operator<(const ExactRational& a, const ExactRational& b) { return a.q_ < b.q_; }
    friend bool operator>(const ExactRational& a, const ExactRational& b) { return a.q_ > b.q_; }
    friend bool operator<=(const ExactRational& a, const ExactRational& b) { return a.q_ <= b.q_; }
    friend bool operator>=(const ExactRational& a, const ExactRational& b) { return a.q_ >= b.q_; }

    /// "p/q", or "p" when the denominator is 1.
    std::string to_fraction_string() const { return q_.get_str(); }

    double to_double() const { return q_.get_d(); }

private:
    mpq_class q_;
};

inline ExactRational abs(const ExactRational& x) { return x.sign() < 0 ? -x : x; }

inline ExactRational pow(const ExactRational& base, unsigned long e) {
    mpz_class n, d;
    mpz_pow_ui(n.get_mpz_t(), base.raw().get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), base.raw().get_den_mpz_t(), e);
    return ExactRational(n, d);
}

inline ExactRational pow10(long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    return e < 0 ? ExactRational(mpz_class(1), p) : ExactRational(p);
}

inline std::optional<int> certified_sign(const ExactRational& x) { return x.sign(); }

/// Parses "0.001", "-4.2", "1/2", "3", "2.5e-3" exactly.
inline ExactRational rational_from_decimal_text(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    auto parse_decimal = [&](std::string_view s) -> ExactRational {
        s = trim(s);
        std::string original(s);
        bool negative = false;
        if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
            negative = s.front() == '-';
            s.remove_prefix(1);
        }
        std::string digits;
        long frac_len = 0;
        bool seen_point = false;
        bool any_digit = false;
        std::size_t i = 0;
        for (; i < s.size(); ++i) {
            char c = s[i];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                digits.push_back(c);
                any_digit = true;
                if (seen_point) ++frac_len;
            } else if (c == '.' && !seen_point) {
                seen_point = true;
            } else {
                break;
            }
        }
        if (!any_digit) throw ValidationError("malformed decimal literal '" + original + "'");
        long exponent = 0;
        if (i < s.size()) {
            if (s[i] != 'e' && s[i] != 'E')
                throw ValidationError("malformed decimal literal '" + original + "'");
            ++i;
            std::string_view ex = s.substr(i);
            bool eneg = false;
            if (!ex.empty() && (ex.front() == '+' || ex.front() == '-')) {
                eneg = ex.front() == '-';
                ex.remove_prefix(1);
            }
            if (ex.empty() || ex.size() > 6 ||
                !std::all_of(ex.begin(), ex.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                throw ValidationError("malformed exponent in '" + original + "'");
            exponent = std::stol(std::string(ex));
            if (eneg) exponent = -exponent;
        }
        ExactRational v(mpz_class(digits, 10));
        v *= pow10(exponent - frac_len);
        return negative ? -v : v;
    };

    text = trim(text);
    if (text.empty()) throw ValidationError("empty numeric literal");
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text);
    ExactRational num = parse_decimal(text.substr(0, slash));
    ExactRational den = parse_decimal(text.substr(slash + 1));
    if (den.is_zero()) throw ValidationError("zero denominator in '" + std::string(text) + "'");
    return num / den;
}

// ---------------------------------------------------------------------------
// Decimal rendering (shared by both backends; BigDecimal renders its exact
// binary value through ExactRational).
// ---------------------------------------------------------------------------

namespace detail {

// floor(log10(a)) + 1 for a > 0, i.e. 10^(e-1) <= a < 10^e.
inline long decimal_exponent(const ExactRational& a) {
    long bits_num = static_cast<long>(mpz_sizeinbase(a.raw().get_num_mpz_t(), 2));
    long bits_den = static_cast<long>(mpz_sizeinbase(a.raw().get_den_mpz_t(), 2));
    long e = static_cast<long>(std::floor((bits_num - bits_den) * 0.30102999566398120));
    while (pow10(e) <= a) ++e;
    while (pow10(e - 1) > a) --e;
    return e;
}

// round-half-away-from-zero of a non-negative rational to an integer
inline mpz_class round_half_up(const ExactRational& a) {
    mpz_class twice = 2 * a.raw().get_num() + a.raw().get_den();
    mpz_class den = 2 * a.raw().get_den();
    mpz_class out;
    mpz_fdiv_q(out.get_mpz_t(), twice.get_mpz_t(), den.get_mpz_t());
    return out;
}

inline std::string place_point(const std::string& digits, long int_digits, bool negative) {
    std::string out = negative ? "-" : "";
    if (int_digits <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-int_digits), '0');
        out += digits;
    } else if (int_digits < static_cast<long>(digits.size())) {
        out += digits.substr(0, static_cast<std::size_t>(int_digits));
        out += '.';
        out += digits.substr(static_cast<std::size_t>(int_digits));
    } else {
        out += digits;
        out.append(static_cast<std::size_t>(int_digits) - digits.size(), '0');
    }
    return out;
}

}  // namespace detail

/// Correctly rounded (half away from zero) rendering with exactly `digits`
/// significant digits and no exponent.
inline std::string decimal_string(const ExactRational& value, unsigned digits) {
    if (digits == 0) throw ValidationError("decimal_string needs at least one digit");
    if (value.is_zero()) return digits == 1 ? "0" : "0." + std::string(digits - 1, '0');
    ExactRational a = abs(value);
    long e = detail::decimal_exponent(a);
    mpz_class n = detail::round_half_up(a * pow10(static_cast<long>(digits) - e));
    if (n >= mpz_class(pow10(digits).numerator())) {
        ++e;
        n = detail::round_half_up(a * pow10(static_cast<long>(digits) - e));
    }
    return detail::place_point(n.get_str(), e, value.sign() < 0);
}

/// Rounds to a fixed number of fractional digits ("0.50000", frac=5).
inline std::string fixed_string(const ExactRational& value, unsigned frac_digits) {
    ExactRational a = abs(value);
    mpz_class n = detail::round_half_up(a * pow10(frac_digits));
    std::string s = n.get_str();
    if (s.size() <= frac_digits) s.insert(0, frac_digits + 1 - s.size(), '0');
    std::string out = (value.sign() < 0 && n != 0) ? "-" : "";
    out += s.substr(0, s.size() - frac_digits);
    if (frac_digits > 0) out += "." + s.substr(s.size() - frac_digits);
    return out;
}

/// Short scientific rendering for diagnostics, e.g. "4.8e-49".
inline std::string scientific_string(const ExactRational& value, unsigned digits = 2) {
    if (value.is_zero()) return "0";
    ExactRational a = abs(value);
    long e = detail::decimal_exponent(a);
    mpz_class n = detail::round_half_up(a * pow10(static_cast<long>(digits) - e));
    if (n >= mpz_class(pow10(digits).numerator())) {
        ++e;
        n = detail::round_half_up(a * pow10(static_cast<long>(digits) - e));
    }
    std::string s = n.get_str();
    std::string out = value.sign() < 0 ? "-" : "";
    out += s.substr(0, 1);
    if (s.size() > 1) out += "." + s.substr(1);
    out += "e" + std::to_string(e - 1);
    return out;
}

// ---------------------------------------------------------------------------
// BigDecimal
// ---------------------------------------------------------------------------

/// Arbitrary-precision number with `digits` decimal digits of working
/// precision and a rigorous first-order bound on its absolute error.
///
/// Each operation rounds to nearest at ceil(digits * log2 10) bits, so a
/// single rounding contributes at most 10^-digits relative error; the bound
/// `error()` accumulates these plus the propagated input errors. The number
/// of digits actually guaranteed is `guaranteed_digits()`, which drops when
/// cancellation occurs. Signs are only trusted when |value| > error.
class BigDecimal {
public:
    static constexpr mpfr_prec_t kBoundBits = 53;

    static mpfr_prec_t bits_for(unsigned digits) {
        return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623));
    }

    explicit BigDecimal(unsigned digits = 100) : digits_(digits) {
        mpfr_init2(v_, bits_for(digits_));
        mpfr_init2(e_, kBoundBits);
        mpfr_set_zero(v_, 1);
        mpfr_set_zero(e_, 1);
    }

    BigDecimal(long value, unsigned digits) : BigDecimal(digits) {
        int inexact = mpfr_set_si(v_, value, MPFR_RNDN);
        if (inexact != 0) add_rounding_error();
    }

    BigDecimal(const ExactRational& value, unsigned digits) : BigDecimal(digits) {
        mpfr_set_q(v_, value.raw().get_mpq_t(), MPFR_RNDN);
        // exact representation error |value - v|
        ExactRational diff = abs(value - to_exact());
        if (!diff.is_zero()) {
            mpfr_set_q(e_, diff.raw().get_mpq_t(), MPFR_RNDU);
        }
    }

    BigDecimal(const BigDecimal& o) : digits_(o.digits_) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_init2(e_, kBoundBits);
        mpfr_set(v_, o.v_, MPFR_RNDN);
        mpfr_set(e_, o.e_, MPFR_RNDU);
    }
    BigDecimal(BigDecimal&& o) noexcept : digits_(o.digits_) {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_init2(e_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
        mpfr_swap(e_, o.e_);
    }
    BigDecimal& operator=(const BigDecimal& o) {
        if (this != &o) {
            digits_ = o.digits_;
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
            mpfr_set(e_, o.e_, MPFR_RNDU);
        }
        return *this;
    }
    BigDecimal& operator=(BigDecimal&& o) noexcept {
        digits_ = o.digits_;
        mpfr_swap(v_, o.v_);
        mpfr_swap(e_, o.e_);
        return *this;
    }
    ~BigDecimal() {
        mpfr_clear(v_);
        mpfr_clear(e_);
    }

    unsigned digits() const { return digits_; }
    mpfr_srcptr value_ptr() const { return v_; }
    mpfr_srcptr error_ptr() const { return e_; }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }

    /// Sign of the stored value, ignoring the error bound.
    int raw_sign() const { return mpfr_sgn(v_); }

    /// Exact value of the stored binary number.
    ExactRational to_exact() const {
        if (mpfr_zero_p(v_)) return ExactRational(0);
        mpz_class m;
        mpfr_exp_t ex = mpfr_get_z_2exp(m.get_mpz_t(), v_);
        ExactRational r(m);
        if (ex >= 0) {
            mpz_class p;
            mpz_mul_2exp(p.get_mpz_t(), mpz_class(1).get_mpz_t(), static_cast<mp_bitcnt_t>(ex));
            return r * ExactRational(p);
        }
        mpz_class p;
        mpz_mul_2exp(p.get_mpz_t(), mpz_class(1).get_mpz_t(), static_cast<mp_bitcnt_t>(-ex));
        return r / ExactRational(p);
    }

    ExactRational error_exact() const {
        BigDecimal tmp(16);
        mpfr_set_prec(tmp.v_, kBoundBits);
        mpfr_set(tmp.v_, e_, MPFR_RNDU);
        return tmp.to_exact();
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    /// log10|value| as a double, valid far outside double's exponent range.
    double log10_abs() const {
        if (mpfr_zero_p(v_)) return -INFINITY;
        long ex = 0;
        double m = mpfr_get_d_2exp(&ex, v_, MPFR_RNDN);
        return std::log10(std::fabs(m)) + static_cast<double>(ex) * 0.30102999566398120;
    }

    double log10_error() const {
        if (mpfr_zero_p(e_)) return -INFINITY;
        long ex = 0;
        double m = mpfr_get_d_2exp(&ex, e_, MPFR_RNDU);
        return std::log10(m) + static_cast<double>(ex) * 0.30102999566398120;
    }

    /// Decimal digits certified by the error bound, in [0, digits()].
    unsigned guaranteed_digits() const {
        if (mpfr_zero_p(e_)) return digits_;
        if (mpfr_zero_p(v_)) return 0;
        double d = std::floor(log10_abs() - log10_error());
        if (!(d > 0)) return 0;
        return static_cast<unsigned>(std::min<double>(d, digits_));
    }

    BigDecimal& operator+=(const BigDecimal& o) { return add_sub(o, false); }
    BigDecimal& operator-=(const BigDecimal& o) { return add_sub(o, true); }

    BigDecimal& operator*=(const BigDecimal& o) {
        widen_to(o.digits_);
        // err = |b| ea + |a| eb + ea eb
        mpfr_ptr t = scratch(0);
        mpfr_ptr s = scratch(1);
        mpfr_abs(t, o.v_, MPFR_RNDU);
        mpfr_mul(t, t, e_, MPFR_RNDU);
        mpfr_abs(s, v_, MPFR_RNDU);
        mpfr_mul(s, s, o.e_, MPFR_RNDU);
        mpfr_add(t, t, s, MPFR_RNDU);
        mpfr_mul(s, e_, o.e_, MPFR_RNDU);
        mpfr_add(e_, t, s, MPFR_RNDU);
        if (mpfr_mul(v_, v_, o.v_, MPFR_RNDN) != 0) add_rounding_error();
        return *this;
    }

    BigDecimal& operator/=(const BigDecimal& o) {
        widen_to(o.digits_);
        mpfr_ptr t = scratch(0);
        mpfr_ptr s = scratch(1);
        // denominator lower bound |b| - eb
        mpfr_abs(s, o.v_, MPFR_RNDD);
        mpfr_sub(s, s, o.e_, MPFR_RNDD);
        if (mpfr_sgn(s) <= 0) {
            if (o.is_zero()) throw ValidationError("division by zero");
            mpfr_div(v_, v_, o.v_, MPFR_RNDN);
            mpfr_set_inf(e_, 1);
            return *this;
        }
        if (mpfr_div(v_, v_, o.v_, MPFR_RNDN) != 0) add_rounding_error();
        // err = (ea + |z| eb) / (|b| - eb)
        mpfr_abs(t, v_, MPFR_RNDU);
        mpfr_mul(t, t, o.e_, MPFR_RNDU);
        mpfr_add(t, t, e_, MPFR_RNDU);
        mpfr_div(e_, t, s, MPFR_RNDU);
        add_rounding_error();
        return *this;
    }

    BigDecimal& operator*=(long k) {
        mpfr_mul_ui(e_, e_, static_cast<unsigned long>(k < 0 ? -k : k), MPFR_RNDU);
        if (mpfr_mul_si(v_, v_, k, MPFR_RNDN) != 0) add_rounding_error();
        return *this;
    }
    BigDecimal& operator/=(long k) {
        if (k == 0) throw ValidationError("division by zero");
        mpfr_div_ui(e_, e_, static_cast<unsigned long>(k < 0 ? -k : k), MPFR_RNDU);
        if (mpfr_div_si(v_, v_, k, MPFR_RNDN) != 0) add_rounding_error();
        return *this;
    }

    friend BigDecimal operator+(BigDecimal a, const BigDecimal& b) { return a += b; }
    friend BigDecimal operator-(BigDecimal a, const BigDecimal& b) { return a -= b; }
    friend BigDecimal operator*(BigDecimal a, const BigDecimal& b) { return a *= b; }
    friend BigDecimal operator/(BigDecimal a, const BigDecimal& b) { return a /= b; }
    friend BigDecimal operator*(BigDecimal a, long k) { return a *= k; }
    friend BigDecimal operator/(BigDecimal a, long k) { return a /= k; }
    friend BigDecimal operator-(BigDecimal a) {
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        return a;
    }

    /// In-place fused update this += x * y, with the same error accounting
    /// as the two separate operations.
    BigDecimal& add_product(const BigDecimal& x, const BigDecimal& y) {
        BigDecimal p = x;
        p *= y;
        return *this += p;
    }

    friend bool operator<(const BigDecimal& a, const BigDecimal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigDecimal& a, const BigDecimal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }

    // Transcendentals used by the oracles.
    friend BigDecimal exp(const BigDecimal& x) {
        BigDecimal z(x.digits_);
        if (mpfr_exp(z.v_, x.v_, MPFR_RNDN) != 0) z.add_rounding_error();
        // d(exp) = exp(x) dx ; use |z| * (e^{ex} - 1) as a first-order-safe bound
        mpfr_ptr t = scratch(0);
        mpfr_expm1(t, x.e_, MPFR_RNDU);
        mpfr_ptr s = scratch(1);
        mpfr_abs(s, z.v_, MPFR_RNDU);
        mpfr_mul(t, t, s, MPFR_RNDU);
        mpfr_add(z.e_, z.e_, t, MPFR_RNDU);
        return z;
    }
    friend BigDecimal log(const BigDecimal& x) {
        if (x.raw_sign() <= 0) throw ValidationError("log of non-positive value");
        BigDecimal z(x.digits_);
        if (mpfr_log(z.v_, x.v_, MPFR_RNDN) != 0) z.add_rounding_error();
        mpfr_ptr t = scratch(0);
        mpfr_ptr s = scratch(1);
        mpfr_sub(s, x.v_, x.e_, MPFR_RNDD);
        if (mpfr_sgn(s) <= 0) {
            mpfr_set_inf(z.e_, 1);
            return z;
        }
        mpfr_div(t, x.e_, s, MPFR_RNDU);
        mpfr_add(z.e_, z.e_, t, MPFR_RNDU);
        return z;
    }
    friend BigDecimal sqrt(const BigDecimal& x) {
        if (x.raw_sign() < 0) throw ValidationError("sqrt of negative value");
        BigDecimal z(x.digits_);
        if (mpfr_sqrt(z.v_, x.v_, MPFR_RNDN) != 0) z.add_rounding_error();
        if (!mpfr_zero_p(x.e_)) {
            mpfr_ptr t = scratch(0);
            if (mpfr_zero_p(z.v_)) {
                mpfr_sqrt(t, x.e_, MPFR_RNDU);
            } else {
                mpfr_div(t, x.e_, z.v_, MPFR_RNDU);
            }
            mpfr_add(z.e_, z.e_, t, MPFR_RNDU);
        }
        return z;
    }
    static BigDecimal pi(unsigned digits) {
        BigDecimal z(digits);
        mpfr_const_pi(z.v_, MPFR_RNDN);
        z.add_rounding_error();
        return z;
    }

private:
    BigDecimal& add_sub(const BigDecimal& o, bool subtract) {
        widen_to(o.digits_);
        mpfr_add(e_, e_, o.e_, MPFR_RNDU);
        int inexact = subtract ? mpfr_sub(v_, v_, o.v_, MPFR_RNDN) : mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        if (inexact != 0) add_rounding_error();
        return *this;
    }

    void widen_to(unsigned other_digits) {
        if (other_digits > digits_) {
            digits_ = other_digits;
            mpfr_prec_round(v_, bits_for(digits_), MPFR_RNDN);
        }
    }

    // e += |v| * 2^-bits  (one rounding at working precision)
    void add_rounding_error() {
        mpfr_ptr t = scratch(2);
        mpfr_abs(t, v_, MPFR_RNDU);
        mpfr_div_2ui(t, t, static_cast<unsigned long>(bits_for(digits_)), MPFR_RNDU);
        mpfr_add(e_, e_, t, MPFR_RNDU);
    }

    static mpfr_ptr scratch(int slot) {
        struct Pool {
            mpfr_t s[3];
            Pool() {
                for (auto& x : s) mpfr_init2(x, kBoundBits);
            }
            ~Pool() {
                for (auto& x : s) mpfr_clear(x);
            }
        };
        thread_local Pool pool;
        return pool.s[slot];
    }

    unsigned digits_;
    mpfr_t v_;
    mpfr_t e_;
};

/// Sign when the error bound certifies it, otherwise nullopt.
inline std::optional<int> certified_sign(const BigDecimal& x) {
    if (mpfr_inf_p(x.error_ptr())) return std::nullopt;
    if (mpfr_zero_p(x.error_ptr())) return x.raw_sign();
    if (mpfr_cmpabs(x.value_ptr(), x.error_ptr()) > 0) return x.raw_sign();
    return std::nullopt;
}

inline BigDecimal abs(const BigDecimal& x) { return x.raw_sign() < 0 ? -x : x; }

inline std::string decimal_string(const BigDecimal& value, unsigned digits) {
    return decimal_string(value.to_exact(), digits);
}

inline std::string scientific_string(const BigDecimal& value, unsigned digits = 2) {
    if (value.is_zero()) return "0";
    // avoid materialising huge exact values: scale through log10
    double l = value.log10_abs();
    if (std::fabs(l) < 2000) return scientific_string(value.to_exact(), digits);
    long e = static_cast<long>(std::floor(l));
    double m = std::pow(10.0, l - static_cast<double>(e));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%.*fe%ld", value.raw_sign() < 0 ? "-" : "",
                  static_cast<int>(digits > 0 ? digits - 1 : 0), m, e);
    return buf;
}

// ---------------------------------------------------------------------------
// Modes and fields
// ---------------------------------------------------------------------------

/// Exact, or Decimal with a working precision of at least 10 digits.
class ScalarMode {
public:
    enum class Kind { Exact, Decimal };

    static constexpr unsigned kDefaultPrecision = 100;

    static ScalarMode exact() { return ScalarMode(Kind::Exact, 0); }
    static ScalarMode decimal(unsigned precision = kDefaultPrecision) {
        if (precision < 10) throw ValidationError("decimal precision must be at least 10 digits");
        return ScalarMode(Kind::Decimal, precision);
    }

    Kind kind() const { return kind_; }
    bool is_exact() const { return kind_ == Kind::Exact; }
    unsigned precision() const { return precision_; }
    std::string name() const { return is_exact() ? "exact" : "decimal"; }

    friend bool operator==(const ScalarMode&, const ScalarMode&) = default;

private:
    ScalarMode(Kind k, unsigned p) : kind_(k), precision_(p) {}
    Kind kind_;
    unsigned precision_;
};

/// Factories that lift exact constants into the active backend; templates
/// over a Field never need to know which backend they run on.
struct ExactField {
    using value_type = ExactRational;
    value_type make(const ExactRational& x) const { return x; }
    value_type make(long x) const { return ExactRational(x); }
    ScalarMode mode() const { return ScalarMode::exact(); }
};

struct DecimalField {
    using value_type = BigDecimal;
    unsigned digits = ScalarMode::kDefaultPrecision;
    value_type make(const ExactRational& x) const { return BigDecimal(x, digits); }
    value_type make(long x) const { return BigDecimal(x, digits); }
    ScalarMode mode() const { return ScalarMode::decimal(digits); }
};

using AnyScalar = std::variant<ExactRational, BigDecimal>;

inline AnyScalar to_mode(const ExactRational& value, const ScalarMode& mode) {
    if (mode.is_exact()) return value;
    return BigDecimal(value, mode.precision());
}

inline std::string decimal_string(const AnyScalar& value, unsigned digits) {
    return std::visit([digits](const auto& v) { return decimal_string(v, digits); }, value);
}

inline ExactRational to_exact(const ExactRational& x) { return x; }
inline ExactRational to_exact(const BigDecimal& x) { return x.to_exact(); }

/// Groups fractional digits in blocks of five separated by spaces.
inline std::string group_digits(const std::string& s, unsigned block = 5) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return s;
    std::string out = s.substr(0, dot + 1);
    std::string frac = s.substr(dot + 1);
    for (std::size_t i = 0; i < frac.size(); i += block) {
        if (i > 0) out += ' ';
        out += frac.substr(i, block);
    }
    return out;
}

inline std::string ungroup_digits(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

}  // namespace boxseries
