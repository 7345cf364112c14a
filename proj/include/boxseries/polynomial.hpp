#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "boxseries/scalars.hpp"

namespace boxseries {

/// Dense polynomial with exact rational coefficients; index k holds the
/// coefficient of q^k. Trailing zeros are always trimmed, so the zero
/// polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<ExactRational> coefficients) : c_(std::move(coefficients)) { trim(); }
    Polynomial(std::initializer_list<ExactRational> coefficients) : c_(coefficients) { trim(); }

    static Polynomial constant(const ExactRational& v) { return Polynomial({v}); }
    static Polynomial monomial(std::size_t power, const ExactRational& coeff = ExactRational(1)) {
        std::vector<ExactRational> c(power + 1);
        c[power] = coeff;
        return Polynomial(std::move(c));
    }

    const std::vector<ExactRational>& coefficients() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    ExactRational coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : ExactRational(0); }
    ExactRational leading() const { return c_.empty() ? ExactRational(0) : c_.back(); }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator*=(const ExactRational& s) {
        for (auto& x : c_) x *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const ExactRational& s) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= ExactRational(-1); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<ExactRational> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i].is_zero()) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        }
        return Polynomial(std::move(c));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<ExactRational> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * ExactRational(static_cast<long>(k));
        return Polynomial(std::move(d));
    }

    /// "[0, 0, 1/2, -1, 1/2]"
    std::string to_string() const {
        std::string s = "[";
        for (std::size_t k = 0; k < c_.size(); ++k) {
            if (k) s += ", ";
            s += c_[k].to_fraction_string();
        }
        return s + "]";
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    std::vector<ExactRational> c_;
};

inline Polynomial pow(const Polynomial& p, unsigned e) {
    Polynomial result = Polynomial::constant(ExactRational(1));
    Polynomial base = p;
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return result;
}

/// Horner evaluation; exact when T is ExactRational.
template <typename T, typename Field>
T eval_potential(const Polynomial& p, const T& q, const Field& field) {
    T acc = field.make(ExactRational(0));
    const auto& c = p.coefficients();
    for (std::size_t k = c.size(); k-- > 0;) {
        acc = acc * q;
        acc = acc + field.make(c[k]);
    }
    return acc;
}

inline ExactRational eval_potential(const Polynomial& p, const ExactRational& q) {
    return eval_potential(p, q, ExactField{});
}

inline double eval_potential(const Polynomial& p, double q) {
    double acc = 0.0;
    const auto& c = p.coefficients();
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * q + c[k].to_double();
    return acc;
}

/// p(q + s), expanded with binomial coefficients.
inline Polynomial shift_polynomial(const Polynomial& p, const ExactRational& s) {
    const auto& c = p.coefficients();
    if (c.empty() || s.is_zero()) return p;
    std::vector<ExactRational> out(c.size());
    // (q + s)^k = sum_j C(k, j) s^(k-j) q^j
    std::vector<ExactRational> spow(c.size());
    spow[0] = ExactRational(1);
    for (std::size_t k = 1; k < c.size(); ++k) spow[k] = spow[k - 1] * s;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k].is_zero()) continue;
        mpz_class binom = 1;
        for (std::size_t j = 0; j <= k; ++j) {
            if (j > 0) {
                binom *= static_cast<unsigned long>(k - j + 1);
                binom /= static_cast<unsigned long>(j);
            }
            out[j] += c[k] * ExactRational(binom) * spow[k - j];
        }
    }
    return Polynomial(std::move(out));
}

/// True iff every odd-power coefficient is zero.
inline bool is_even_symmetric(const Polynomial& p) {
    const auto& c = p.coefficients();
    for (std::size_t k = 1; k < c.size(); k += 2)
        if (!c[k].is_zero()) return false;
    return true;
}

}  // namespace boxseries
