#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "boxseries/scalars.hpp"

namespace boxseries {

struct DigitMatch {
    unsigned count = 0;   // matched fractional digits
    std::string prefix;   // the common rounded value, e.g. "0.50000"
};

inline unsigned fractional_digits(const std::string& s) {
    auto dot = s.find('.');
    return dot == std::string::npos ? 0u : static_cast<unsigned>(s.size() - dot - 1);
}

/// Longest fractional length k at which both decimals round (half away
/// from zero) to the same k-digit value. The bound pair
/// 0.50000000000000000000000000143... / 0.49999999999999999999999999854...
/// agrees at k = 26: both round to 0.50000000000000000000000000.
inline DigitMatch matched_digits(const std::string& upper, const std::string& lower) {
    const std::string u = ungroup_digits(upper);
    const std::string l = ungroup_digits(lower);
    const ExactRational uv = rational_from_decimal_text(u);
    const ExactRational lv = rational_from_decimal_text(l);
    const unsigned kmax = std::min(fractional_digits(u), fractional_digits(l));
    if (uv == lv) return {kmax, fixed_string(uv, kmax)};
    for (unsigned k = kmax + 1; k-- > 0;) {
        std::string a = fixed_string(uv, k);
        if (a == fixed_string(lv, k)) return {k, a};
    }
    return {0, ""};
}

/// True when both values round to the same `digits` significant digits.
inline bool agree_significant(const ExactRational& x, const ExactRational& y, unsigned digits) {
    return decimal_string(x, digits) == decimal_string(y, digits);
}

/// Number of leading significant digits on which the two decimal strings
/// coincide character by character (sign and point must line up).
inline unsigned common_significant_prefix(const std::string& x, const std::string& y) {
    const std::string a = ungroup_digits(x);
    const std::string b = ungroup_digits(y);
    unsigned count = 0;
    bool started = false;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] != b[i]) break;
        if (a[i] >= '1' && a[i] <= '9') started = true;
        if (started && a[i] >= '0' && a[i] <= '9') ++count;
    }
    return count;
}

/// Significant digits in a decimal string: every digit from the first
/// nonzero one on.
inline unsigned significant_digit_count(const std::string& s) {
    unsigned count = 0;
    bool started = false;
    for (char c : s) {
        if (c < '0' || c > '9') continue;
        started = started || c != '0';
        if (started) ++count;
    }
    return count;
}

}  // namespace boxseries
