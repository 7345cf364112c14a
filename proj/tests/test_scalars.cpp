#include <gtest/gtest.h>

#include <random>

#include "boxseries/scalars.hpp"

using namespace boxseries;

TEST(RationalFromText, DecimalsAreExact) {
    EXPECT_EQ(rational_from_decimal_text("0.001"), ExactRational(1, 1000));
    EXPECT_EQ(rational_from_decimal_text("1/2"), ExactRational(1, 2));
    EXPECT_EQ(rational_from_decimal_text("4.2"), ExactRational(21, 5));
    EXPECT_EQ(rational_from_decimal_text("-20.63"), ExactRational(-2063, 100));
    EXPECT_EQ(rational_from_decimal_text("2.5e-3"), ExactRational(1, 400));
    EXPECT_EQ(rational_from_decimal_text(" 3 "), ExactRational(3));
}

TEST(RationalFromText, RejectsMalformed) {
    EXPECT_THROW(rational_from_decimal_text(""), ValidationError);
    EXPECT_THROW(rational_from_decimal_text("1.2.3"), ValidationError);
    EXPECT_THROW(rational_from_decimal_text("abc"), ValidationError);
    EXPECT_THROW(rational_from_decimal_text("1/0"), ValidationError);
    EXPECT_THROW(rational_from_decimal_text("1e"), ValidationError);
}

TEST(DecimalString, SignificantDigits) {
    EXPECT_EQ(decimal_string(ExactRational(1, 3), 5), "0.33333");
    EXPECT_EQ(decimal_string(ExactRational(1, 2), 25), "0.5000000000000000000000000");
    EXPECT_EQ(decimal_string(ExactRational(1, 1000), 3), "0.00100");
    EXPECT_EQ(decimal_string(ExactRational(2, 3), 3), "0.667");
    EXPECT_EQ(decimal_string(ExactRational(-2063, 100), 3), "-20.6");
    EXPECT_EQ(decimal_string(ExactRational(9995, 1000), 3), "10.0");
}

TEST(DecimalString, FixedAndScientific) {
    EXPECT_EQ(fixed_string(ExactRational(1, 3), 4), "0.3333");
    EXPECT_EQ(fixed_string(ExactRational(-1, 2), 0), "-1");
    EXPECT_EQ(scientific_string(ExactRational(48, 100000), 2), "4.8e-4");
}

TEST(ToMode, ExactIsIdentity) {
    AnyScalar v = to_mode(ExactRational(1, 3), ScalarMode::exact());
    ASSERT_TRUE(std::holds_alternative<ExactRational>(v));
    EXPECT_EQ(std::get<ExactRational>(v), ExactRational(1, 3));
}

TEST(ToMode, DecimalRoundsToPrecision) {
    AnyScalar v = to_mode(ExactRational(1, 3), ScalarMode::decimal(10));
    EXPECT_EQ(decimal_string(v, 10), "0.3333333333");
    AnyScalar two = to_mode(ExactRational(2), ScalarMode::decimal(50));
    EXPECT_EQ(std::get<BigDecimal>(two).to_exact(), ExactRational(2));
    EXPECT_GE(std::get<BigDecimal>(two).guaranteed_digits(), 50u);
}

TEST(ToMode, PrecisionFloor) {
    EXPECT_THROW(ScalarMode::decimal(9), ValidationError);
    EXPECT_EQ(ScalarMode::decimal().precision(), 100u);
}

TEST(ScalarProperties, TerminatingRoundTrip) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        long num = static_cast<long>(rng() % 2000001) - 1000000;
        long scale = static_cast<long>(rng() % 9);
        ExactRational x = ExactRational(num) * pow10(-scale);
        std::string s = decimal_string(x, 30);
        EXPECT_EQ(rational_from_decimal_text(s), x) << s;
    }
}

TEST(ScalarProperties, DecimalModeRelativeError) {
    std::mt19937_64 rng(11);
    for (unsigned p : {10u, 25u, 100u}) {
        for (int k = 0; k < 100; ++k) {
            ExactRational x(static_cast<long>(rng() % 1000000) + 1, static_cast<long>(rng() % 999983) + 1);
            if (rng() % 2) x = -x;
            BigDecimal d(x, p);
            EXPECT_LE(abs(d.to_exact() - x), pow10(1 - static_cast<long>(p)) * abs(x));
            EXPECT_GE(d.error_exact(), abs(d.to_exact() - x));
        }
    }
}

TEST(ScalarProperties, ExactSignIsExact) {
    ExactRational tiny = pow10(-500);
    EXPECT_EQ(certified_sign(tiny), 1);
    EXPECT_EQ(certified_sign(-tiny), -1);
    EXPECT_EQ(certified_sign(ExactRational(0)), 0);
}

TEST(BigDecimal, ArithmeticTracksError) {
    const unsigned p = 30;
    BigDecimal third(ExactRational(1, 3), p);
    BigDecimal sum = third + third + third;
    EXPECT_TRUE(abs(sum.to_exact() - ExactRational(1)) <= sum.error_exact());
    BigDecimal prod = third * BigDecimal(3L, p);
    EXPECT_TRUE(abs(prod.to_exact() - ExactRational(1)) <= prod.error_exact());
    BigDecimal q = BigDecimal(1L, p) / BigDecimal(7L, p);
    EXPECT_TRUE(abs(q.to_exact() - ExactRational(1, 7)) <= q.error_exact());
    EXPECT_GE(q.guaranteed_digits(), p - 2);
}

TEST(BigDecimal, CancellationLosesCertifiedSign) {
    const unsigned p = 20;
    BigDecimal x(ExactRational(1) + pow10(-40), p);
    BigDecimal d = x - BigDecimal(1L, p);
    EXPECT_FALSE(certified_sign(d).has_value());
    BigDecimal y(ExactRational(1) + pow10(-10), p);
    EXPECT_EQ(certified_sign(y - BigDecimal(1L, p)), 1);
}

TEST(BigDecimal, Transcendentals) {
    const unsigned p = 40;
    BigDecimal e = exp(BigDecimal(1L, p));
    EXPECT_EQ(decimal_string(e, 30), "2.71828182845904523536028747135");
    EXPECT_EQ(decimal_string(BigDecimal::pi(p), 20), "3.1415926535897932385");
    EXPECT_EQ(decimal_string(sqrt(BigDecimal(2L, p)), 20), "1.4142135623730950488");
    EXPECT_EQ(decimal_string(log(BigDecimal(10L, p)), 20), "2.3025850929940456840");
}

TEST(DigitGrouping, RoundTrip) {
    const std::string raw = "0.4989954548621091716891";
    const std::string grouped = group_digits(raw);
    EXPECT_EQ(grouped, "0.49899 54548 62109 17168 91");
    EXPECT_EQ(ungroup_digits(grouped), raw);
}
