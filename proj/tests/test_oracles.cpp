#include <gtest/gtest.h>

#include <cmath>

#include "boxseries/oracles.hpp"

using namespace boxseries;

namespace {

const ExactRational kG(1, 1000);

// closed form of the harmonic action: int_1^q sqrt(x^2 - 1) dx
double harmonic_action(double q) {
    const double r = std::sqrt(q * q - 1.0);
    return 0.5 * q * r - 0.5 * std::log(q + r);
}

}  // namespace

TEST(ZJFunctions, PerturbativeD) {
    EXPECT_EQ(zj_D(ExactRational(1, 2), ExactRational(0)), ExactRational(1, 2));
    EXPECT_EQ(zj_D(ExactRational(1, 2), kG), ExactRational(5010075, 10000000));
    EXPECT_EQ(zj_D(ExactRational(0), ExactRational(1, 100)), ExactRational(1, 400));
}

TEST(ZJFunctions, DerivativeIsExact) {
    const ExactRational e(3, 7);
    const ExactRational g(1, 20);
    const ExactRational h = pow10(-30);
    ExactRational fd = (zj_D(e + h, g) - zj_D(e - h, g)) / (ExactRational(2) * h);
    EXPECT_LT(abs(fd - zj_dD_dE(e, g)), pow10(-50));
}

TEST(ZJFunctions, InstantonA) {
    EXPECT_EQ(zj_A(ExactRational(1, 2), kG),
              ExactRational(1000, 3) + ExactRational(7, 1200) + ExactRational(207, 4) * pow10(-6));
    EXPECT_EQ(decimal_string(zj_A(ExactRational(1, 2), kG), 14), "333.33921841667");
    EXPECT_EQ(zj_A(ExactRational(0), ExactRational(1, 100)), ExactRational(100, 3) + ExactRational(19, 1200));
    EXPECT_THROW(zj_A(ExactRational(1, 2), ExactRational(0)), ValidationError);
}

TEST(ZJFunctions, Xi) {
    EXPECT_EQ(decimal_string(zj_xi(ExactRational(1, 6)), 4), "0.5084");
    // independent log-space evaluation
    const double g = 1e-3;
    const double log10_xi = -1.0 / (6.0 * g) / std::log(10.0) - 0.5 * std::log10(M_PI * g);
    EXPECT_NEAR(zj_xi(kG).log10_abs(), log10_xi, 1e-9);
    EXPECT_EQ(scientific_string(zj_xi(kG), 3), "7.40e-72");
    EXPECT_THROW(zj_xi(ExactRational(0)), ValidationError);
    EXPECT_THROW(zj_xi(ExactRational(-1)), ValidationError);
}

TEST(ZJFunctions, XiIsIncreasing) {
    double prev = -INFINITY;
    for (long k = 1; k <= 60; ++k) {
        double v = zj_xi(ExactRational(k, 360)).log10_abs();
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(ZJFunctions, Lambda) {
    ZJLambda l = zj_lambda(ExactRational(2));
    EXPECT_TRUE(l.real_part.is_zero() || std::fabs(l.real_part.to_double()) < 1e-40);
    EXPECT_TRUE(l.negative_argument);
    EXPECT_NEAR(zj_lambda(kG).real_part.to_double(), std::log(2000.0), 1e-12);
    EXPECT_THROW(zj_lambda(ExactRational(0)), ValidationError);
}

TEST(ZJFunctions, PerturbativeLevel) {
    EXPECT_EQ(zj_perturbative_level(0, ExactRational(0)).to_exact(), ExactRational(1, 2));
    EXPECT_EQ(zj_perturbative_level(1, ExactRational(0)).to_exact(), ExactRational(3, 2));
    BigDecimal e0 = zj_perturbative_level(0, kG);
    EXPECT_EQ(decimal_string(e0, 5), "0.49900");
    EXPECT_EQ(fixed_string(e0.to_exact(), 5), "0.49900");
    // truncated D(E0) hits 1/2 to working precision
    EXPECT_LT(abs(zj_D(e0.to_exact(), kG) - ExactRational(1, 2)), pow10(-50));
    // reference ground-state digits: the truncated D misses the g^3 term
    EXPECT_LT(abs(e0.to_exact() - rational_from_decimal_text("0.49899545486210917")).to_double(), 2e-7);
}

TEST(Splitting, LeadingEstimate) {
    SplittingEstimate s = zj_split_estimate(0, kG);
    EXPECT_EQ(s.note, "leading order, n=1");
    EXPECT_EQ(scientific_string(s.delta_E, 4), "1.470e-71");
    const ExactRational reference =
        rational_from_decimal_text("0.498995454862109171689130839481921636820947240208096653293278697220139129839929595") -
        rational_from_decimal_text("0.498995454862109171689130839481921636820947240208096653293278697220139115135285053");
    double rel = std::fabs(s.delta_E.to_exact().to_double() / reference.to_double() - 1.0);
    EXPECT_LE(rel, 0.05);
}

TEST(Splitting, VanishesAsCouplingShrinks) {
    SplittingEstimate big = zj_split_estimate(0, kG);
    SplittingEstimate small = zj_split_estimate(0, ExactRational(1, 10000));
    EXPECT_GT(small.delta_E.raw_sign(), 0);
    EXPECT_LT(small.delta_E.log10_abs(), big.delta_E.log10_abs() - 100);
}

TEST(Splitting, ExcitedPairIsWider) {
    SplittingEstimate s0 = zj_split_estimate(0, kG);
    SplittingEstimate s1 = zj_split_estimate(1, kG);
    EXPECT_GT(s1.delta_E.raw_sign(), 0);
    EXPECT_GT(s1.delta_E.log10_abs(), s0.delta_E.log10_abs());
    EXPECT_THROW(zj_split_estimate(0, ExactRational(0)), ValidationError);
}

TEST(Splitting, InstantonFactorTracksXi) {
    const unsigned digits = 60;
    DecimalField f{digits};
    BigDecimal e = zj_perturbative_level(0, kG, digits);
    BigDecimal a = zj_A(e, kG, f);
    // exp(-A/2) against xi(g) sqrt(pi g) = exp(-1/(6g))
    BigDecimal ratio = exp(-(a / 2L)) / (zj_xi(kG, digits) * sqrt(BigDecimal::pi(digits) * f.make(kG)));
    EXPECT_GE(ratio.to_double(), 0.9);
    EXPECT_LE(ratio.to_double(), 1.1);
}

TEST(WKBTail, HarmonicAtEight) {
    WKBTail t = wkb_tail(Polynomial({0, 0, ExactRational(1, 2)}), 0.5, 8.0, 2.0, true);
    EXPECT_GE(t.value, 5.8e-14);
    EXPECT_LE(t.value, 7.2e-14);
    EXPECT_NEAR(t.turning_point, 1.0, 1e-12);
}

TEST(WKBTail, MatchesClosedFormAction) {
    const Polynomial v({0, 0, ExactRational(1, 2)});
    WKBTail t = wkb_tail(v, 0.5, 4.0, 2.0, true);
    EXPECT_NEAR(t.action, harmonic_action(4.0), 1e-6 * harmonic_action(4.0));
    WKBTail p = wkb_tail(v, 0.5, 4.0, 2.0, false);
    const double expected = std::pow(7.5, -0.25) * std::exp(-harmonic_action(4.0));
    EXPECT_NEAR(p.value, expected, 1e-6 * expected);
}

TEST(WKBTail, Errors) {
    const Polynomial v({0, 0, ExactRational(1, 2)});
    EXPECT_THROW(wkb_tail(v, 0.5, 1.0), ValidationError);   // at the turning point
    EXPECT_THROW(wkb_tail(v, 0.5, 0.5), ValidationError);   // classically allowed
    EXPECT_THROW(wkb_tail(Polynomial({1}), 0.5, 2.0), BracketError);
    EXPECT_THROW(wkb_tail(v, 0.5, 4.0, 0.0), ValidationError);
}
