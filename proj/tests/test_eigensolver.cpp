#include <gtest/gtest.h>

#include "boxseries/eigensolver.hpp"

using namespace boxseries;

namespace {

const char* kHarmonicUpper =
    "0.500000000000000000000000001436270705475576590375659826757972824824621785332078167891514939744867648";
const char* kHarmonicLower =
    "0.499999999999999999999999998540554357327868209274465258622103903146216005437303539479001558808137418";

EffectiveODE harmonic() { return build_effective_ode(HamiltonianSpec::harmonic()); }

SolveConfig harmonic_config() {
    SolveConfig c;
    c.L = ExactRational(8);
    c.terms = 250;
    c.n_bisect = 200;
    return c;
}

bool contains(const Bracket& b, const ExactRational& e) { return b.a <= e && e <= b.c; }

}  // namespace

TEST(ScanBrackets, HarmonicEvenLevels) {
    auto br = scan_brackets(harmonic(), harmonic_config(), Parity::Even, ExactRational(0), ExactRational(4), 40);
    ASSERT_EQ(br.size(), 2u);
    EXPECT_TRUE(contains(br[0], ExactRational(1, 2)));
    EXPECT_TRUE(contains(br[1], ExactRational(5, 2)));
}

TEST(ScanBrackets, SingleRootInGroundBracket) {
    auto br = scan_brackets(harmonic(), harmonic_config(), Parity::Even, ExactRational(2, 5), ExactRational(3, 5), 50);
    EXPECT_EQ(br.size(), 1u);
}

TEST(ScanBrackets, EmptyWhenNoLevel) {
    auto br = scan_brackets(harmonic(), harmonic_config(), Parity::Even, rational_from_decimal_text("0.6"),
                            rational_from_decimal_text("1.4"), 40);
    EXPECT_TRUE(br.empty());
}

TEST(ScanBrackets, Validation) {
    EXPECT_THROW(scan_brackets(harmonic(), harmonic_config(), Parity::Even, ExactRational(1), ExactRational(1), 10),
                 ValidationError);
    EXPECT_THROW(scan_brackets(harmonic(), harmonic_config(), Parity::Even, ExactRational(0), ExactRational(1), 1),
                 ValidationError);
}

TEST(ScanBrackets, ExactZeroGivesDegenerateBracket) {
    // psi'' = (q^2 - E) psi truncated at two terms: 1 - E L^2 / 2 vanishes at E = 2/L^2
    EffectiveODE ode = harmonic();
    SolveConfig c;
    c.L = ExactRational(1);
    c.terms = 2;
    auto br = scan_brackets(ode, c, Parity::Even, ExactRational(0), ExactRational(2), 4);
    ASSERT_EQ(br.size(), 1u);
    EXPECT_TRUE(br[0].degenerate());
    EXPECT_EQ(br[0].a, ExactRational(1));
}

TEST(Bisect, EpsilonFollowsHalvings) {
    auto r = bisect(harmonic(), harmonic_config(), {ExactRational(2, 5), ExactRational(3, 5), Parity::Even});
    EXPECT_EQ(r.steps, 200u);
    EXPECT_EQ(r.epsilon, ExactRational(1, 5) / pow(ExactRational(2), 200));
    EXPECT_EQ(scientific_string(r.epsilon, 2), "1.2e-61");
    EXPECT_FALSE(r.precision_limited);
    EXPECT_EQ(fixed_string(r.root, 25), "0.5000000000000000000000000");
}

TEST(Bisect, IntervalStillBracketsRoot) {
    EffectiveODE ode = harmonic();
    BoundaryProbe probe(ode, Parity::Even, 250, ExactRational(8), ScalarMode::exact());
    auto r = bisect(probe, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even}, 120);
    auto lo = probe.sign(r.lo, BoundaryQuantity::Value);
    auto hi = probe.sign(r.hi, BoundaryQuantity::Value);
    ASSERT_TRUE(lo && hi);
    EXPECT_NE(*lo, *hi);
}

TEST(Bisect, SameSignEndpointsRejected) {
    EXPECT_THROW(bisect(harmonic(), harmonic_config(), {ExactRational(1), ExactRational(2), Parity::Even}),
                 BracketError);
}

TEST(Bisect, UnresolvedEndpointIsNonConvergence) {
    auto ode = build_effective_ode(HamiltonianSpec::unit_mass_half("-10*x^2 + x^4"), ExactRational(10));
    SolveConfig c;
    c.terms = 500;
    c.mode = ScalarMode::decimal(100);
    EXPECT_THROW(bisect(ode, c, {rational_from_decimal_text("-20.64"), rational_from_decimal_text("-20.63"),
                                 Parity::Even}),
                 NonConvergenceError);
}

TEST(BoundPair, HarmonicGroundMatchesReferenceDigits) {
    auto bp = bound_pair(harmonic(), harmonic_config(), {ExactRational(2, 5), ExactRational(3, 5), Parity::Even});
    EXPECT_LT(bp.lower.root, bp.upper.root);
    EXPECT_EQ(fixed_string(bp.upper.root, 55), fixed_string(rational_from_decimal_text(kHarmonicUpper), 55));
    EXPECT_EQ(fixed_string(bp.lower.root, 55), fixed_string(rational_from_decimal_text(kHarmonicLower), 55));
    EXPECT_EQ(scientific_string(bp.upper.root - bp.lower.root, 2), "2.9e-27");
}

TEST(BoundPair, DegenerateWhenZerosCoincide) {
    BisectResult r;
    r.root = r.lo = r.hi = ExactRational(7, 4);
    r.exact_zero = true;
    BoundPair bp{r, r, {r.lo, r.hi, Parity::Even}};
    EigenLevel lv = detail::level_from_pair(bp, 10, 1, 8);
    EXPECT_EQ(lv.upper, lv.lower);
    EXPECT_EQ(lv.upper_exact, lv.lower_exact);
    EXPECT_EQ(rational_from_decimal_text(lv.energy), ExactRational(7, 4));
}

TEST(MatchedDigits, Examples) {
    DigitMatch m = matched_digits(kHarmonicUpper, kHarmonicLower);
    EXPECT_EQ(m.count, 26u);
    EXPECT_EQ(m.prefix, "0.50000000000000000000000000");
    DigitMatch same = matched_digits("1.23456", "1.23456");
    EXPECT_EQ(same.count, 5u);
    EXPECT_EQ(same.prefix, "1.23456");
    EXPECT_EQ(matched_digits("0.51", "0.49").count, 1u);
    EXPECT_EQ(matched_digits("0.56", "0.44").count, 0u);
    EXPECT_EQ(matched_digits("0.50000 00001", "0.49999 99999").count, 9u);
}

TEST(Stabilize, HarmonicGroundBy250Terms) {
    SolveConfig c = harmonic_config();
    c.terms = 150;
    c.stability_step = 50;
    auto st = stabilize_truncation(harmonic(), c, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even}, 25);
    EXPECT_LE(st.terms_final, 250u);
    EXPECT_EQ(st.level.energy, "0.5000000000000000000000000");
}

TEST(Stabilize, SingleDigitStopsAtFirstAgreement) {
    SolveConfig c = harmonic_config();
    c.terms = 100;
    c.stability_step = 10;
    auto st = stabilize_truncation(harmonic(), c, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even}, 1);
    EXPECT_EQ(st.terms_final, 100u);
    EXPECT_EQ(st.history.size(), 2u);
}

TEST(Stabilize, CeilingRaisesNonConvergence) {
    SolveConfig c = harmonic_config();
    c.terms = 20;
    c.stability_step = 5;
    c.max_terms = 40;
    EXPECT_THROW(stabilize_truncation(harmonic(), c, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even}, 25),
                 NonConvergenceError);
    c.stability_step = 0;
    EXPECT_THROW(stabilize_truncation(harmonic(), c, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even}, 5),
                 ValidationError);
}

TEST(SolveSpectrum, HarmonicLabelsAndOrdering) {
    auto levels = solve_spectrum(harmonic(), harmonic_config(), 4,
                                 EnergyRange{ExactRational(0), ExactRational(4), 40}, 2);
    ASSERT_EQ(levels.size(), 4u);
    for (int n = 0; n < 4; ++n) {
        EXPECT_EQ(levels[n].N, n);
        EXPECT_EQ(levels[n].parity, n % 2 ? Parity::Odd : Parity::Even);
        EXPECT_EQ(levels[n].parity_index, n / 2);
        EXPECT_LT(levels[n].lower_exact, levels[n].upper_exact);
        EXPECT_TRUE(levels[n].bound_pair);
        EXPECT_EQ(levels[n].terms, 250u);
        // matched digits never exceed what the bound gap allows
        long gap_exp = detail::decimal_exponent(levels[n].upper_exact - levels[n].lower_exact);
        EXPECT_LE(static_cast<long>(levels[n].matched_digits), -gap_exp + 1);
    }
}

TEST(SolveSpectrum, AutomaticRangeFindsLowestLevels) {
    SolveConfig c = harmonic_config();
    c.bound_pair = false;
    c.target_digits = 10;
    auto levels = solve_spectrum(harmonic(), c, 3);
    ASSERT_EQ(levels.size(), 3u);
    EXPECT_EQ(levels[0].energy.substr(0, 6), "0.5000");
    EXPECT_EQ(levels[2].energy.substr(0, 6), "2.5000");
}

TEST(SolveSpectrum, RefusesAsymmetricPotential) {
    HamiltonianSpec h = HamiltonianSpec::double_well_zj(ExactRational(1, 100));
    h.shift = ExactRational(0);
    EXPECT_THROW(solve_spectrum(build_effective_ode(h), harmonic_config(), 1), ValidationError);
}

TEST(SolveConfig, Validation) {
    SolveConfig c;
    c.L = ExactRational(0);
    EXPECT_THROW(c.validate(), ValidationError);
    c.L = ExactRational(-2);
    EXPECT_THROW(c.validate(), ValidationError);
    c = SolveConfig{};
    c.target_digits = 25;
    EXPECT_EQ(c.bisection_steps(), 94u);
}

// --- properties ------------------------------------------------------------

TEST(SolverProperties, WallMonotonicity) {
    SolveConfig c = harmonic_config();
    c.bound_pair = false;
    c.target_digits = 30;
    ExactRational prev(1000);
    for (long wall : {4, 6, 8}) {
        c.L = ExactRational(wall);
        auto lv = solve_level(harmonic(), c, {ExactRational(2, 5), ExactRational(3, 5), Parity::Even});
        EXPECT_LE(lv.upper_exact, prev);
        EXPECT_GE(lv.upper_exact, ExactRational(1, 2));
        prev = lv.upper_exact;
    }
}

TEST(SolverProperties, SplittingIsPositive) {
    auto ode = build_effective_ode(HamiltonianSpec::unit_mass_half("-10*x^2 + x^4"));
    SolveConfig c;
    c.L = rational_from_decimal_text("4.2");
    c.terms = 125;
    c.bound_pair = false;
    c.target_digits = 12;
    auto levels = solve_spectrum(ode, c, 4, EnergyRange{ExactRational(-21), ExactRational(-12), 36}, 4);
    ASSERT_EQ(levels.size(), 4u);
    for (int k = 0; k < 2; ++k) {
        EXPECT_EQ(levels[2 * k].parity, Parity::Even);
        EXPECT_EQ(levels[2 * k + 1].parity, Parity::Odd);
        EXPECT_GT(levels[2 * k + 1].upper_exact - levels[2 * k].upper_exact, ExactRational(0));
    }
}

TEST(SolverProperties, PresetWallsAreFarAboveLevels) {
    EXPECT_GE(wall_ratio(HamiltonianSpec::harmonic(), ExactRational(8), ExactRational(1, 2)), 10.0);
    EXPECT_GE(wall_ratio(HamiltonianSpec::double_well_zj(ExactRational(1, 1000)), ExactRational(3),
                         ExactRational(1, 2)),
              10.0);
    EXPECT_GE(wall_ratio(HamiltonianSpec::unit_mass_half("-10*x^2 + x^4"), ExactRational(8), ExactRational(-20)),
              10.0);
    EXPECT_GE(wall_ratio(HamiltonianSpec::unit_mass_half("x^4"), rational_from_decimal_text("3.5"),
                         rational_from_decimal_text("1.06")),
              10.0);
    EXPECT_GE(wall_ratio(HamiltonianSpec::unit_mass_half("x^2 + x^8"), rational_from_decimal_text("2.5"),
                         rational_from_decimal_text("1.3")),
              10.0);
}

TEST(SolverProperties, Determinism) {
    auto run = [] {
        auto levels = solve_spectrum(harmonic(), harmonic_config(), 2,
                                     EnergyRange{ExactRational(0), ExactRational(2), 20}, 2);
        std::string s;
        for (const auto& lv : levels) s += lv.energy + "|" + lv.upper + "|" + lv.lower + "\n";
        return s;
    };
    EXPECT_EQ(run(), run());
}
