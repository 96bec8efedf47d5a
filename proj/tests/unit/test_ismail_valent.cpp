#include <gtest/gtest.h>

#include "nevlab/ismail_valent.hpp"

using namespace nevlab;

namespace {

const real inv_sqrt2 = 1 / std::sqrt(real(2));
const real two_over_sqrt_pi = 2 / std::sqrt(pi);

}  // namespace

TEST(ClosedForms, BDAtOrigin) {
    const auto bd = iv_bd_closed(elliptic_pair(0.5L), 0);
    EXPECT_NEAR(bd.b, two_over_sqrt_pi, 1e-18L);
    EXPECT_EQ(bd.d, 0);
}

TEST(ClosedForms, BDMatchSplitBD) {
    const auto pair = elliptic_pair(inv_sqrt2);
    const auto f = EntireM::ismail_valent(inv_sqrt2);
    for (real x : {2.0L, -2.0L}) {
        const auto closed = iv_bd_closed(pair, x);
        const auto generic = split_bd(f, x);
        EXPECT_NEAR(closed.b, generic.b.real(), 1e-12L);
        EXPECT_NEAR(closed.d, generic.d.real(), 1e-12L);
    }
    const real u = std::sqrt(real(2));
    EXPECT_NEAR(iv_bd_closed(pair, -2).b, two_over_sqrt_pi * std::cosh(u * pair.K / 2) * std::cos(u * pair.Kp / 2),
                1e-15L);
}

TEST(ClosedForms, Density) {
    const auto pair = elliptic_pair(inv_sqrt2);
    EXPECT_NEAR(iv_density_closed(pair, 0), 0.25L, 1e-18L);
    const real expected = 1 / (2 * (std::cosh(2 * pair.K) + std::cos(2 * pair.Kp)));
    EXPECT_NEAR(iv_density_closed(pair, -4) / expected, 1, 1e-15L);
    EXPECT_NEAR(iv_density_closed(pair, -4) / base_density(EntireM::ismail_valent(inv_sqrt2), -4), 1, 1e-12L);
}

TEST(ClosedForms, AgreeWithGenericMachineryOnDenseGrids) {
    for (real k : {0.5L, inv_sqrt2, 0.8L}) {
        const auto pair = elliptic_pair(k);
        const auto f = EntireM::ismail_valent(k);
        for (int i = -800; i <= 800; ++i) {
            const real x = real(i) / 40;
            const auto closed = iv_bd_closed(pair, x);
            const auto generic = split_bd(f, x);
            const real scale = std::max<real>(1, std::abs(closed.b) + std::abs(closed.d));
            EXPECT_LT(std::abs(closed.b - generic.b.real()), 1e-12L * scale);
            EXPECT_LT(std::abs(closed.d - generic.d.real()), 1e-12L * scale);
            const real mu = iv_density_closed(pair, x);
            EXPECT_GT(mu, 0);
            EXPECT_LT(std::abs(mu - base_density(f, x)), 1e-12L * mu);
        }
    }
}

TEST(ClosedForms, TotalMassOneAtSeveralModuli) {
    for (real k : {0.5L, inv_sqrt2, 0.8L}) {
        const auto mv = moments(make_measure(EntireM::ismail_valent(k), PickFn::constant(0, 1)), 0, {});
        EXPECT_NEAR(mv.values[0], 1, 1e-9L) << static_cast<double>(k);
    }
}

TEST(BDCapitals, Examples) {
    for (real k : {0.3L, 0.5L, inv_sqrt2, 0.9L}) {
        const auto BD = iv_BD(elliptic_pair(k), 0);
        EXPECT_NEAR(BD.B, 1, 1e-18L);
        EXPECT_EQ(BD.D, 0);
    }
    const auto pair = elliptic_pair(inv_sqrt2);
    for (real x : {-3.0L, 0.5L, 4.0L}) {
        EXPECT_NEAR(iv_BD(pair, x).B, std::sqrt(pi) / 2 * iv_bd_closed(pair, x).b, 1e-15L);
    }
}

TEST(BDCapitals, HighPrecisionValueAtHalf) {
    // mpmath at 40 digits, tests/oracles/moments_oracle.py.
    const auto BD = iv_BD(elliptic_pair(0.5L), 1);
    EXPECT_NEAR(BD.B, 0.75172764620430972L, 1e-15L);
    EXPECT_NEAR(BD.D, -1.2354119279230488L, 1e-15L);
}

TEST(NuViaBD, MatchesTildeDensityWhenKEqualsKPrime) {
    const auto pair = elliptic_pair(inv_sqrt2);
    const auto tilde = EntireM::tilde_iv(inv_sqrt2);
    EXPECT_NEAR(nu_via_BD(pair, phi_tilde(), 0), 0.25L, 1e-17L);
    for (real x : {-0.5L, 0.5L, 1.0L, 3.0L}) {
        EXPECT_NEAR(nu_via_BD(pair, phi_tilde(), x), base_density(tilde, x), 1e-12L);
    }
}

TEST(NuViaBD, DiscrepancyAwayFromSymmetricModulus) {
    const auto pair = elliptic_pair(0.5L);
    const real gap = std::abs(nu_via_BD(pair, phi_tilde(), 1) - base_density(EntireM::tilde_iv(0.5L), 1));
    EXPECT_GT(gap, 1e-3L);
}

TEST(NuViaBD, RequiresPositiveImaginaryPart) {
    EXPECT_THROW(nu_via_BD(elliptic_pair(0.5L), PickFn::moebius(1, 0, 0, 1), 0.5L), domain_error);
}

TEST(CaseStudy, SymmetricModulusPasses) {
    const auto rep = case_study(elliptic_pair(inv_sqrt2), {});
    EXPECT_EQ(rep.verdict, Verdict::pass) << rep.notes;
    ASSERT_EQ(rep.pointwise_residuals.size(), 7u);
    for (const auto& p : rep.pointwise_residuals) EXPECT_LT(p.residual, 1e-10L);
    ASSERT_EQ(rep.moment_match.size(), 9u);
    EXPECT_LT(rep.moment_match[0].gap, 2e-10L);
    for (const auto& m : rep.moment_match) EXPECT_LE(m.gap, m.budget) << "n = " << m.n;
    EXPECT_GT(rep.ls_residual, 1e-2L);
}

TEST(CaseStudy, OtherModulusReportsDiagnostic) {
    const auto rep = case_study(elliptic_pair(0.5L), {});
    EXPECT_EQ(rep.verdict, Verdict::pass);
    EXPECT_NE(rep.notes.find("diagnostic"), std::string::npos);
    real worst = 0;
    for (const auto& p : rep.pointwise_residuals) worst = std::max(worst, p.residual);
    EXPECT_GT(worst, 1e-3L);
}
