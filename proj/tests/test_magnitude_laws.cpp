#include "etas/magnitude_laws.hpp"
#include "etas/random.hpp"
#include "etas/stats.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace etas {
namespace {

constexpr double kLn10 = std::numbers::ln10;

TEST(GrLaw, DensityValues) {
    const GrLaw gr(kLn10, 1.5);
    EXPECT_NEAR(gr_density(1.5, gr), 2.302585, 1e-6);
    EXPECT_NEAR(gr_density(1.5 + std::numbers::ln2 / kLn10, gr), kLn10 / 2.0, 1e-14);
    EXPECT_THROW((void)gr_density(1.4, gr), std::invalid_argument);
}

TEST(GrLaw, DensityIntegratesToOne) {
    const GrLaw gr(kLn10, 1.5);
    const double total = oracle::integrate([&](double m) { return gr_density(m, gr); }, 1.5, 31.5);
    EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(GrLaw, SampleInversion) {
    const GrLaw gr(kLn10, 2.0);
    EXPECT_NEAR(gr_sample(1e-300, gr), 2.0, 1e-12);
    EXPECT_NEAR(gr_sample(1.0 - std::exp(-kLn10), gr), 3.0, 1e-12);
    EXPECT_THROW((void)gr_sample(0.0, gr), std::invalid_argument);
    EXPECT_THROW((void)gr_sample(1.0, gr), std::invalid_argument);
}

TEST(GrLaw, SamplesPassKs) {
    const GrLaw gr(kLn10, 1.5);
    Rng rng(17);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = gr_sample(rng.uniform_open(), gr);
    const auto ks = stats::ks_test(draws, [&](double m) { return gr_cdf(m, gr); });
    EXPECT_GT(ks.p_value, 0.01) << "D = " << ks.statistic;
}

TEST(ConditionalLaw, ReducesToGrWhenUncoupled) {
    const ConditionalLaw law(kLn10, 1.72, 0.0, 1.5);
    const GrLaw gr(kLn10, 1.5);
    for (double mp : {1.5, 2.0, 4.0, 7.0}) {
        for (double m : {1.5, 1.7, 2.5, 5.0, 9.0}) {
            EXPECT_EQ(conditional_density(m, mp, law), gr_density(m, gr));
        }
        Rng rng(3);
        for (int k = 0; k < 100; ++k) {
            const double u = rng.uniform_open();
            EXPECT_NEAR(conditional_sample(u, mp, law), gr_sample(u, gr), 1e-12);
        }
    }
}

TEST(ConditionalLaw, OriginValue) {
    for (double c1 : {0.0, 0.3, 0.8, 0.99}) {
        const ConditionalLaw law(kLn10, 1.0, c1, 1.5);
        EXPECT_NEAR(conditional_density(1.5, 1.5, law), kLn10 * (1.0 + c1), 1e-14);
    }
}

TEST(ConditionalLaw, NormalizedForEveryMother) {
    for (double c1 : {0.0, 0.3, 0.8, 0.99}) {
        const ConditionalLaw law(kLn10, 1.72, c1, 1.5);
        for (int k = 0; k <= 6; ++k) {
            const double mp = 1.5 + k;
            const double total =
                oracle::integrate([&](double m) { return conditional_density(m, mp, law); }, 1.5, 31.5);
            EXPECT_NEAR(total, 1.0, 1e-9) << "c1=" << c1 << " m'=" << mp;
        }
    }
}

TEST(ConditionalLaw, CdfMatchesQuadrature) {
    const ConditionalLaw law(kLn10, 0.83, 0.8, 1.5);
    for (double mp : {1.5, 2.7, 5.0}) {
        for (double m : {1.6, 2.0, 3.1}) {
            const double q = oracle::integrate([&](double x) { return conditional_density(x, mp, law); }, 1.5, m);
            EXPECT_NEAR(conditional_cdf(m, mp, law), q, 1e-12);
        }
    }
}

TEST(ConditionalLaw, SamplerInvertsCdf) {
    const ConditionalLaw law(kLn10, 1.2, 0.99, 1.5);
    Rng rng(8);
    for (double mp : {1.5, 2.0, 6.0}) {
        EXPECT_NEAR(conditional_sample(1e-300, mp, law), 1.5, 1e-12);
        for (int k = 0; k < 200; ++k) {
            const double u = rng.uniform_open();
            EXPECT_NEAR(conditional_cdf(conditional_sample(u, mp, law), mp, law), u, 1e-12);
        }
    }
}

TEST(ConditionalLaw, SamplesPassKsAgainstQuadratureCdf) {
    const ConditionalLaw law(kLn10, 1.0, 0.8, 1.5);
    const double mp = 4.0;
    Rng rng(99);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = conditional_sample(rng.uniform_open(), mp, law);
    // Queries arrive in sorted order, so the quadrature CDF is accumulated piece by piece.
    std::sort(draws.begin(), draws.end());
    double last_x = 1.5, last_cdf = 0.0;
    const auto ks = stats::ks_test(draws, [&](double m) {
        if (m < last_x) {
            last_x = 1.5;
            last_cdf = 0.0;
        }
        last_cdf += oracle::integrate([&](double x) { return conditional_density(x, mp, law); }, last_x, m, 1e-12);
        last_x = m;
        return last_cdf;
    });
    EXPECT_GT(ks.p_value, 0.01) << "D = " << ks.statistic;
}

TEST(ConditionalLaw, HistogramWithinMultinomialBands) {
    const ConditionalLaw law(kLn10, 1.0, 0.8, 1.5);
    const double mp = 3.0;
    constexpr int kBins = 30;
    constexpr double kWidth = 0.1;
    constexpr std::size_t kDraws = 1'000'000;
    std::vector<std::size_t> hist(kBins + 1, 0);
    Rng rng(123);
    for (std::size_t i = 0; i < kDraws; ++i) {
        const auto bin = static_cast<std::size_t>((conditional_sample(rng.uniform_open(), mp, law) - 1.5) / kWidth);
        ++hist[std::min<std::size_t>(bin, kBins)];
    }
    int outside = 0;
    for (int b = 0; b < kBins; ++b) {
        const double lo = 1.5 + b * kWidth;
        const double prob =
            oracle::integrate([&](double x) { return conditional_density(x, mp, law); }, lo, lo + kWidth);
        const double expected = prob * kDraws;
        const double sigma = std::sqrt(kDraws * prob * (1.0 - prob));
        if (std::abs(static_cast<double>(hist[b]) - expected) > 3.0 * sigma) ++outside;
    }
    // 3-sigma bands: at most one of 30 bins may fall outside by chance.
    EXPECT_LE(outside, 1);
}

TEST(ConditionalLaw, LargerMothersDominateStochastically) {
    const ConditionalLaw law(kLn10, 1.72, 0.8, 1.5);
    for (double mp1 = 1.5; mp1 < 6.0; mp1 += 0.5) {
        const double mp2 = mp1 + 0.5;
        for (double m = 1.5; m < 6.0; m += 0.1) {
            EXPECT_LE(conditional_cdf(m, mp2, law), conditional_cdf(m, mp1, law) + 1e-15);
        }
    }
}

TEST(ConditionalLaw, MeanIsNondecreasingAndMatchesQuadrature) {
    const ConditionalLaw law(kLn10, 0.83, 0.8, 1.5);
    double prev = 0.0;
    for (double mp = 1.5; mp <= 7.5; mp += 0.25) {
        const double q =
            oracle::integrate([&](double x) { return x * conditional_density(x, mp, law); }, 1.5, 31.5);
        EXPECT_NEAR(conditional_mean(mp, law), q, 1e-10);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(ConditionalLaw, ExpMomentMatchesQuadrature) {
    const ConditionalLaw law(kLn10, 1.72, 0.8, 1.5);
    for (double mp : {1.5, 3.0, 6.0}) {
        const double q = oracle::integrate(
            [&](double x) { return std::exp(1.72 * (x - 1.5)) * conditional_density(x, mp, law); }, 1.5, 61.5);
        EXPECT_NEAR(conditional_exp_moment(1.72, mp, law) / q, 1.0, 1e-9);
    }
}

TEST(ConditionalLaw, RejectsInvalidParameters) {
    EXPECT_THROW(ConditionalLaw(kLn10, 1.0, 1.0, 1.5), std::invalid_argument);
    EXPECT_THROW(ConditionalLaw(kLn10, 1.0, -0.1, 1.5), std::invalid_argument);
    EXPECT_THROW(ConditionalLaw(kLn10, 2.5, 0.5, 1.5), std::invalid_argument);
    const ConditionalLaw law(kLn10, 1.0, 0.5, 1.5);
    EXPECT_THROW((void)conditional_density(2.0, 1.0, law), std::invalid_argument);
    EXPECT_THROW((void)conditional_sample(1.0, 2.0, law), std::invalid_argument);
}

TEST(Productivity, Values) {
    EXPECT_DOUBLE_EQ(productivity(1.5, ProductivityLaw(0.02, 1.72, 1.5)), 0.02);
    EXPECT_NEAR(productivity(2.5, ProductivityLaw(0.02, std::numbers::ln2, 1.5)), 0.04, 1e-15);
    EXPECT_NEAR(productivity(3.5, ProductivityLaw(0.02, 1.72, 1.5)), 0.02 * std::exp(3.44), 1e-14);
}

TEST(Omori, Values) {
    const OmoriLaw law(0.013, 1.11);
    EXPECT_NEAR(omori(0.0, law), std::pow(0.013, -1.11), 1e-9);
    EXPECT_NEAR(omori(1.0 - 0.2, OmoriLaw(0.2, 1.0)), 1.0, 1e-15);
    EXPECT_THROW((void)omori(-1.0, law), std::invalid_argument);
}

TEST(Omori, TotalIntegralMatchesQuadrature) {
    for (auto [c, p] : {std::pair{0.013, 1.11}, std::pair{0.017, 1.12}, std::pair{0.5, 2.0}}) {
        const OmoriLaw law(c, p);
        // Substitute t = c (s^{-1/(p-1)} - 1) so the infinite tail maps to s in (0, 1].
        const double q = oracle::integrate(
            [&](double s) {
                const double t = c * (std::pow(s, -1.0 / (p - 1.0)) - 1.0);
                const double dt = c / (p - 1.0) * std::pow(s, -1.0 / (p - 1.0) - 1.0);
                return omori(t, law) * dt;
            },
            0.0, 1.0);
        EXPECT_NEAR(q / (std::pow(c, 1.0 - p) / (p - 1.0)), 1.0, 1e-9);
    }
}

TEST(Omori, IntegralMatchesQuadratureAndInverts) {
    for (auto [c, p] : {std::pair{0.013, 1.11}, std::pair{0.1, 1.0}, std::pair{0.02, 0.8}, std::pair{0.01, 1.0 + 1e-9}}) {
        const OmoriLaw law(c, p);
        for (double t : {1e-6, 0.01, 1.0, 100.0, 5000.0}) {
            // Pieces between geometric breakpoints c 10^k keep the peaked integrand smooth.
            double q = 0.0, lo = 0.0;
            for (double cut = c; lo < t; cut *= 10.0) {
                const double hi = std::min(cut, t);
                q += oracle::integrate([&](double x) { return omori(x, law); }, lo, hi, 1e-14);
                lo = hi;
            }
            EXPECT_NEAR(law.integral(t) / q, 1.0, 1e-9) << "c=" << c << " p=" << p << " t=" << t;
            EXPECT_NEAR(law.inverse_integral(law.integral(t)) / t, 1.0, 1e-9);
        }
    }
    EXPECT_TRUE(std::isinf(OmoriLaw(0.013, 1.11).inverse_integral(1e6)));
}

}  // namespace
}  // namespace etas
