#include "etas/catalog.hpp"
#include "etas/correlation_window.hpp"
#include "etas/simulator.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

namespace etas {
namespace {

CountSeries random_counts(std::size_t n, double rate, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::poisson_distribution<std::int64_t> pois(rate);
    CountSeries s;
    s.counts.resize(n);
    for (auto& c : s.counts) c = pois(gen);
    return s;
}

AcfEstimate synthetic_acf(double amp, double exponent, std::size_t max_lag, double noise = 0.0,
                          std::uint64_t seed = 0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> jitter(-noise, noise);
    AcfEstimate acf;
    acf.n = 1000;
    for (std::size_t d = 0; d <= max_lag; ++d) {
        acf.lags.push_back(d);
        const double base = d == 0 ? 1.0 : amp * std::pow(static_cast<double>(d), -exponent);
        acf.values.push_back(base * (1.0 + jitter(gen)));
    }
    return acf;
}

TEST(Autocorrelation, LagZeroIdentity) {
    for (std::size_t n : {5u, 50u, 2000u}) {
        const auto acf = autocorrelation(random_counts(n, 3.0, n), 3);
        EXPECT_NEAR(acf.values[0], static_cast<double>(n - 1) / static_cast<double>(n), 1e-14);
    }
}

TEST(Autocorrelation, AlternatingSeries) {
    CountSeries s;
    for (int k = 0; k < 10; ++k) s.counts.push_back(k % 2);
    const auto acf = autocorrelation(s, 1);
    // mean 1/2, variance 10/36: every product is -1/4, nine of them.
    const double expected = 9.0 * -0.25 / (9.0 * (2.5 / 9.0));
    EXPECT_NEAR(acf.values[1], expected, 1e-14);
    EXPECT_LT(acf.values[1], 0.0);
}

TEST(Autocorrelation, MatchesDoubleLoop) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = random_counts(300, 2.5, seed);
        const auto acf = autocorrelation(s, 40);
        for (std::size_t d = 0; d <= 40; ++d) {
            EXPECT_NEAR(acf.values[d], oracle::naive_acf(s.counts, d), 1e-12);
        }
    }
}

TEST(Autocorrelation, WhiteNoiseStaysInsideBand) {
    const auto s = random_counts(2000, 0.62, 9);
    const auto acf = autocorrelation(s, 50);
    int inside = 0;
    for (std::size_t d = 1; d <= 50; ++d) inside += std::abs(acf.values[d]) < 3.0 / std::sqrt(2000.0);
    EXPECT_GE(inside, 50);  // at least 99% of 50 lags
}

TEST(Autocorrelation, RejectsDegenerateInput) {
    CountSeries flat;
    flat.counts.assign(10, 2);
    EXPECT_THROW((void)autocorrelation(flat, 2), std::invalid_argument);
    EXPECT_THROW((void)autocorrelation(random_counts(5, 1.0, 1), 10), std::invalid_argument);
}

TEST(PowerLaw, ExactRecovery) {
    const auto fit = fit_power_law(synthetic_acf(0.9, 1.2, 50), 1, 50);
    EXPECT_NEAR(fit.amplitude, 0.9, 1e-10);
    EXPECT_NEAR(fit.exponent, 1.2, 1e-10);
    EXPECT_NEAR(fit.sse, 0.0, 1e-20);
    EXPECT_EQ(fit.lags_used, 50u);
}

TEST(PowerLaw, NoisyRecovery) {
    const auto fit = fit_power_law(synthetic_acf(0.9, 1.2, 50, 0.01, 5), 1, 50);
    EXPECT_NEAR(fit.amplitude / 0.9, 1.0, 0.05);
    EXPECT_NEAR(fit.exponent / 1.2, 1.0, 0.05);
}

TEST(PowerLaw, NonPositiveValuesAreRejected) {
    auto acf = synthetic_acf(0.9, 1.2, 10);
    for (std::size_t d = 1; d <= 10; ++d) acf.values[d] = -0.01;
    EXPECT_THROW((void)fit_power_law(acf, 1, 10), std::invalid_argument);
}

TEST(DeltaStar, ClosedFormCases) {
    PowerLawFit f;
    f.amplitude = 1.0;
    f.exponent = 1.0;
    EXPECT_EQ(select_delta_star(f, 0.05), 20u);
    f.amplitude = 0.04;
    EXPECT_EQ(select_delta_star(f, 0.05), 1u);
}

std::size_t scan_delta_star(const PowerLawFit& f, double thr) {
    // Smallest d >= 1 with model(k) < thr for every k > d; the model decreases, so one
    // check at d + 1 suffices.
    std::size_t d = 1;
    while (!(f.model(static_cast<double>(d + 1)) < thr)) ++d;
    return d;
}

TEST(DeltaStar, MatchesLinearScanAndBrackets) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> amp(0.01, 3.0), ex(0.3, 2.5);
    for (int k = 0; k < 500; ++k) {
        PowerLawFit f;
        f.amplitude = amp(gen);
        f.exponent = ex(gen);
        const auto d = select_delta_star(f, 0.05);
        EXPECT_EQ(d, scan_delta_star(f, 0.05));
        EXPECT_LT(f.model(static_cast<double>(d + 1)), 0.05);
        if (d > 1) EXPECT_GE(f.model(static_cast<double>(d - 1)), 0.05);
    }
}

TEST(DeltaStar, MonotoneInThresholdAndAmplitude) {
    PowerLawFit f;
    f.exponent = 1.1;
    for (double a = 0.1; a < 3.0; a += 0.1) {
        f.amplitude = a;
        std::size_t prev = select_delta_star(f, 0.01);
        for (double thr = 0.02; thr < 0.5; thr += 0.01) {
            const auto d = select_delta_star(f, thr);
            EXPECT_LE(d, prev);
            prev = d;
        }
        PowerLawFit g = f;
        g.amplitude = a + 0.1;
        EXPECT_GE(select_delta_star(g, 0.05), select_delta_star(f, 0.05));
    }
}

TEST(DeltaStar, NoiselessRoundTrip) {
    const auto fit = fit_power_law(synthetic_acf(1.0, 1.0, 50), 1, 50);
    EXPECT_EQ(select_delta_star(fit, 0.05), 20u);
    EXPECT_EQ(fit.delta_star, 20u);
}

TEST(Significance, NormalTail) {
    AcfEstimate acf;
    acf.n = 400;
    acf.lags = {0, 1, 2};
    acf.values = {0.9975, 0.0, 3.0 / 20.0};
    const auto p = acf_significance(acf, 2);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
    EXPECT_NEAR(p[1], 0.0027, 1e-4);
}

TEST(Significance, ClusteredCountsAreSignificantUpToDeltaStar) {
    SimConfig cfg;
    cfg.params = {0.62, 0.02, 0.013, 1.72, 1.11};
    cfg.gr = GrLaw::from_b_value(1.0, 1.5);
    cfg.window = {0.0, 3000.0};
    cfg.seed = 42;
    const auto counts = daily_counts(simulate(cfg));
    const auto max_lag = default_max_fit_lag(counts.n());
    const auto acf = autocorrelation(counts, max_lag);
    const auto fit = fit_power_law(acf, 1, max_lag);
    ASSERT_GE(fit.delta_star, 1u);
    const auto p = acf_significance(acf, fit.delta_star);
    for (std::size_t d = 0; d < p.size(); ++d) EXPECT_LT(p[d], 0.01) << "lag " << d + 1;
}

TEST(DefaultLag, Bounds) {
    EXPECT_EQ(default_max_fit_lag(1000), 50u);
    EXPECT_EQ(default_max_fit_lag(100), 25u);
    EXPECT_EQ(default_max_fit_lag(2), 1u);
}

}  // namespace
}  // namespace etas
