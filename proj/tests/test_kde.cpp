#include "etas/error.hpp"
#include "etas/kde.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace etas {
namespace {

FrequencyTable random_table(std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> freq(1, 60);
    FrequencyTable t;
    for (std::size_t i = 0; i < rows; ++i) {
        t.magnitudes.push_back(1.5 + 0.1 * static_cast<double>(i));
        t.frequencies.push_back(freq(gen));
    }
    return t;
}

TEST(FrequencyTable, BinsToResolution) {
    const std::vector<double> mags{1.51, 1.49, 1.62, 2.0, 1.98, 2.04};
    const auto t = make_frequency_table(mags, 0.1);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_NEAR(t.magnitudes[0], 1.5, 1e-12);
    EXPECT_NEAR(t.magnitudes[1], 1.6, 1e-12);
    EXPECT_NEAR(t.magnitudes[2], 2.0, 1e-12);
    EXPECT_EQ(t.frequencies, (std::vector<double>{2, 1, 3}));
}

TEST(FrequencyTable, ValidationRejectsBadTables) {
    FrequencyTable one{{1.5}, {3}};
    EXPECT_THROW(one.validate(), std::invalid_argument);
    FrequencyTable unordered{{1.6, 1.5}, {1, 1}};
    EXPECT_THROW(unordered.validate(), std::invalid_argument);
    FrequencyTable zero{{1.5, 1.6}, {1, 0}};
    EXPECT_THROW(zero.validate(), std::invalid_argument);
}

TEST(MagnitudeGrid, DefaultSizeAndEndpoints) {
    const auto g = magnitude_grid(1.5, 6.0);
    ASSERT_EQ(g.size(), 1000u);
    EXPECT_EQ(g.front(), 1.5);
    EXPECT_EQ(g.back(), 6.0);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(Density, ConstantFrequenciesGiveConstant) {
    FrequencyTable t{{1.5, 1.7, 2.2, 3.0}, {7, 7, 7, 7}};
    const auto grid = magnitude_grid(1.0, 4.0, 301);
    for (double gamma : {0.05, 0.3, 2.0}) {
        for (double v : estimate_density(t, grid, gamma).values) EXPECT_NEAR(v, 7.0, 1e-12);
    }
}

TEST(Density, TwoPointMidpointIsAverage) {
    FrequencyTable t{{2.0, 3.0}, {4, 10}};
    const std::vector<double> at{2.5};
    for (double gamma : {0.05, 0.2, 1.0}) {
        EXPECT_NEAR(estimate_density(t, at, gamma).values[0], 7.0, 1e-12);
    }
}

TEST(Density, MatchesBruteForce) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t = random_table(25, seed);
        const auto grid = magnitude_grid(1.5, 3.9, 1000);
        for (double gamma : {0.03, 0.1, 0.4}) {
            const auto est = estimate_density(t, grid, gamma);
            for (std::size_t k = 0; k < grid.size(); k += 7) {
                const double ref = oracle::naive_kde(t.magnitudes, t.frequencies, grid[k], gamma);
                EXPECT_NEAR(est.values[k] / ref, 1.0, 1e-12);
            }
        }
    }
}

TEST(Density, StaysInsideFrequencyRange) {
    const auto t = random_table(30, 8);
    const auto [lo, hi] = std::minmax_element(t.frequencies.begin(), t.frequencies.end());
    for (double gamma : {0.01, 0.08, 0.5}) {
        for (double v : estimate_density(t, magnitude_grid(0.0, 8.0), gamma).values) {
            EXPECT_GE(v, *lo - 1e-12);
            EXPECT_LE(v, *hi + 1e-12);
        }
    }
}

TEST(Density, ShiftInvariance) {
    const auto t = random_table(20, 2);
    auto shifted = t;
    for (auto& m : shifted.magnitudes) m += 1.25;
    const auto grid = magnitude_grid(1.5, 3.4, 200);
    auto grid_shifted = grid;
    for (auto& g : grid_shifted) g += 1.25;
    const auto a = estimate_density(t, grid, 0.15);
    const auto b = estimate_density(shifted, grid_shifted, 0.15);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(a.values[k] / b.values[k], 1.0, 1e-10);
}

TEST(Density, ScalingMagnitudesAndBandwidthTogether) {
    const auto t = random_table(20, 3);
    auto scaled = t;
    for (auto& m : scaled.magnitudes) m *= 2.0;
    const auto grid = magnitude_grid(1.5, 3.4, 200);
    auto grid_scaled = grid;
    for (auto& g : grid_scaled) g *= 2.0;
    const auto a = estimate_density(t, grid, 0.12);
    const auto b = estimate_density(scaled, grid_scaled, 0.24);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(a.values[k] / b.values[k], 1.0, 1e-10);
}

TEST(Density, HugeBandwidthGivesMeanFrequency) {
    const auto t = random_table(15, 4);
    double mean = 0.0;
    for (double f : t.frequencies) mean += f;
    mean /= static_cast<double>(t.size());
    for (double v : estimate_density(t, magnitude_grid(1.5, 3.0, 50), 1e6).values) EXPECT_NEAR(v, mean, 1e-8);
}

TEST(Density, FarFromDataTakesNearestFrequency) {
    FrequencyTable t{{2.0, 2.1, 2.2}, {5, 9, 2}};
    const std::vector<double> at{12.0, -8.0};
    const auto est = estimate_density(t, at, 0.02);
    EXPECT_NEAR(est.values[0], 2.0, 1e-12);
    EXPECT_NEAR(est.values[1], 5.0, 1e-12);
}

TEST(Density, RejectsBadBandwidth) {
    const auto t = random_table(5, 1);
    const std::vector<double> at{2.0};
    EXPECT_THROW((void)estimate_density(t, at, 0.0), std::invalid_argument);
    EXPECT_THROW((void)estimate_density(t, at, -1.0), std::invalid_argument);
}

TEST(Loocv, MatchesBruteForce) {
    const auto candidates = [] {
        std::vector<double> c;
        for (int k = 0; k < 20; ++k) c.push_back(0.02 * std::pow(1.25, k));
        return c;
    }();
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
        const auto t = random_table(18 + seed, seed);
        const auto sel = loocv_bandwidth(t, candidates);
        double best = std::numeric_limits<double>::infinity();
        double best_gamma = 0.0;
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            const double ref = oracle::naive_loocv(t.magnitudes, t.frequencies, candidates[k]);
            EXPECT_NEAR(sel.scores[k], ref, 1e-12 * std::max(1.0, ref));
            if (ref < best) {
                best = ref;
                best_gamma = candidates[k];
            }
        }
        EXPECT_EQ(sel.gamma, best_gamma);
    }
}

TEST(Loocv, TiesGoToSmallerBandwidth) {
    // Unit frequencies make every leave-one-out ratio exactly 1.
    FrequencyTable t{{1.5, 1.6, 1.7, 1.8}, {1, 1, 1, 1}};
    const std::vector<double> c{0.05, 0.1, 0.2};
    const auto sel = loocv_bandwidth(t, c);
    EXPECT_EQ(sel.scores, (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_EQ(sel.gamma, 0.05);
}

TEST(Loocv, NoisyExponentialTablePicksInteriorBandwidth) {
    std::mt19937_64 gen(77);
    FrequencyTable t;
    for (int i = 0; i <= 30; ++i) {
        const double m = 1.5 + 0.1 * i;
        std::poisson_distribution<int> pois(2000.0 * std::pow(10.0, -(m - 1.5)) * 0.2);
        t.magnitudes.push_back(m);
        t.frequencies.push_back(std::max(1, pois(gen)));
    }
    const auto c = default_bandwidth_candidates();
    const auto sel = loocv_bandwidth(t, c);
    EXPECT_GT(sel.gamma, c.front());
    EXPECT_LT(sel.gamma, c.back());
}

TEST(Loocv, UnderflowScoresInfinity) {
    FrequencyTable t{{1.5, 11.5, 21.5}, {1, 2, 3}};
    EXPECT_TRUE(std::isinf(loocv_score(t, 0.01)));
    EXPECT_TRUE(std::isfinite(loocv_score(t, 5.0)));
    const std::vector<double> tiny{0.01, 0.02};
    EXPECT_THROW((void)loocv_bandwidth(t, tiny), NumericError);
}

TEST(Loocv, DefaultCandidates) {
    const auto c = default_bandwidth_candidates();
    ASSERT_EQ(c.size(), 60u);
    EXPECT_EQ(c.front(), 0.01);
    EXPECT_EQ(c.back(), 1.5);
    for (std::size_t k = 1; k < c.size(); ++k) EXPECT_NEAR(c[k] / c[k - 1], c[1] / c[0], 1e-12);
}

}  // namespace
}  // namespace etas
