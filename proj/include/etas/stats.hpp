#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace etas::stats {

[[nodiscard]] double mean(std::span<const double> x);
/// Sample variance with the (n - 1) denominator.
[[nodiscard]] double sample_variance(std::span<const double> x);

/// Two-sided tail probability P(|Z| >= |z|) for a standard normal.
[[nodiscard]] double normal_two_sided_p(double z);

/// Two-sided p-value of a Student t statistic.
[[nodiscard]] double student_t_two_sided_p(double t, double dof);

struct KsResult {
    double statistic{0.0};
    double p_value{1.0};
};

/// Kolmogorov survival function Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
[[nodiscard]] double kolmogorov_survival(double lambda);

/// One-sample KS test against a continuous CDF (asymptotic p-value with Stephens' correction).
[[nodiscard]] KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// KS test of a sample against Exp(1).
[[nodiscard]] KsResult ks_test_unit_exponential(std::vector<double> sample);

/// Successive differences of a sorted sequence.
[[nodiscard]] std::vector<double> gaps(std::span<const double> sorted);

}  // namespace etas::stats
