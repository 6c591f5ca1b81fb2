#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace etas {

/// Distinct magnitudes with their occurrence counts.
struct FrequencyTable {
    std::vector<double> magnitudes;   ///< strictly increasing
    std::vector<double> frequencies;  ///< >= 1

    [[nodiscard]] std::size_t size() const noexcept { return magnitudes.size(); }
    /// Throws std::invalid_argument unless the table has >= 2 rows, increasing magnitudes
    /// and frequencies >= 1.
    void validate() const;
};

/// Bins raw magnitudes to multiples of `resolution` and counts them.
[[nodiscard]] FrequencyTable make_frequency_table(std::span<const double> magnitudes,
                                                  double resolution = 0.1);

inline constexpr std::size_t kDensityGridSize = 1000;

/// `size` equispaced points from lo to hi inclusive.
[[nodiscard]] std::vector<double> magnitude_grid(double lo, double hi,
                                                 std::size_t size = kDensityGridSize);

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> values;
    double bandwidth{0.0};
};

[[nodiscard]] double gaussian_kernel(double x);

/// Nadaraya-Watson weighting of the frequencies with a Gaussian kernel:
///   M(m) = sum_i f_i K((m - m_i)/gamma) / sum_i K((m - m_i)/gamma).
/// Weights are evaluated relative to the nearest magnitude, so grid points far from the
/// data get the nearest frequency instead of 0/0.
[[nodiscard]] DensityEstimate estimate_density(const FrequencyTable& table,
                                               std::span<const double> grid, double gamma);

struct BandwidthSelection {
    double gamma{0.0};
    std::vector<double> candidates;
    std::vector<double> scores;  ///< +inf where a leave-one-out denominator underflowed
};

/// Leave-one-out score sum_i |f_hat_i - f_i| for one bandwidth (+inf on underflow).
[[nodiscard]] double loocv_score(const FrequencyTable& table, double gamma);

/// Candidate with the smallest score; ties resolve to the smaller bandwidth.
[[nodiscard]] BandwidthSelection loocv_bandwidth(const FrequencyTable& table,
                                                 std::span<const double> candidates);

/// 60 log-spaced bandwidths in [0.01, 1.5].
[[nodiscard]] std::vector<double> default_bandwidth_candidates();

}  // namespace etas
