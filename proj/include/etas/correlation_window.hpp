#pragma once

#include "etas/catalog.hpp"

#include <cstddef>
#include <vector>

namespace etas {

/// Sample autocorrelation of a count series at integer lags 0..max_lag.
struct AcfEstimate {
    std::vector<std::size_t> lags;
    std::vector<double> values;
    std::size_t n{0};
};

/// Two-parameter power law A * lag^{-exponent} fitted on the log-log scale.
struct PowerLawFit {
    double amplitude{0.0};
    double exponent{0.0};
    std::size_t delta_star{1};
    double sse{0.0};
    std::size_t lags_used{0};
    /// Two-sided t-test p-value of the log-log slope.
    double slope_p_value{1.0};

    [[nodiscard]] double model(double lag) const;
};

/// R(d) = sum_{t=1}^{n-d} (X_t - mean)(X_{t+d} - mean) / ((n - d) V), V the (n-1) variance.
/// R(0) is therefore (n - 1) / n.
[[nodiscard]] AcfEstimate autocorrelation(const CountSeries& series, std::size_t max_lag);

/// Least squares of log R = log A - b log d over lags in [first_lag, last_lag] with R > 0.
/// `delta_star` of the result uses the default 0.05 threshold, or 0 when the fit does not decay.
[[nodiscard]] PowerLawFit fit_power_law(const AcfEstimate& acf, std::size_t first_lag,
                                        std::size_t last_lag);

/// Default lag range: 1..min(50, n / 4).
[[nodiscard]] std::size_t default_max_fit_lag(std::size_t n);

/// Smallest integer d >= 1 such that the model is below `threshold` for every lag > d.
[[nodiscard]] std::size_t select_delta_star(const PowerLawFit& fit, double threshold = 0.05);

/// Two-sided p-values of R at lags 1..max_lag under the white-noise null N(0, 1/n).
[[nodiscard]] std::vector<double> acf_significance(const AcfEstimate& acf, std::size_t max_lag);

}  // namespace etas
