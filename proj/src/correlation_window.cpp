#include "etas/correlation_window.hpp"

#include "etas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace etas {

double PowerLawFit::model(double lag) const {
    return amplitude * std::pow(lag, -exponent);
}

AcfEstimate autocorrelation(const CountSeries& series, std::size_t max_lag) {
    const std::size_t n = series.n();
    if (n < max_lag + 2) throw std::invalid_argument("autocorrelation: series shorter than max_lag + 2");
    std::vector<double> x(series.counts.begin(), series.counts.end());
    const double mu = stats::mean(x);
    const double var = stats::sample_variance(x);
    if (!(var > 0.0)) throw std::invalid_argument("autocorrelation: constant series (zero variance)");
    for (auto& v : x) v -= mu;

    AcfEstimate acf;
    acf.n = n;
    acf.lags.resize(max_lag + 1);
    acf.values.resize(max_lag + 1);
    for (std::size_t d = 0; d <= max_lag; ++d) {
        double sum = 0.0;
        for (std::size_t t = 0; t + d < n; ++t) sum += x[t] * x[t + d];
        acf.lags[d] = d;
        acf.values[d] = sum / (static_cast<double>(n - d) * var);
    }
    return acf;
}

PowerLawFit fit_power_law(const AcfEstimate& acf, std::size_t first_lag, std::size_t last_lag) {
    if (first_lag < 1 || last_lag < first_lag) throw std::invalid_argument("fit_power_law: bad lag range");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < acf.lags.size(); ++k) {
        const auto d = acf.lags[k];
        if (d < first_lag || d > last_lag || !(acf.values[k] > 0.0)) continue;
        lx.push_back(std::log(static_cast<double>(d)));
        ly.push_back(std::log(acf.values[k]));
    }
    if (lx.size() < 3) {
        throw std::invalid_argument("fit_power_law: fewer than 3 positive autocorrelations in range");
    }
    const double mx = stats::mean(lx);
    const double my = stats::mean(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    PowerLawFit fit;
    fit.amplitude = std::exp(intercept);
    fit.exponent = -slope;
    fit.lags_used = lx.size();
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double r = ly[k] - (intercept + slope * lx[k]);
        fit.sse += r * r;
    }
    if (lx.size() > 2) {
        const double dof = static_cast<double>(lx.size() - 2);
        const double se = std::sqrt(fit.sse / dof / sxx);
        fit.slope_p_value = se > 0.0 ? stats::student_t_two_sided_p(slope / se, dof) : 0.0;
    }
    if (!(fit.amplitude > 0.0) || !std::isfinite(fit.amplitude)) {
        throw std::invalid_argument("fit_power_law: non-positive fitted amplitude");
    }
    fit.delta_star = fit.exponent > 0.0 ? select_delta_star(fit) : 0;
    return fit;
}

std::size_t default_max_fit_lag(std::size_t n) {
    return std::max<std::size_t>(1, std::min<std::size_t>(50, n / 4));
}

std::size_t select_delta_star(const PowerLawFit& fit, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("select_delta_star: threshold must be positive");
    if (!(fit.amplitude > 0.0) || !(fit.exponent > 0.0)) {
        throw std::invalid_argument("select_delta_star: needs a decaying power law (A > 0, b > 0)");
    }
    // The model is decreasing, so it is below threshold for all lags > d iff model(d + 1) < threshold.
    const double crossing = std::pow(fit.amplitude / threshold, 1.0 / fit.exponent);
    if (crossing < 1.0) return 1;
    if (crossing > 1e15) throw std::invalid_argument("select_delta_star: window too large to represent");
    auto d = static_cast<std::size_t>(std::floor(crossing));
    while (!(fit.model(static_cast<double>(d + 1)) < threshold)) ++d;
    while (d > 1 && fit.model(static_cast<double>(d)) < threshold) --d;
    return std::max<std::size_t>(d, 1);
}

std::vector<double> acf_significance(const AcfEstimate& acf, std::size_t max_lag) {
    if (max_lag >= acf.values.size()) throw std::invalid_argument("acf_significance: lag beyond estimate");
    const double sn = std::sqrt(static_cast<double>(acf.n));
    std::vector<double> p(max_lag);
    for (std::size_t d = 1; d <= max_lag; ++d) p[d - 1] = stats::normal_two_sided_p(acf.values[d] * sn);
    return p;
}

}  // namespace etas
