#include "etas/kde.hpp"

#include "etas/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace etas {

void FrequencyTable::validate() const {
    if (magnitudes.size() != frequencies.size()) {
        throw std::invalid_argument("FrequencyTable: column lengths differ");
    }
    if (magnitudes.size() < 2) throw std::invalid_argument("FrequencyTable: needs at least two rows");
    for (std::size_t i = 0; i < magnitudes.size(); ++i) {
        if (!std::isfinite(magnitudes[i])) throw std::invalid_argument("FrequencyTable: non-finite magnitude");
        if (i > 0 && !(magnitudes[i] > magnitudes[i - 1])) {
            throw std::invalid_argument("FrequencyTable: magnitudes must be strictly increasing");
        }
        if (!(frequencies[i] >= 1.0)) throw std::invalid_argument("FrequencyTable: frequency below 1");
    }
}

FrequencyTable make_frequency_table(std::span<const double> magnitudes, double resolution) {
    if (!(resolution > 0.0)) throw std::invalid_argument("make_frequency_table: resolution must be positive");
    std::map<long long, double> bins;
    for (double m : magnitudes) {
        if (!std::isfinite(m)) throw std::invalid_argument("make_frequency_table: non-finite magnitude");
        bins[std::llround(m / resolution)] += 1.0;
    }
    FrequencyTable table;
    for (const auto& [key, count] : bins) {
        table.magnitudes.push_back(static_cast<double>(key) * resolution);
        table.frequencies.push_back(count);
    }
    return table;
}

std::vector<double> magnitude_grid(double lo, double hi, std::size_t size) {
    if (size < 2 || !(lo < hi)) throw std::invalid_argument("magnitude_grid: needs lo < hi and size >= 2");
    std::vector<double> g(size);
    const double step = (hi - lo) / static_cast<double>(size - 1);
    for (std::size_t k = 0; k < size; ++k) g[k] = lo + static_cast<double>(k) * step;
    g.back() = hi;
    return g;
}

double gaussian_kernel(double x) {
    return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

DensityEstimate estimate_density(const FrequencyTable& table, std::span<const double> grid, double gamma) {
    table.validate();
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("estimate_density: gamma must be positive");
    DensityEstimate out;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(grid.size());
    out.bandwidth = gamma;
    const double inv_two_gamma_sq = 0.5 / (gamma * gamma);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        // Exponents are shifted by the nearest magnitude; the common factor cancels in the ratio.
        double nearest = std::numeric_limits<double>::infinity();
        for (double m : table.magnitudes) nearest = std::min(nearest, (grid[k] - m) * (grid[k] - m));
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < table.size(); ++i) {
            const double d = grid[k] - table.magnitudes[i];
            const double w = std::exp(-(d * d - nearest) * inv_two_gamma_sq);
            num += table.frequencies[i] * w;
            den += w;
        }
        if (!(den >= 1.0) || !std::isfinite(num)) {
            std::ostringstream os;
            os << "estimate_density: kernel weights degenerate at m=" << grid[k] << " (gamma=" << gamma << ")";
            throw NumericError(os.str());
        }
        out.values[k] = num / den;
    }
    return out;
}

double loocv_score(const FrequencyTable& table, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("loocv_score: gamma must be positive");
    double score = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < table.size(); ++j) {
            if (j == i) continue;
            const double w = gaussian_kernel((table.magnitudes[i] - table.magnitudes[j]) / gamma);
            num += table.frequencies[j] * w;
            den += w;
        }
        if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
        score += std::abs(num / den - table.frequencies[i]);
    }
    return score;
}

BandwidthSelection loocv_bandwidth(const FrequencyTable& table, std::span<const double> candidates) {
    table.validate();
    if (table.size() < 3) throw std::invalid_argument("loocv_bandwidth: needs at least three rows");
    if (candidates.empty()) throw std::invalid_argument("loocv_bandwidth: no candidates");
    BandwidthSelection sel;
    sel.candidates.assign(candidates.begin(), candidates.end());
    sel.scores.reserve(candidates.size());
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (!(candidates[k] > 0.0)) throw std::invalid_argument("loocv_bandwidth: candidates must be positive");
        if (k > 0 && !(candidates[k] > candidates[k - 1])) {
            throw std::invalid_argument("loocv_bandwidth: candidates must be increasing");
        }
        const double s = loocv_score(table, candidates[k]);
        sel.scores.push_back(s);
        if (s < best) {
            best = s;
            sel.gamma = candidates[k];
            found = true;
        }
    }
    if (!found) throw NumericError("loocv_bandwidth: every candidate bandwidth underflows");
    return sel;
}

std::vector<double> default_bandwidth_candidates() {
    constexpr std::size_t count = 60;
    constexpr double lo = 0.01, hi = 1.5;
    std::vector<double> c(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) c[k] = lo * std::exp(step * static_cast<double>(k));
    c.front() = lo;
    c.back() = hi;
    return c;
}

}  // namespace etas
