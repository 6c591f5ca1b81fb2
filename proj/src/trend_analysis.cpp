#include "etas/trend_analysis.hpp"

#include "etas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace etas {

namespace {

void finish_trigger_means(GroupSet& groups, const std::array<std::set<std::size_t>, kSubintervalCount>& triggers,
                          const Catalog& cat) {
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        groups[k].trigger_count = triggers[k].size();
        if (triggers[k].empty()) continue;
        double sum = 0.0;
        for (auto idx : triggers[k]) sum += cat.events[idx].magnitude;
        groups[k].trigger_mean = sum / static_cast<double>(triggers[k].size());
    }
}

}  // namespace

std::optional<std::size_t> SubintervalScheme::locate(double m) const {
    // Scanning downwards gives a shared endpoint to the higher interval.
    for (std::size_t k = kSubintervalCount; k-- > 0;) {
        if (intervals[k].contains(m)) return k;
    }
    return std::nullopt;
}

SubintervalScheme make_subintervals(std::span<const double> trigger_pool, double m0, double m_max,
                                    const std::optional<IntervalSet>& manual) {
    SubintervalScheme scheme;
    auto count_members = [&] {
        scheme.counts.fill(0);
        for (double m : trigger_pool) {
            if (auto k = scheme.locate(m)) ++scheme.counts[*k];
        }
    };

    if (manual) {
        const auto& iv = *manual;
        for (std::size_t k = 0; k < kSubintervalCount; ++k) {
            if (!(iv[k].lo <= iv[k].hi)) throw std::invalid_argument("make_subintervals: interval with lo > hi");
            if (iv[k].lo < m0 || iv[k].hi > m_max) {
                std::ostringstream os;
                os << "make_subintervals: interval [" << iv[k].lo << ", " << iv[k].hi << "] outside [" << m0
                   << ", " << m_max << "]";
                throw std::invalid_argument(os.str());
            }
            if (k > 0 && !(iv[k - 1].hi <= iv[k].lo)) {
                throw std::invalid_argument("make_subintervals: intervals overlap or are out of order");
            }
        }
        scheme.intervals = iv;
        count_members();
        for (auto c : scheme.counts) {
            if (c == 0) throw std::invalid_argument("make_subintervals: a manual interval has no members");
        }
        const auto [lo, hi] = std::minmax_element(scheme.counts.begin(), scheme.counts.end());
        scheme.balanced = *hi <= 2 * *lo;
        return scheme;
    }

    constexpr std::size_t kMinPool = 40;
    if (trigger_pool.size() < kMinPool) {
        throw std::invalid_argument("make_subintervals: trigger pool has fewer than 40 members");
    }
    std::vector<double> sorted(trigger_pool.begin(), trigger_pool.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    // Admissible cut positions: indices where the value changes.
    std::vector<std::size_t> cuts;
    for (std::size_t i = 1; i < n; ++i) {
        if (sorted[i] > sorted[i - 1]) cuts.push_back(i);
    }
    if (cuts.size() < kSubintervalCount - 1) {
        throw std::invalid_argument("make_subintervals: too few distinct magnitudes in the pool");
    }
    auto apply = [&](const std::array<std::size_t, kSubintervalCount + 1>& bounds) {
        for (std::size_t k = 0; k < kSubintervalCount; ++k) {
            scheme.intervals[k] = {sorted[bounds[k]], sorted[bounds[k + 1] - 1]};
        }
        count_members();
    };
    auto imbalance = [](const std::array<std::size_t, kSubintervalCount + 1>& b) {
        std::size_t lo = std::numeric_limits<std::size_t>::max(), hi = 0;
        for (std::size_t k = 0; k < kSubintervalCount; ++k) {
            lo = std::min(lo, b[k + 1] - b[k]);
            hi = std::max(hi, b[k + 1] - b[k]);
        }
        return lo == 0 ? std::numeric_limits<double>::infinity() : static_cast<double>(hi) / static_cast<double>(lo);
    };

    // First choice: the admissible cuts nearest the quartiles.
    std::array<std::size_t, kSubintervalCount + 1> bounds{0, 0, 0, 0, n};
    bool quartiles_ok = true;
    for (std::size_t q = 1; q < kSubintervalCount && quartiles_ok; ++q) {
        const double target = static_cast<double>(q * n) / static_cast<double>(kSubintervalCount);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (auto c : cuts) {
            if (c <= bounds[q - 1]) continue;
            const double dist = std::abs(static_cast<double>(c) - target);
            if (dist < best_dist) {
                best_dist = dist;
                best = c;
            }
        }
        quartiles_ok = best != 0 && best < n;
        bounds[q] = best;
    }
    if (quartiles_ok && imbalance(bounds) <= 2.0) {
        apply(bounds);
        return scheme;
    }

    // Heavy repeated values (a large starter with many followers) can defeat the quartile
    // cuts. Search cut triples on a thinned candidate set for the smallest max/min ratio.
    constexpr std::size_t kGrid = 400;
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        const std::size_t prev = j == 0 ? 0 : cuts[j - 1];
        const std::size_t next = j + 1 == cuts.size() ? n : cuts[j + 1];
        if (prev * kGrid / n != cuts[j] * kGrid / n || cuts[j] * kGrid / n != next * kGrid / n) {
            cand.push_back(cuts[j]);
        }
    }
    double best_ratio = std::numeric_limits<double>::infinity();
    std::array<std::size_t, kSubintervalCount + 1> best_bounds{};
    for (std::size_t i1 = 0; i1 + 2 < cand.size(); ++i1) {
        for (std::size_t i3 = i1 + 2; i3 < cand.size(); ++i3) {
            // Middle cut: the candidate nearest the midpoint between the outer cuts.
            const double mid = 0.5 * static_cast<double>(cand[i1] + cand[i3]);
            auto it = std::lower_bound(cand.begin() + static_cast<std::ptrdiff_t>(i1) + 1,
                                       cand.begin() + static_cast<std::ptrdiff_t>(i3), mid,
                                       [](std::size_t c, double v) { return static_cast<double>(c) < v; });
            for (auto jt : {it, it - 1}) {
                const auto i2 = static_cast<std::size_t>(jt - cand.begin());
                if (i2 <= i1 || i2 >= i3) continue;
                const std::array<std::size_t, kSubintervalCount + 1> b{0, cand[i1], cand[i2], cand[i3], n};
                const double r = imbalance(b);
                if (r < best_ratio) {
                    best_ratio = r;
                    best_bounds = b;
                }
            }
        }
    }
    if (!std::isfinite(best_ratio)) {
        throw std::invalid_argument("make_subintervals: too few distinct magnitudes in the pool");
    }
    apply(best_bounds);
    scheme.balanced = best_ratio <= 2.0;
    return scheme;
}

std::vector<double> windowed_trigger_pool(const Catalog& cat, double delta_star) {
    std::vector<double> pool;
    const auto& ev = cat.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const double t = ev[i].time;
        for (std::size_t j = i + 1; j < ev.size() && ev[j].time <= t + delta_star; ++j) {
            if (ev[j].time > t) pool.push_back(ev[i].magnitude);
        }
    }
    return pool;
}

GroupSet windowed_groups(const Catalog& cat, double delta_star, const SubintervalScheme& scheme) {
    if (!(delta_star >= 0.0)) throw std::invalid_argument("windowed_groups: delta_star must be >= 0");
    GroupSet groups;
    std::array<std::set<std::size_t>, kSubintervalCount> triggers;
    for (std::size_t k = 0; k < kSubintervalCount; ++k) groups[k].interval = scheme.intervals[k];
    const auto& ev = cat.events;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto k = scheme.locate(ev[i].magnitude);
        if (!k) continue;
        const double t = ev[i].time;
        for (std::size_t j = i + 1; j < ev.size() && ev[j].time <= t + delta_star; ++j) {
            if (!(ev[j].time > t)) continue;
            groups[*k].members.push_back(ev[j].magnitude);
            triggers[*k].insert(i);
        }
    }
    finish_trigger_means(groups, triggers, cat);
    return groups;
}

std::vector<double> mother_trigger_pool(const Catalog& cat, const Attribution& attribution) {
    if (attribution.size() != cat.size()) throw std::invalid_argument("attribution does not match the catalog");
    std::vector<double> pool;
    for (const auto& a : attribution) {
        if (a.mother.is_index()) pool.push_back(cat.events[static_cast<std::size_t>(a.mother.value)].magnitude);
    }
    return pool;
}

GroupSet mother_groups(const Catalog& cat, const Attribution& attribution, const SubintervalScheme& scheme) {
    if (attribution.size() != cat.size()) throw std::invalid_argument("attribution does not match the catalog");
    GroupSet groups;
    std::array<std::set<std::size_t>, kSubintervalCount> triggers;
    for (std::size_t k = 0; k < kSubintervalCount; ++k) groups[k].interval = scheme.intervals[k];
    for (std::size_t i = 0; i < cat.size(); ++i) {
        const auto& mother = attribution[i].mother;
        if (!mother.is_index()) continue;
        const auto j = static_cast<std::size_t>(mother.value);
        if (j >= i) throw std::invalid_argument("mother_groups: mother does not precede its daughter");
        const auto k = scheme.locate(cat.events[j].magnitude);
        if (!k) continue;
        groups[*k].members.push_back(cat.events[i].magnitude);
        triggers[*k].insert(j);
    }
    finish_trigger_means(groups, triggers, cat);
    return groups;
}

Attribution attribution_from_parents(const Catalog& cat) {
    Attribution out(cat.size());
    for (std::size_t i = 0; i < cat.size(); ++i) {
        out[i].mother = cat.events[i].parent.is_index() ? cat.events[i].parent : ParentRef::background();
        out[i].contribution = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

TrendResult trend_from_summary(std::span<const double> x, std::span<const double> raw_means,
                               std::span<const double> standard_errors, std::span<const std::size_t> counts) {
    const std::size_t n = x.size();
    if (n < 3 || raw_means.size() != n) throw std::invalid_argument("trend: needs >= 3 matching points");
    if (!standard_errors.empty() && standard_errors.size() != n) {
        throw std::invalid_argument("trend: standard_errors length mismatch");
    }
    TrendResult res;
    res.x.assign(x.begin(), x.end());
    res.raw_means.assign(raw_means.begin(), raw_means.end());
    res.counts.assign(counts.begin(), counts.end());
    const double avg = stats::mean(raw_means);
    if (!(avg > 0.0)) throw std::invalid_argument("trend: average of the means must be positive");
    for (std::size_t k = 0; k < n; ++k) res.normalized_means.push_back(raw_means[k] / avg);
    if (!standard_errors.empty()) {
        res.standard_errors.assign(standard_errors.begin(), standard_errors.end());
        for (double se : standard_errors) res.normalized_standard_errors.push_back(se / avg);
    }

    const auto& y = res.normalized_means;
    const double mx = stats::mean(x);
    const double my = stats::mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        syy += (y[k] - my) * (y[k] - my);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("trend: trigger means are all equal");
    res.slope = sxy / sxx;
    res.intercept = my - res.slope * mx;
    if (syy == 0.0) {
        res.r = 0.0;
        res.p_value = 1.0;
        return res;
    }
    res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double dof = static_cast<double>(n - 2);
    const double one_minus = 1.0 - res.r * res.r;
    res.p_value = one_minus <= 0.0 ? 0.0
                                   : stats::student_t_two_sided_p(res.r * std::sqrt(dof / one_minus), dof);
    return res;
}

TrendResult trend(const GroupSet& groups) {
    std::vector<double> x, means, ses;
    std::vector<std::size_t> counts;
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        const auto& g = groups[k];
        if (g.members.size() < 2) {
            throw std::invalid_argument("trend: group " + std::to_string(k + 1) + " has fewer than two members");
        }
        x.push_back(g.trigger_mean);
        means.push_back(stats::mean(g.members));
        ses.push_back(std::sqrt(stats::sample_variance(g.members) / static_cast<double>(g.members.size())));
        counts.push_back(g.members.size());
    }
    return trend_from_summary(x, means, ses, counts);
}

}  // namespace etas
