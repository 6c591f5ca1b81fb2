#pragma once

#include "etas/catalog.hpp"
#include "etas/etas_model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace etas {

inline constexpr std::size_t kSubintervalCount = 4;

/// Closed magnitude interval [lo, hi].
struct MagnitudeInterval {
    double lo{0.0};
    double hi{0.0};

    [[nodiscard]] bool contains(double m) const noexcept { return m >= lo && m <= hi; }
    friend bool operator==(const MagnitudeInterval&, const MagnitudeInterval&) = default;
};

using IntervalSet = std::array<MagnitudeInterval, kSubintervalCount>;

struct SubintervalScheme {
    IntervalSet intervals{};
    std::array<std::size_t, kSubintervalCount> counts{};  ///< pool members per interval
    /// Pool counts lie within a factor 2 of each other.
    bool balanced{true};

    /// Index of the interval containing m, if any. Adjacent intervals may share an
    /// endpoint; a magnitude equal to it belongs to the higher interval.
    [[nodiscard]] std::optional<std::size_t> locate(double m) const;
};

/// Builds the four trigger-magnitude intervals.
///
/// `trigger_pool` holds one triggering magnitude per downstream member (per pair), so
/// balancing the pool balances the groups. With `manual` the intervals are validated
/// (ordered, overlapping at most in a shared endpoint, inside [m0, m_max],
/// nonempty) and used as given. Otherwise cuts are placed at the distinct pool values
/// nearest the quartiles; if that leaves counts more than a factor 2 apart, the cut
/// triple with the smallest max/min ratio is used instead. `balanced` reports whether
/// the final counts are within a factor 2.
[[nodiscard]] SubintervalScheme make_subintervals(std::span<const double> trigger_pool, double m0,
                                                  double m_max,
                                                  const std::optional<IntervalSet>& manual = std::nullopt);

struct MagnitudeGroup {
    MagnitudeInterval interval{};
    std::vector<double> members;  ///< triggered magnitudes, one per pair
    double trigger_mean{0.0};     ///< mean magnitude of the distinct triggering events
    std::size_t trigger_count{0};
};

using GroupSet = std::array<MagnitudeGroup, kSubintervalCount>;

/// Starter magnitude of every (starter, follower) pair with follower time in (t, t + delta_star].
[[nodiscard]] std::vector<double> windowed_trigger_pool(const Catalog& cat, double delta_star);

/// For each starter in interval k, the magnitudes of all events in (t, t + delta_star].
/// A follower inside several starters' windows is counted once per starter.
[[nodiscard]] GroupSet windowed_groups(const Catalog& cat, double delta_star,
                                       const SubintervalScheme& scheme);

/// Mother magnitude of every non-background event.
[[nodiscard]] std::vector<double> mother_trigger_pool(const Catalog& cat, const Attribution& attribution);

/// Group k holds the magnitudes of the triggered events whose mother lies in interval k.
[[nodiscard]] GroupSet mother_groups(const Catalog& cat, const Attribution& attribution,
                                     const SubintervalScheme& scheme);

/// Attribution taken from the catalog's own parent labels (ground truth for simulated
/// catalogs); unknown parents count as background.
[[nodiscard]] Attribution attribution_from_parents(const Catalog& cat);

struct TrendResult {
    std::vector<double> x;  ///< trigger means
    std::vector<double> raw_means;
    std::vector<double> normalized_means;
    std::vector<double> standard_errors;             ///< sd / sqrt(count), raw scale
    std::vector<double> normalized_standard_errors;  ///< divided by the average raw mean
    std::vector<std::size_t> counts;
    double slope{0.0};
    double intercept{0.0};
    double r{0.0};
    double p_value{1.0};
};

/// Normalizes the means by their average, regresses them on x and tests the Pearson
/// correlation with a two-sided t test on n - 2 degrees of freedom.
[[nodiscard]] TrendResult trend_from_summary(std::span<const double> x, std::span<const double> raw_means,
                                             std::span<const double> standard_errors = {},
                                             std::span<const std::size_t> counts = {});

/// Throws std::invalid_argument if a group has fewer than two members.
[[nodiscard]] TrendResult trend(const GroupSet& groups);

}  // namespace etas
