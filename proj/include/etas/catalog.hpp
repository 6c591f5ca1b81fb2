#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace etas {

/// Closed time interval in days.
struct TimeWindow {
    double start{0.0};
    double end{0.0};

    [[nodiscard]] double length() const noexcept { return end - start; }
    [[nodiscard]] bool contains(double t) const noexcept { return t >= start && t <= end; }
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Parent label of an event: an index into the owning catalog, or one of the two sentinels.
struct ParentRef {
    static constexpr std::int64_t kBackground = -1;
    static constexpr std::int64_t kUnknown = -2;

    std::int64_t value{kUnknown};

    [[nodiscard]] static constexpr ParentRef background() noexcept { return {kBackground}; }
    [[nodiscard]] static constexpr ParentRef unknown() noexcept { return {kUnknown}; }
    [[nodiscard]] static constexpr ParentRef index(std::size_t i) noexcept {
        return {static_cast<std::int64_t>(i)};
    }

    [[nodiscard]] constexpr bool is_background() const noexcept { return value == kBackground; }
    [[nodiscard]] constexpr bool is_unknown() const noexcept { return value == kUnknown; }
    [[nodiscard]] constexpr bool is_index() const noexcept { return value >= 0; }
    friend constexpr bool operator==(ParentRef, ParentRef) = default;
};

struct Event {
    double time{0.0};       ///< days from the catalog origin
    double magnitude{0.0};
    std::optional<double> latitude;   ///< degrees
    std::optional<double> longitude;  ///< degrees
    std::optional<double> depth;      ///< km, >= 0
    ParentRef parent{};

    [[nodiscard]] bool has_location() const noexcept { return latitude && longitude; }
    friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered event sequence with its completeness magnitude and observation window.
struct Catalog {
    std::vector<Event> events;
    double m0{0.0};
    TimeWindow window{};

    [[nodiscard]] std::size_t size() const noexcept { return events.size(); }
    [[nodiscard]] bool empty() const noexcept { return events.empty(); }
    [[nodiscard]] std::vector<double> times() const;
    [[nodiscard]] std::vector<double> magnitudes() const;
    [[nodiscard]] double max_magnitude() const;
    friend bool operator==(const Catalog&, const Catalog&) = default;
};

/// Daily event counts X_t.
struct CountSeries {
    std::vector<std::int64_t> counts;

    [[nodiscard]] std::size_t n() const noexcept { return counts.size(); }
};

enum class TimeFormat {
    automatic,  ///< ISO-8601 if the first data row's time contains '-' after position 0, else days
    days,
    iso8601,
};

[[nodiscard]] TimeFormat parse_time_format(const std::string& tag);

/// Reads the CSV catalog layout `time,magnitude[,latitude,longitude,depth][,parent]`.
///
/// Optional leading `# key: value` lines carry `m0` and `window` (two numbers). When
/// a window line is present the times are kept verbatim; otherwise they are shifted so
/// the first event sits at day 0 and the window spans first to last event.
/// Malformed rows raise IoError naming the 1-based line number.
[[nodiscard]] Catalog load_catalog(const std::filesystem::path& path,
                                   TimeFormat format = TimeFormat::automatic);
[[nodiscard]] Catalog parse_catalog(const std::string& text,
                                    TimeFormat format = TimeFormat::automatic);

/// Inverse of parse_catalog for catalogs with real-valued day times.
[[nodiscard]] std::string format_catalog(const Catalog& cat);
void save_catalog(const std::filesystem::path& path, const Catalog& cat);

/// Stable sort by time; equal times keep input order. Parent indices are remapped.
void sort_by_time(Catalog& cat);

/// Keeps events with magnitude >= m0, depth <= max_depth (missing depth passes) and
/// time inside `window`. Parent indices are remapped; parents that were dropped become unknown.
[[nodiscard]] Catalog filter_catalog(const Catalog& cat, double m0, double max_depth,
                                     TimeWindow window);

/// counts[k] = events with time in [start + k, start + k + 1); the last bin is closed.
[[nodiscard]] CountSeries daily_counts(const Catalog& cat);

inline constexpr double kEarthRadiusKm = 6371.0;

[[nodiscard]] double haversine_km(const Event& a, const Event& b);
[[nodiscard]] double mean_pair_distance(std::span<const std::pair<Event, Event>> pairs);

}  // namespace etas
