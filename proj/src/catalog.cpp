#include "etas/catalog.hpp"

#include "etas/error.hpp"
#include "etas/text_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace etas {

namespace {

constexpr double kSecondsPerDay = 86400.0;

// Accepts YYYY-MM-DD, optionally followed by 'T' or ' ' and HH:MM[:SS[.fff]], optional 'Z'.
double parse_iso8601_days(std::string_view s) {
    s = text::trim(s);
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    auto to_int = [&](std::string_view part) {
        int v = 0;
        if (part.empty()) throw std::invalid_argument("bad timestamp");
        for (char ch : part) {
            if (ch < '0' || ch > '9') throw std::invalid_argument("bad timestamp");
            v = v * 10 + (ch - '0');
        }
        return v;
    };
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') {
        throw std::invalid_argument("bad timestamp '" + std::string(s) + "'");
    }
    const int year = to_int(s.substr(0, 4));
    const int month = to_int(s.substr(5, 2));
    const int day = to_int(s.substr(8, 2));
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid date '" + std::string(s) + "'");
    double seconds = 0.0;
    if (s.size() > 10) {
        if (s[10] != 'T' && s[10] != ' ') {
            throw std::invalid_argument("bad timestamp '" + std::string(s) + "'");
        }
        const auto fields = text::split(s.substr(11), ':');
        if (fields.size() < 2 || fields.size() > 3) {
            throw std::invalid_argument("bad time of day in '" + std::string(s) + "'");
        }
        const int hh = to_int(fields[0]);
        const int mm = to_int(fields[1]);
        const double ss = fields.size() == 3 ? text::parse_double(fields[2]) : 0.0;
        if (hh > 23 || mm > 59 || ss < 0.0 || ss >= 61.0) {
            throw std::invalid_argument("time of day out of range in '" + std::string(s) + "'");
        }
        seconds = hh * 3600.0 + mm * 60.0 + ss;
    }
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    return static_cast<double>(days) + seconds / kSecondsPerDay;
}

bool looks_like_iso(std::string_view s) {
    s = text::trim(s);
    return s.size() >= 10 && s[4] == '-' && s[7] == '-';
}

std::optional<double> optional_field(const std::vector<std::string>& fields, int col) {
    if (col < 0) return std::nullopt;
    const auto v = text::trim(fields[static_cast<std::size_t>(col)]);
    if (v.empty()) return std::nullopt;
    return text::parse_double(v);
}

}  // namespace

std::vector<double> Catalog::times() const {
    std::vector<double> out(events.size());
    std::transform(events.begin(), events.end(), out.begin(), [](const Event& e) { return e.time; });
    return out;
}

std::vector<double> Catalog::magnitudes() const {
    std::vector<double> out(events.size());
    std::transform(events.begin(), events.end(), out.begin(),
                   [](const Event& e) { return e.magnitude; });
    return out;
}

double Catalog::max_magnitude() const {
    if (events.empty()) throw std::invalid_argument("max_magnitude of an empty catalog");
    return std::max_element(events.begin(), events.end(),
                            [](const Event& a, const Event& b) { return a.magnitude < b.magnitude; })
        ->magnitude;
}

TimeFormat parse_time_format(const std::string& tag) {
    if (tag == "auto") return TimeFormat::automatic;
    if (tag == "days") return TimeFormat::days;
    if (tag == "iso" || tag == "iso8601") return TimeFormat::iso8601;
    throw std::invalid_argument("unknown time format '" + tag + "' (expected auto, days or iso)");
}

void sort_by_time(Catalog& cat) {
    const auto n = cat.events.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cat.events[a].time < cat.events[b].time;
    });
    std::vector<std::int64_t> new_pos(n);
    for (std::size_t k = 0; k < n; ++k) new_pos[order[k]] = static_cast<std::int64_t>(k);
    std::vector<Event> sorted;
    sorted.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Event e = cat.events[order[k]];
        if (e.parent.is_index()) {
            if (static_cast<std::size_t>(e.parent.value) >= n) {
                throw std::invalid_argument("parent index out of range");
            }
            e.parent.value = new_pos[static_cast<std::size_t>(e.parent.value)];
        }
        sorted.push_back(std::move(e));
    }
    cat.events = std::move(sorted);
}

Catalog parse_catalog(const std::string& text_in, TimeFormat format) {
    std::istringstream in(text_in);
    std::string line;
    std::size_t line_no = 0;
    std::optional<double> m0;
    std::optional<TimeWindow> window;

    int col_time = -1, col_mag = -1, col_lat = -1, col_lon = -1, col_depth = -1, col_parent = -1;
    std::size_t n_cols = 0;
    bool have_header = false;

    auto fail = [&](const std::string& what) -> IoError {
        return IoError("line " + std::to_string(line_no) + ": " + what);
    };

    Catalog cat;
    std::vector<std::string> raw_times;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            const auto body = text::trim(t.substr(1));
            const auto colon = body.find(':');
            if (colon == std::string_view::npos) continue;
            const auto key = text::trim(body.substr(0, colon));
            const auto value = text::trim(body.substr(colon + 1));
            try {
                if (key == "m0") {
                    m0 = text::parse_double(value);
                } else if (key == "window") {
                    const auto parts = text::split(value, ' ');
                    std::vector<double> nums;
                    for (const auto& p : parts) {
                        if (!text::trim(p).empty()) nums.push_back(text::parse_double(p));
                    }
                    if (nums.size() != 2 || !(nums[0] <= nums[1])) throw std::invalid_argument("window");
                    window = TimeWindow{nums[0], nums[1]};
                }
            } catch (const std::invalid_argument&) {
                throw fail("malformed metadata '" + std::string(t) + "'");
            }
            continue;
        }
        const auto fields = text::split(t, ',');
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const auto name = text::trim(fields[i]);
                const int idx = static_cast<int>(i);
                if (name == "time") col_time = idx;
                else if (name == "magnitude") col_mag = idx;
                else if (name == "latitude") col_lat = idx;
                else if (name == "longitude") col_lon = idx;
                else if (name == "depth") col_depth = idx;
                else if (name == "parent") col_parent = idx;
                else throw fail("unknown column '" + std::string(name) + "'");
            }
            if (col_time != 0 || col_mag != 1) {
                throw fail("header must start with 'time,magnitude'");
            }
            if ((col_lat < 0) != (col_lon < 0)) throw fail("latitude and longitude come together");
            n_cols = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != n_cols) {
            throw fail("expected " + std::to_string(n_cols) + " fields, found " +
                       std::to_string(fields.size()));
        }
        Event e;
        try {
            const auto time_text = text::trim(fields[0]);
            const bool iso = format == TimeFormat::iso8601 ||
                             (format == TimeFormat::automatic && looks_like_iso(time_text));
            e.time = iso ? parse_iso8601_days(time_text) : text::parse_double(time_text);
            e.magnitude = text::parse_double(fields[1]);
            e.latitude = optional_field(fields, col_lat);
            e.longitude = optional_field(fields, col_lon);
            e.depth = optional_field(fields, col_depth);
            if (col_parent >= 0) {
                const auto p = text::trim(fields[static_cast<std::size_t>(col_parent)]);
                if (!p.empty()) {
                    const double v = text::parse_double(p);
                    if (v != std::floor(v) || v < ParentRef::kUnknown) throw std::invalid_argument("parent");
                    e.parent.value = static_cast<std::int64_t>(v);
                }
            }
        } catch (const std::invalid_argument& ex) {
            throw fail(std::string("malformed row: ") + ex.what());
        }
        if (!std::isfinite(e.time)) throw fail("non-finite time");
        if (!std::isfinite(e.magnitude)) throw fail("non-finite magnitude");
        if (e.depth && !(*e.depth >= 0.0)) throw fail("negative depth");
        cat.events.push_back(std::move(e));
    }
    if (!have_header) throw IoError("missing header line");

    for (const auto& e : cat.events) {
        if (e.parent.is_index() && static_cast<std::size_t>(e.parent.value) >= cat.events.size()) {
            throw IoError("parent index " + std::to_string(e.parent.value) + " out of range");
        }
    }
    sort_by_time(cat);
    for (std::size_t i = 0; i < cat.events.size(); ++i) {
        const auto& p = cat.events[i].parent;
        if (p.is_index() && static_cast<std::size_t>(p.value) >= i) {
            throw IoError("event " + std::to_string(i) + " has a parent that does not precede it");
        }
    }

    if (window) {
        cat.window = *window;
        for (const auto& e : cat.events) {
            if (!cat.window.contains(e.time)) throw IoError("event time outside the declared window");
        }
    } else if (!cat.events.empty()) {
        const double origin = cat.events.front().time;
        for (auto& e : cat.events) e.time -= origin;
        cat.window = TimeWindow{0.0, cat.events.back().time};
    }
    if (m0) {
        cat.m0 = *m0;
    } else if (!cat.events.empty()) {
        cat.m0 = std::min_element(cat.events.begin(), cat.events.end(),
                                  [](const Event& a, const Event& b) { return a.magnitude < b.magnitude; })
                     ->magnitude;
    }
    return cat;
}

Catalog load_catalog(const std::filesystem::path& path, TimeFormat format) {
    const auto content = text::read_file(path);
    try {
        return parse_catalog(content, format);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::string format_catalog(const Catalog& cat) {
    const bool with_location = std::any_of(cat.events.begin(), cat.events.end(), [](const Event& e) {
        return e.latitude || e.longitude || e.depth;
    });
    const bool with_parent = std::any_of(cat.events.begin(), cat.events.end(),
                                         [](const Event& e) { return !e.parent.is_unknown(); });
    std::string out;
    out += "# m0: " + text::format_double(cat.m0) + "\n";
    out += "# window: " + text::format_double(cat.window.start) + " " +
           text::format_double(cat.window.end) + "\n";
    out += "time,magnitude";
    if (with_location) out += ",latitude,longitude,depth";
    if (with_parent) out += ",parent";
    out += "\n";
    auto opt = [](const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); };
    for (const auto& e : cat.events) {
        out += text::format_double(e.time);
        out += ',';
        out += text::format_double(e.magnitude);
        if (with_location) {
            out += ',' + opt(e.latitude) + ',' + opt(e.longitude) + ',' + opt(e.depth);
        }
        if (with_parent) {
            out += ',';
            if (!e.parent.is_unknown()) out += std::to_string(e.parent.value);
        }
        out += '\n';
    }
    return out;
}

void save_catalog(const std::filesystem::path& path, const Catalog& cat) {
    text::write_file_atomic(path, format_catalog(cat));
}

Catalog filter_catalog(const Catalog& cat, double m0, double max_depth, TimeWindow window) {
    if (!std::isfinite(m0)) throw std::invalid_argument("filter_catalog: m0 must be finite");
    if (!(max_depth > 0.0)) throw std::invalid_argument("filter_catalog: max_depth must be positive");
    if (!(window.start <= window.end)) throw std::invalid_argument("filter_catalog: empty window");

    Catalog out;
    out.m0 = m0;
    out.window = window;
    std::vector<std::int64_t> new_index(cat.events.size(), ParentRef::kUnknown);
    for (std::size_t i = 0; i < cat.events.size(); ++i) {
        const auto& e = cat.events[i];
        const bool keep = e.magnitude >= m0 && (!e.depth || *e.depth <= max_depth) &&
                          window.contains(e.time);
        if (!keep) continue;
        new_index[i] = static_cast<std::int64_t>(out.events.size());
        Event kept = e;
        if (kept.parent.is_index()) {
            kept.parent.value = new_index[static_cast<std::size_t>(kept.parent.value)];
        }
        out.events.push_back(std::move(kept));
    }
    return out;
}

CountSeries daily_counts(const Catalog& cat) {
    const double span = cat.window.length();
    if (!(span >= 2.0)) throw std::invalid_argument("daily_counts: window shorter than 2 days");
    const auto n = static_cast<std::size_t>(std::ceil(span));
    CountSeries series;
    series.counts.assign(n, 0);
    for (const auto& e : cat.events) {
        if (!cat.window.contains(e.time)) {
            throw std::invalid_argument("daily_counts: event outside the catalog window");
        }
        auto k = static_cast<std::size_t>(std::floor(e.time - cat.window.start));
        if (k >= n) k = n - 1;
        ++series.counts[k];
    }
    return series;
}

double haversine_km(const Event& a, const Event& b) {
    if (!a.has_location() || !b.has_location()) {
        throw std::invalid_argument("haversine_km: event without coordinates");
    }
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = *a.latitude * deg;
    const double phi2 = *b.latitude * deg;
    const double dphi = phi2 - phi1;
    const double dlambda = (*b.longitude - *a.longitude) * deg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double mean_pair_distance(std::span<const std::pair<Event, Event>> pairs) {
    if (pairs.empty()) throw std::invalid_argument("mean_pair_distance: empty pair list");
    double sum = 0.0;
    for (const auto& [a, b] : pairs) sum += haversine_km(a, b);
    return sum / static_cast<double>(pairs.size());
}

}  // namespace etas
