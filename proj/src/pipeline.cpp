#include "etas/pipeline.hpp"

#include "etas/error.hpp"
#include "etas/stats.hpp"
#include "etas/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace etas {

using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

json interval_set_to_json(const IntervalSet& iv) {
    json arr = json::array();
    for (const auto& i : iv) arr.push_back({i.lo, i.hi});
    return arr;
}

IntervalSet interval_set_from_json(const json& j) {
    if (!j.is_array() || j.size() != kSubintervalCount) {
        throw std::invalid_argument("intervals must be an array of four [lo, hi] pairs");
    }
    IntervalSet iv;
    for (std::size_t k = 0; k < kSubintervalCount; ++k) iv[k] = {j[k].at(0).get<double>(), j[k].at(1).get<double>()};
    return iv;
}

json window_to_json(const TimeWindow& w) { return {w.start, w.end}; }

TimeWindow window_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

template <typename T>
json optional_to_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

std::string interval_tag(const MagnitudeInterval& iv) {
    return text::format_double(iv.lo) + "_" + text::format_double(iv.hi);
}

AnalysisOutput analyze_groups(GroupSet groups, const SubintervalScheme& scheme, const AnalysisSettings& settings,
                              double m0, double m_max) {
    AnalysisOutput out;
    out.scheme = scheme;
    out.groups = std::move(groups);
    const auto grid = magnitude_grid(m0, m_max);
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        const auto& members = out.groups[k].members;
        const auto table = make_frequency_table(members, settings.magnitude_resolution);
        if (table.size() < 3) {
            throw std::invalid_argument("group " + std::to_string(k + 1) +
                                        " has fewer than three distinct binned magnitudes; cannot select a bandwidth");
        }
        out.bandwidths[k] = loocv_bandwidth(table, settings.bandwidth_candidates);
        out.densities[k] = estimate_density(table, grid, out.bandwidths[k].gamma);
    }
    out.trend = trend(out.groups);
    return out;
}

void render_analysis(const std::string& prefix, const AnalysisOutput& a, std::map<std::string, std::string>& files) {
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        const auto name = prefix + "_kde_" + std::to_string(k + 1) + "_" + interval_tag(a.scheme.intervals[k]) + ".csv";
        files[name] = format_density_csv(a.densities[k]);
    }
    files[prefix + "_groups.csv"] = format_groups_csv(a.groups);
    files[prefix + "_trend.csv"] = format_trend_csv(a.trend);
    json j = to_json(a.trend);
    j["intervals"] = interval_set_to_json(a.scheme.intervals);
    j["pool_counts"] = a.scheme.counts;
    j["balanced"] = a.scheme.balanced;
    json bw = json::array();
    for (const auto& b : a.bandwidths) bw.push_back(b.gamma);
    j["bandwidths"] = bw;
    json tc = json::array();
    for (const auto& g : a.groups) tc.push_back(g.trigger_count);
    j["trigger_counts"] = tc;
    files[prefix + "_trend.json"] = dump_json(j);
}

json analysis_summary(const AnalysisOutput& a) {
    json bw = json::array();
    for (const auto& b : a.bandwidths) bw.push_back(b.gamma);
    return {{"intervals", interval_set_to_json(a.scheme.intervals)},
            {"balanced", a.scheme.balanced},
            {"normalized_means", a.trend.normalized_means},
            {"trigger_means", a.trend.x},
            {"slope", a.trend.slope},
            {"r", a.trend.r},
            {"p_value", a.trend.p_value},
            {"bandwidths", bw}};
}

}  // namespace

SimConfig SimulationSettings::to_config() const {
    SimConfig cfg;
    cfg.params = params;
    cfg.gr = GrLaw::from_b_value(b_value, m0);
    if (conditional) cfg.conditional = ConditionalLaw(cfg.gr.beta(), params.a, c1, m0);
    cfg.window = window;
    cfg.seed = seed;
    cfg.learning_period = learning_period;
    return cfg;
}

EtasParams default_fit_init(const Catalog& cat, double learning_fraction) {
    const double split = cat.window.start + learning_fraction * cat.window.length();
    const auto n_target = std::count_if(cat.events.begin(), cat.events.end(),
                                        [&](const Event& e) { return e.time >= split; });
    const double span = cat.window.end - split;
    const double mu = span > 0.0 && n_target > 0 ? 0.5 * static_cast<double>(n_target) / span : 0.1;
    return {mu, 0.02, 0.01, 1.0, 1.1};
}

SweepResult fit_sweep(const Catalog& cat, const std::vector<double>& fractions, const std::optional<EtasParams>& init) {
    if (fractions.empty()) throw std::invalid_argument("fit_sweep: no learning fractions");
    SweepResult res;
    res.fractions = fractions;
    std::array<double, 5> sum{};
    for (double f : fractions) {
        auto report = fit_params(cat, init.value_or(default_fit_init(cat, f)), f);
        const auto v = report.params.to_array();
        for (std::size_t k = 0; k < 5; ++k) sum[k] += v[k];
        res.reports.push_back(std::move(report));
    }
    for (auto& s : sum) s /= static_cast<double>(fractions.size());
    res.mean_params = EtasParams::from_array(sum);
    return res;
}

PipelineResult run_pipeline(const PipelineConfig& config_in) {
    PipelineConfig config = config_in;
    PipelineResult res;
    const auto& src = config.source;
    if (src.input_path.has_value() == src.simulation.has_value()) {
        throw std::invalid_argument("pipeline: exactly one of an input catalog or a simulation is required");
    }

    Catalog raw;
    if (src.simulation) {
        raw = simulate(src.simulation->to_config());
        res.files["catalog.csv"] = format_catalog(raw);
    } else {
        raw = load_catalog(*src.input_path, parse_time_format(src.time_format));
    }
    if (!config.source.m0) config.source.m0 = raw.m0;
    res.catalog = filter_catalog(raw, *config.source.m0, src.max_depth, raw.window);
    const auto& cat = res.catalog;
    if (cat.size() < 2) throw std::invalid_argument("pipeline: fewer than two events after filtering");
    const double m0 = cat.m0;
    const double m_max = cat.max_magnitude();
    if (!(m_max > m0)) throw std::invalid_argument("pipeline: all magnitudes equal m0");

    const auto& an = config.analysis;
    const bool need_params = an.run_mother || an.rescale;
    if (config.params) {
        res.params = *config.params;
    } else if (need_params) {
        if (!config.fit_init) config.fit_init = default_fit_init(cat, config.learning_fraction);
        res.fit = fit_params(cat, *config.fit_init, config.learning_fraction);
        res.params = res.fit->params;
        res.files["fit.json"] = dump_json(to_json(*res.fit));
    }

    if (an.rescale) {
        res.rescaled = time_rescale(cat, res.params);
        res.files["rescaled_catalog.csv"] = format_catalog(*res.rescaled);
    }

    if (an.run_window) {
        const Catalog& wcat = res.rescaled ? *res.rescaled : cat;
        if (an.delta_star) {
            res.delta_star = *an.delta_star;
        } else {
            const auto counts = daily_counts(wcat);
            if (!config.analysis.acf_max_lag) config.analysis.acf_max_lag = default_max_fit_lag(counts.n());
            const auto max_lag = *config.analysis.acf_max_lag;
            res.acf = autocorrelation(counts, max_lag);
            res.power_law = fit_power_law(*res.acf, 1, max_lag);
            res.delta_star = static_cast<double>(select_delta_star(*res.power_law, an.delta_threshold));
            res.power_law->delta_star = static_cast<std::size_t>(res.delta_star);
            res.files["acf.csv"] = format_acf_csv(*res.acf);
            json pl = to_json(*res.power_law);
            pl["threshold"] = an.delta_threshold;
            pl["lag_p_values"] = acf_significance(*res.acf, res.power_law->delta_star);
            pl["max_lag_p_value_within_delta_star"] =
                *std::max_element(pl["lag_p_values"].begin(), pl["lag_p_values"].end());
            res.files["power_law.json"] = dump_json(pl);
        }
        const auto pool = windowed_trigger_pool(wcat, res.delta_star);
        const auto scheme = make_subintervals(pool, m0, m_max, an.window_intervals);
        res.window = analyze_groups(windowed_groups(wcat, res.delta_star, scheme), scheme, an, m0, m_max);
        render_analysis("window", *res.window, res.files);
    }

    std::optional<double> attribution_accuracy;
    if (an.run_mother) {
        const auto attribution = attribute_mothers(cat, res.params);
        const auto pool = mother_trigger_pool(cat, attribution);
        const auto scheme = make_subintervals(pool, m0, m_max, an.mother_intervals);
        res.mother = analyze_groups(mother_groups(cat, attribution, scheme), scheme, an, m0, m_max);
        render_analysis("mother", *res.mother, res.files);
        const bool has_truth = std::all_of(cat.events.begin(), cat.events.end(),
                                           [](const Event& e) { return !e.parent.is_unknown(); });
        if (has_truth) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < cat.size(); ++i) hits += attribution[i].mother == cat.events[i].parent;
            attribution_accuracy = static_cast<double>(hits) / static_cast<double>(cat.size());
        }
    }

    json results;
    results["events"] = cat.size();
    results["m_max"] = m_max;
    results["params"] = to_json(res.params);
    if (res.fit) {
        results["fit_converged"] = res.fit->converged;
        results["fit_log_likelihood"] = res.fit->log_likelihood;
    }
    if (an.run_window) {
        results["delta_star"] = res.delta_star;
        results["window"] = analysis_summary(*res.window);
    }
    if (res.mother) results["mother"] = analysis_summary(*res.mother);
    if (attribution_accuracy) results["attribution_accuracy"] = *attribution_accuracy;

    json manifest;
    manifest["tool"] = "etas_cli";
    manifest["manifest_version"] = kManifestVersion;
    manifest["config"] = to_json(config);
    manifest["results"] = results;
    json names = json::array();
    for (const auto& [name, _] : res.files) names.push_back(name);
    names.push_back("manifest.json");
    manifest["files"] = names;
    res.files["manifest.json"] = dump_json(manifest);
    return res;
}

void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
    for (const auto& [name, content] : files) text::write_file_atomic(dir / name, content);
}

std::vector<double> parse_sweep(const std::string& spec) {
    const auto parts = text::split(spec, ':');
    if (parts.size() != 3) throw std::invalid_argument("sweep must look like lo:step:hi");
    const double lo = text::parse_double(parts[0]);
    const double step = text::parse_double(parts[1]);
    const double hi = text::parse_double(parts[2]);
    if (!(step > 0.0) || !(lo <= hi) || lo < 0.0 || hi >= 1.0) {
        throw std::invalid_argument("sweep needs 0 <= lo <= hi < 1 and step > 0");
    }
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

IntervalSet parse_intervals(const std::string& spec) {
    const auto parts = text::split(spec, ',');
    if (parts.size() != kSubintervalCount) throw std::invalid_argument("expected four intervals lo:hi,...");
    IntervalSet iv;
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        const auto bounds = text::split(parts[k], ':');
        if (bounds.size() != 2) throw std::invalid_argument("interval must look like lo:hi");
        iv[k] = {text::parse_double(bounds[0]), text::parse_double(bounds[1])};
    }
    return iv;
}

EtasParams parse_params(const std::string& spec) {
    const auto parts = text::split(spec, ',');
    if (parts.size() != 5) throw std::invalid_argument("parameters must be mu,kappa,c,a,p");
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < 5; ++k) v[k] = text::parse_double(parts[k]);
    const auto p = EtasParams::from_array(v);
    p.validate();
    return p;
}

json to_json(const EtasParams& p) {
    const auto a = p.to_array();
    return json(std::vector<double>(a.begin(), a.end()));
}

EtasParams params_from_json(const json& j) {
    if (!j.is_array() || j.size() != 5) throw std::invalid_argument("parameters must be a 5-element array");
    std::array<double, 5> v{};
    for (std::size_t k = 0; k < 5; ++k) v[k] = j[k].get<double>();
    return EtasParams::from_array(v);
}

json to_json(const FitReport& r) {
    return {{"params", to_json(r.params)},
            {"param_order", {"mu", "kappa", "c", "a", "p"}},
            {"log_likelihood", r.log_likelihood},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"converged", r.converged},
            {"learning_window", window_to_json(r.learning_window)},
            {"target_window", window_to_json(r.target_window)}};
}

json to_json(const TrendResult& t) {
    return {{"trigger_means", t.x},
            {"raw_means", t.raw_means},
            {"normalized_means", t.normalized_means},
            {"standard_errors", t.standard_errors},
            {"normalized_standard_errors", t.normalized_standard_errors},
            {"counts", t.counts},
            {"slope", t.slope},
            {"intercept", t.intercept},
            {"r", t.r},
            {"p_value", t.p_value}};
}

json to_json(const PowerLawFit& f) {
    return {{"amplitude", f.amplitude},
            {"exponent", f.exponent},
            {"delta_star", f.delta_star},
            {"sse", f.sse},
            {"lags_used", f.lags_used},
            {"slope_p_value", f.slope_p_value}};
}

json to_json(const PipelineConfig& c) {
    json src;
    src["input"] = optional_to_json(c.source.input_path);
    src["time_format"] = c.source.time_format;
    src["m0"] = optional_to_json(c.source.m0);
    src["max_depth"] = c.source.max_depth;
    if (c.source.simulation) {
        const auto& s = *c.source.simulation;
        src["simulation"] = {{"params", to_json(s.params)},
                             {"b_value", s.b_value},
                             {"m0", s.m0},
                             {"mode", s.conditional ? "conditional" : "gr"},
                             {"c1", s.c1},
                             {"window", window_to_json(s.window)},
                             {"seed", s.seed},
                             {"learning_period", s.learning_period}};
    } else {
        src["simulation"] = nullptr;
    }
    const auto& a = c.analysis;
    json an;
    an["run_window"] = a.run_window;
    an["run_mother"] = a.run_mother;
    an["rescale"] = a.rescale;
    an["delta_star"] = optional_to_json(a.delta_star);
    an["acf_max_lag"] = optional_to_json(a.acf_max_lag);
    an["delta_threshold"] = a.delta_threshold;
    an["window_intervals"] = a.window_intervals ? interval_set_to_json(*a.window_intervals) : json(nullptr);
    an["mother_intervals"] = a.mother_intervals ? interval_set_to_json(*a.mother_intervals) : json(nullptr);
    an["magnitude_resolution"] = a.magnitude_resolution;
    an["bandwidth_candidates"] = a.bandwidth_candidates;
    return {{"source", src},
            {"params", c.params ? to_json(*c.params) : json(nullptr)},
            {"fit_init", c.fit_init ? to_json(*c.fit_init) : json(nullptr)},
            {"learning_fraction", c.learning_fraction},
            {"analysis", an}};
}

PipelineConfig pipeline_config_from_json(const json& j_in) {
    const json& j = j_in.contains("config") ? j_in.at("config") : j_in;
    try {
        PipelineConfig c;
        const auto& src = j.at("source");
        if (!src.at("input").is_null()) c.source.input_path = src.at("input").get<std::string>();
        c.source.time_format = src.at("time_format").get<std::string>();
        if (!src.at("m0").is_null()) c.source.m0 = src.at("m0").get<double>();
        c.source.max_depth = src.at("max_depth").get<double>();
        if (!src.at("simulation").is_null()) {
            const auto& s = src.at("simulation");
            SimulationSettings sim;
            sim.params = params_from_json(s.at("params"));
            sim.b_value = s.at("b_value").get<double>();
            sim.m0 = s.at("m0").get<double>();
            const auto mode = s.at("mode").get<std::string>();
            if (mode != "gr" && mode != "conditional") throw std::invalid_argument("unknown magnitude mode " + mode);
            sim.conditional = mode == "conditional";
            sim.c1 = s.at("c1").get<double>();
            sim.window = window_from_json(s.at("window"));
            sim.seed = s.at("seed").get<std::uint64_t>();
            sim.learning_period = s.at("learning_period").get<double>();
            c.source.simulation = sim;
        }
        if (!j.at("params").is_null()) c.params = params_from_json(j.at("params"));
        if (!j.at("fit_init").is_null()) c.fit_init = params_from_json(j.at("fit_init"));
        c.learning_fraction = j.at("learning_fraction").get<double>();
        const auto& an = j.at("analysis");
        c.analysis.run_window = an.at("run_window").get<bool>();
        c.analysis.run_mother = an.at("run_mother").get<bool>();
        c.analysis.rescale = an.at("rescale").get<bool>();
        if (!an.at("delta_star").is_null()) c.analysis.delta_star = an.at("delta_star").get<double>();
        if (!an.at("acf_max_lag").is_null()) c.analysis.acf_max_lag = an.at("acf_max_lag").get<std::size_t>();
        c.analysis.delta_threshold = an.at("delta_threshold").get<double>();
        if (!an.at("window_intervals").is_null()) c.analysis.window_intervals = interval_set_from_json(an.at("window_intervals"));
        if (!an.at("mother_intervals").is_null()) c.analysis.mother_intervals = interval_set_from_json(an.at("mother_intervals"));
        c.analysis.magnitude_resolution = an.at("magnitude_resolution").get<double>();
        c.analysis.bandwidth_candidates = an.at("bandwidth_candidates").get<std::vector<double>>();
        return c;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed pipeline configuration: ") + e.what());
    }
}

std::string format_density_csv(const DensityEstimate& d) {
    std::string out = "# bandwidth: " + text::format_double(d.bandwidth) + "\nmagnitude,value\n";
    for (std::size_t k = 0; k < d.grid.size(); ++k) {
        out += text::format_double(d.grid[k]) + "," + text::format_double(d.values[k]) + "\n";
    }
    return out;
}

std::string format_trend_csv(const TrendResult& t) {
    std::string out;
    out += "# slope: " + text::format_double(t.slope) + "\n";
    out += "# intercept: " + text::format_double(t.intercept) + "\n";
    out += "# r: " + text::format_double(t.r) + "\n";
    out += "# p_value: " + text::format_double(t.p_value) + "\n";
    out += "trigger_mean,normalized_mean,stderr\n";
    for (std::size_t k = 0; k < t.x.size(); ++k) {
        const double se = k < t.normalized_standard_errors.size() ? t.normalized_standard_errors[k] : 0.0;
        out += text::format_double(t.x[k]) + "," + text::format_double(t.normalized_means[k]) + "," +
               text::format_double(se) + "\n";
    }
    return out;
}

std::string format_acf_csv(const AcfEstimate& acf) {
    std::string out = "# n: " + std::to_string(acf.n) + "\nlag,value\n";
    for (std::size_t k = 0; k < acf.lags.size(); ++k) {
        out += std::to_string(acf.lags[k]) + "," + text::format_double(acf.values[k]) + "\n";
    }
    return out;
}

std::string format_groups_csv(const GroupSet& groups) {
    std::string out = "group,lo,hi,trigger_mean,trigger_count,magnitude\n";
    for (std::size_t k = 0; k < kSubintervalCount; ++k) {
        const auto& g = groups[k];
        const auto prefix = std::to_string(k + 1) + "," + text::format_double(g.interval.lo) + "," +
                            text::format_double(g.interval.hi) + "," + text::format_double(g.trigger_mean) + "," +
                            std::to_string(g.trigger_count) + ",";
        for (double m : g.members) out += prefix + text::format_double(m) + "\n";
    }
    return out;
}

GroupSet parse_groups_csv(const std::string& content) {
    GroupSet groups;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!header) {
            if (t != "group,lo,hi,trigger_mean,trigger_count,magnitude") {
                throw IoError("groups file: unexpected header");
            }
            header = true;
            continue;
        }
        const auto f = text::split(t, ',');
        if (f.size() != 6) throw IoError("groups file line " + std::to_string(line_no) + ": expected 6 fields");
        try {
            const double gk = text::parse_double(f[0]);
            if (gk < 1 || gk > kSubintervalCount || gk != std::floor(gk)) throw std::invalid_argument("group");
            auto& g = groups[static_cast<std::size_t>(gk) - 1];
            g.interval = {text::parse_double(f[1]), text::parse_double(f[2])};
            g.trigger_mean = text::parse_double(f[3]);
            g.trigger_count = static_cast<std::size_t>(text::parse_double(f[4]));
            g.members.push_back(text::parse_double(f[5]));
        } catch (const std::invalid_argument& e) {
            throw IoError("groups file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header) throw IoError("groups file: missing header");
    return groups;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace etas
