#pragma once

#include "etas/catalog.hpp"
#include "etas/correlation_window.hpp"
#include "etas/etas_model.hpp"
#include "etas/kde.hpp"
#include "etas/simulator.hpp"
#include "etas/trend_analysis.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace etas {

/// Settings for a synthetic catalog.
struct SimulationSettings {
    EtasParams params{0.62, 0.02, 0.013, 1.72, 1.11};
    double b_value{1.0};
    double m0{1.5};
    bool conditional{false};
    double c1{0.8};
    TimeWindow window{0.0, 1000.0};
    std::uint64_t seed{42};
    double learning_period{0.0};

    [[nodiscard]] SimConfig to_config() const;
};

/// Where the pipeline's catalog comes from and how it is filtered.
struct CatalogSource {
    std::optional<std::string> input_path;
    std::string time_format{"auto"};
    std::optional<SimulationSettings> simulation;
    std::optional<double> m0;        ///< defaults to the catalog's own m0
    double max_depth{40.0};
};

struct AnalysisSettings {
    bool run_window{true};
    bool run_mother{true};
    bool rescale{false};
    std::optional<double> delta_star;  ///< override; otherwise from the autocorrelation
    std::optional<std::size_t> acf_max_lag;  ///< default: min(50, n / 4)
    double delta_threshold{0.05};
    std::optional<IntervalSet> window_intervals;
    std::optional<IntervalSet> mother_intervals;
    double magnitude_resolution{0.1};
    std::vector<double> bandwidth_candidates = default_bandwidth_candidates();
};

struct PipelineConfig {
    CatalogSource source;
    std::optional<EtasParams> params;      ///< given parameters skip the fit
    std::optional<EtasParams> fit_init;    ///< default derived from the catalog
    double learning_fraction{0.10};
    AnalysisSettings analysis;
};

/// Per-analysis products.
struct AnalysisOutput {
    SubintervalScheme scheme;
    GroupSet groups;
    std::array<BandwidthSelection, kSubintervalCount> bandwidths;
    std::array<DensityEstimate, kSubintervalCount> densities;
    TrendResult trend;
};

struct PipelineResult {
    Catalog catalog;                     ///< after filtering
    std::optional<FitReport> fit;
    EtasParams params{};
    std::optional<Catalog> rescaled;
    std::optional<AcfEstimate> acf;
    std::optional<PowerLawFit> power_law;
    double delta_star{0.0};
    std::optional<AnalysisOutput> window;
    std::optional<AnalysisOutput> mother;
    /// Every output file, relative name -> content. Written only once complete.
    std::map<std::string, std::string> files;
};

/// Runs load/simulate -> filter -> fit -> optional rescale -> delta* -> analyses and
/// renders every artifact (including manifest.json) into `files`.
[[nodiscard]] PipelineResult run_pipeline(const PipelineConfig& config);

/// Atomically writes each file into `dir` (created if needed).
void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files);

/// Default starting point for the fit derived from the catalog.
[[nodiscard]] EtasParams default_fit_init(const Catalog& cat, double learning_fraction);

/// Fits at each learning fraction and averages the parameter vectors componentwise.
struct SweepResult {
    std::vector<double> fractions;
    std::vector<FitReport> reports;
    EtasParams mean_params{};
};
[[nodiscard]] SweepResult fit_sweep(const Catalog& cat, const std::vector<double>& fractions,
                                    const std::optional<EtasParams>& init);

/// Parses "lo:step:hi" into an inclusive list of fractions.
[[nodiscard]] std::vector<double> parse_sweep(const std::string& spec);
/// Parses "lo:hi,lo:hi,lo:hi,lo:hi".
[[nodiscard]] IntervalSet parse_intervals(const std::string& spec);
/// Parses "mu,kappa,c,a,p".
[[nodiscard]] EtasParams parse_params(const std::string& spec);

// Serialization.
[[nodiscard]] nlohmann::json to_json(const EtasParams& p);
[[nodiscard]] EtasParams params_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const FitReport& r);
[[nodiscard]] nlohmann::json to_json(const TrendResult& t);
[[nodiscard]] nlohmann::json to_json(const PowerLawFit& f);
[[nodiscard]] nlohmann::json to_json(const PipelineConfig& c);
[[nodiscard]] PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

[[nodiscard]] std::string format_density_csv(const DensityEstimate& d);
[[nodiscard]] std::string format_trend_csv(const TrendResult& t);
[[nodiscard]] std::string format_acf_csv(const AcfEstimate& acf);
[[nodiscard]] std::string format_groups_csv(const GroupSet& groups);
/// Reads format_groups_csv output back into groups.
[[nodiscard]] GroupSet parse_groups_csv(const std::string& text);
[[nodiscard]] std::string dump_json(const nlohmann::json& j);

}  // namespace etas
