// Command-line front end: simulate, fit, rescale, analyze-window, analyze-mother, trend, pipeline.
//
// Exit codes: 0 ok, 1 usage, 2 IO, 3 numeric/convergence, 4 validation. Failures print a
// single line `error[CATEGORY]: detail` on stderr.

#include "etas/catalog.hpp"
#include "etas/error.hpp"
#include "etas/etas_model.hpp"
#include "etas/pipeline.hpp"
#include "etas/simulator.hpp"
#include "etas/stats.hpp"
#include "etas/text_io.hpp"
#include "etas/trend_analysis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <limits>
#include <optional>
#include <string>

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kNumeric = 3, kValidation = 4 };

using nlohmann::json;

struct CatalogOptions {
    std::string input;
    std::string time_format{"auto"};
    std::optional<double> m0;
    double max_depth{40.0};

    void attach(CLI::App* app, bool required = true) {
        auto* opt = app->add_option("-i,--input", input, "Catalog CSV (time,magnitude[,latitude,longitude,depth][,parent])");
        if (required) opt->required();
        app->add_option("--time-format", time_format, "Time column format: auto, days or iso")
            ->check(CLI::IsMember({"auto", "days", "iso"}));
        app->add_option("--m0", m0, "Completeness magnitude (default: catalog metadata or minimum)");
        app->add_option("--max-depth", max_depth, "Maximum depth in km")->capture_default_str();
    }

    [[nodiscard]] etas::Catalog load() const {
        auto raw = etas::load_catalog(input, etas::parse_time_format(time_format));
        return etas::filter_catalog(raw, m0.value_or(raw.m0), max_depth, raw.window);
    }

    void fill(etas::CatalogSource& src) const {
        src.input_path = std::filesystem::absolute(input).lexically_normal().string();
        src.time_format = time_format;
        src.m0 = m0;
        src.max_depth = max_depth;
    }
};

struct SimulationOptions {
    std::string params{"0.62,0.02,0.013,1.72,1.11"};
    double b_value{1.0};
    double m0{1.5};
    std::string mode{"gr"};
    double c1{0.8};
    double t_start{0.0};
    double t_end{1000.0};
    std::uint64_t seed{42};
    double learning_period{0.0};

    void attach(CLI::App* app, const std::string& params_flag) {
        app->add_option(params_flag, params, "Simulation parameters mu,kappa,c,a,p")->capture_default_str();
        app->add_option("--b-value", b_value, "Gutenberg-Richter b-value")->capture_default_str();
        app->add_option("--sim-m0", m0, "Minimum simulated magnitude")->capture_default_str();
        app->add_option("--mode", mode, "Triggered magnitude law: gr or conditional")
            ->check(CLI::IsMember({"gr", "conditional"}))
            ->capture_default_str();
        app->add_option("--c1", c1, "Coupling strength of the conditional law, in [0, 1)")->capture_default_str();
        app->add_option("--t-start", t_start, "Window start (days)")->capture_default_str();
        app->add_option("--t-end", t_end, "Window end (days)")->capture_default_str();
        app->add_option("--seed", seed, "Random seed")->capture_default_str();
        app->add_option("--learning-period", learning_period, "Burn-in days before the window")->capture_default_str();
    }

    [[nodiscard]] etas::SimulationSettings settings() const {
        etas::SimulationSettings s;
        s.params = etas::parse_params(params);
        s.b_value = b_value;
        s.m0 = m0;
        s.conditional = mode == "conditional";
        s.c1 = c1;
        s.window = {t_start, t_end};
        s.seed = seed;
        s.learning_period = learning_period;
        return s;
    }
};

struct AnalysisOptions {
    std::optional<std::string> params;
    std::optional<std::string> init;
    double learning_fraction{0.10};
    bool rescale{false};
    std::optional<double> delta_star;
    std::optional<std::size_t> acf_max_lag;
    double threshold{0.05};
    std::optional<std::string> window_intervals;
    std::optional<std::string> mother_intervals;
    double resolution{0.1};
    std::string out_dir{"out"};

    void attach(CLI::App* app, bool window, bool mother) {
        app->add_option("--params", params, "ETAS parameters mu,kappa,c,a,p (skips the fit)");
        app->add_option("--init", init, "Fit starting point mu,kappa,c,a,p");
        app->add_option("--learning-fraction", learning_fraction, "Fraction of the window used as fit history")
            ->capture_default_str();
        if (window) {
            app->add_flag("--rescale", rescale, "Run the windowed analysis on time-rescaled data");
            app->add_option("--delta-star", delta_star, "Causal window override (days)");
            app->add_option("--acf-max-lag", acf_max_lag, "Largest autocorrelation lag (default min(50, n/4))");
            app->add_option("--threshold", threshold, "Power-law threshold for delta*")->capture_default_str();
            app->add_option(mother ? "--window-intervals" : "--intervals", window_intervals,
                            "Four trigger intervals lo:hi,lo:hi,lo:hi,lo:hi");
        }
        if (mother) {
            app->add_option(window ? "--mother-intervals" : "--intervals", mother_intervals,
                            "Four mother intervals lo:hi,lo:hi,lo:hi,lo:hi");
        }
        app->add_option("--resolution", resolution, "Magnitude binning for the frequency tables")
            ->capture_default_str();
        app->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    }

    void fill(etas::PipelineConfig& cfg, bool window, bool mother) const {
        if (params) cfg.params = etas::parse_params(*params);
        if (init) cfg.fit_init = etas::parse_params(*init);
        cfg.learning_fraction = learning_fraction;
        cfg.analysis.run_window = window;
        cfg.analysis.run_mother = mother;
        cfg.analysis.rescale = rescale;
        cfg.analysis.delta_star = delta_star;
        cfg.analysis.acf_max_lag = acf_max_lag;
        cfg.analysis.delta_threshold = threshold;
        if (window_intervals) cfg.analysis.window_intervals = etas::parse_intervals(*window_intervals);
        if (mother_intervals) cfg.analysis.mother_intervals = etas::parse_intervals(*mother_intervals);
        cfg.analysis.magnitude_resolution = resolution;
    }
};

void emit(const std::optional<std::string>& path, const std::string& content) {
    if (path) {
        etas::text::write_file_atomic(*path, content);
    } else {
        std::cout << content;
    }
}

int fail(int code, const char* category, const std::string& detail) {
    std::string one_line = detail;
    for (auto& ch : one_line) {
        if (ch == '\n' || ch == '\r') ch = ' ';
    }
    std::cerr << "error[" << category << "]: " << one_line << '\n';
    return code;
}

void print_summary(const etas::PipelineResult& res) {
    std::cout << "events: " << res.catalog.size() << '\n';
    if (res.fit) std::cout << "fit converged: " << (res.fit->converged ? "yes" : "no") << '\n';
    if (res.window) {
        std::cout << "delta*: " << res.delta_star << '\n';
        std::cout << "window trend: R=" << res.window->trend.r << " p=" << res.window->trend.p_value << '\n';
    }
    if (res.mother) std::cout << "mother trend: R=" << res.mother->trend.r << " p=" << res.mother->trend.p_value << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal ETAS toolkit: simulation, fitting and triggered-magnitude analyses"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a temporal ETAS catalog with parent labels");
    sim_cmd->set_config("--config");
    SimulationOptions sim_opts;
    sim_opts.attach(sim_cmd, "--params");
    std::optional<std::string> sim_output;
    sim_cmd->add_option("-o,--output", sim_output, "Output catalog CSV (stdout if omitted)");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood ETAS fit");
    fit_cmd->set_config("--config");
    CatalogOptions fit_cat;
    fit_cat.attach(fit_cmd);
    double fit_fraction = 0.10;
    std::optional<std::string> fit_init, fit_sweep_spec, fit_output;
    std::string fit_aggregate = "mean";
    fit_cmd->add_option("--learning-fraction", fit_fraction, "Fraction of the window used as history")
        ->capture_default_str();
    fit_cmd->add_option("--init", fit_init, "Starting point mu,kappa,c,a,p");
    fit_cmd->add_option("--sweep", fit_sweep_spec, "Learning fractions lo:step:hi, e.g. 0.07:0.01:0.20");
    fit_cmd->add_option("--aggregate", fit_aggregate, "Aggregation over a sweep")->check(CLI::IsMember({"mean"}));
    fit_cmd->add_option("-o,--output", fit_output, "Output JSON (stdout if omitted)");

    // rescale
    auto* rescale_cmd = app.add_subcommand("rescale", "Random time change of a catalog through the ETAS compensator");
    rescale_cmd->set_config("--config");
    CatalogOptions rescale_cat;
    rescale_cat.attach(rescale_cmd);
    std::string rescale_params;
    std::optional<std::string> rescale_output, rescale_report;
    rescale_cmd->add_option("--params", rescale_params, "ETAS parameters mu,kappa,c,a,p")->required();
    rescale_cmd->add_option("-o,--output", rescale_output, "Rescaled catalog CSV (stdout if omitted)");
    rescale_cmd->add_option("--report", rescale_report, "JSON with a KS test of the rescaled gaps against Exp(1)");

    // analyze-window / analyze-mother
    auto* aw_cmd = app.add_subcommand("analyze-window", "Time-window pairing analysis");
    aw_cmd->set_config("--config");
    CatalogOptions aw_cat;
    aw_cat.attach(aw_cmd);
    AnalysisOptions aw_opts;
    aw_opts.attach(aw_cmd, true, false);

    auto* am_cmd = app.add_subcommand("analyze-mother", "Most-likely-mother analysis");
    am_cmd->set_config("--config");
    CatalogOptions am_cat;
    am_cat.attach(am_cmd);
    AnalysisOptions am_opts;
    am_opts.attach(am_cmd, false, true);

    // trend
    auto* trend_cmd = app.add_subcommand("trend", "Normalized-mean trend regression");
    trend_cmd->set_config("--config");
    std::optional<std::string> trend_groups, trend_x, trend_means, trend_se, trend_output;
    trend_cmd->add_option("--groups", trend_groups, "Groups CSV written by the analyses");
    trend_cmd->add_option("--trigger-means", trend_x, "Comma-separated trigger means");
    trend_cmd->add_option("--means", trend_means, "Comma-separated triggered-magnitude means");
    trend_cmd->add_option("--stderr", trend_se, "Comma-separated standard errors");
    trend_cmd->add_option("-o,--output", trend_output, "Output JSON (stdout if omitted)");

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "End-to-end run with plot-ready outputs and a manifest");
    pipe_cmd->set_config("--config");
    CatalogOptions pipe_cat;
    pipe_cat.attach(pipe_cmd, false);
    bool pipe_simulate = false;
    pipe_cmd->add_flag("--simulate", pipe_simulate, "Simulate the catalog instead of reading --input");
    SimulationOptions pipe_sim;
    pipe_sim.attach(pipe_cmd, "--sim-params");
    AnalysisOptions pipe_opts;
    pipe_opts.attach(pipe_cmd, true, true);
    std::optional<std::string> replay;
    pipe_cmd->add_option("--replay", replay, "Re-run the configuration stored in a manifest.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, "USAGE", e.what());
    }

    try {
        if (*sim_cmd) {
            const auto cat = etas::simulate(sim_opts.settings().to_config());
            emit(sim_output, etas::format_catalog(cat));
            return kOk;
        }
        if (*fit_cmd) {
            const auto cat = fit_cat.load();
            std::optional<etas::EtasParams> init;
            if (fit_init) init = etas::parse_params(*fit_init);
            json out;
            bool converged = true;
            if (fit_sweep_spec) {
                const auto sweep = etas::fit_sweep(cat, etas::parse_sweep(*fit_sweep_spec), init);
                json reports = json::array();
                for (const auto& r : sweep.reports) {
                    reports.push_back(etas::to_json(r));
                    converged = converged && r.converged;
                }
                out = {{"fractions", sweep.fractions},
                       {"reports", reports},
                       {"aggregate", fit_aggregate},
                       {"params", etas::to_json(sweep.mean_params)},
                       {"param_order", {"mu", "kappa", "c", "a", "p"}}};
            } else {
                const auto report =
                    etas::fit_params(cat, init.value_or(etas::default_fit_init(cat, fit_fraction)), fit_fraction);
                out = etas::to_json(report);
                converged = report.converged;
            }
            emit(fit_output, etas::dump_json(out));
            if (!converged) return fail(kNumeric, "NUMERIC", "fit did not converge within the iteration budget");
            return kOk;
        }
        if (*rescale_cmd) {
            const auto cat = rescale_cat.load();
            const auto rescaled = etas::time_rescale(cat, etas::parse_params(rescale_params));
            if (rescale_report) {
                const auto times = rescaled.times();
                const auto ks = etas::stats::ks_test_unit_exponential(etas::stats::gaps(times));
                json rep = {{"events", rescaled.size()},
                            {"transformed_length", rescaled.window.end},
                            {"ks_statistic", ks.statistic},
                            {"ks_p_value", ks.p_value}};
                etas::text::write_file_atomic(*rescale_report, etas::dump_json(rep));
            }
            emit(rescale_output, etas::format_catalog(rescaled));
            return kOk;
        }
        if (*trend_cmd) {
            etas::TrendResult result;
            if (trend_groups) {
                result = etas::trend(etas::parse_groups_csv(etas::text::read_file(*trend_groups)));
            } else if (trend_x && trend_means) {
                auto parse_list = [](const std::string& s) {
                    std::vector<double> v;
                    for (const auto& part : etas::text::split(s, ',')) v.push_back(etas::text::parse_double(part));
                    return v;
                };
                const auto x = parse_list(*trend_x);
                const auto m = parse_list(*trend_means);
                const auto se = trend_se ? parse_list(*trend_se) : std::vector<double>{};
                result = etas::trend_from_summary(x, m, se);
            } else {
                return fail(kUsage, "USAGE", "trend needs --groups or both --trigger-means and --means");
            }
            emit(trend_output, etas::dump_json(etas::to_json(result)));
            return kOk;
        }

        etas::PipelineConfig cfg;
        std::string out_dir;
        if (*aw_cmd || *am_cmd) {
            const bool window = static_cast<bool>(*aw_cmd);
            const auto& cat_opts = window ? aw_cat : am_cat;
            const auto& opts = window ? aw_opts : am_opts;
            cat_opts.fill(cfg.source);
            opts.fill(cfg, window, !window);
            out_dir = opts.out_dir;
        } else if (*pipe_cmd) {
            out_dir = pipe_opts.out_dir;
            if (replay) {
                cfg = etas::pipeline_config_from_json(json::parse(etas::text::read_file(*replay)));
            } else {
                if (pipe_simulate == !pipe_cat.input.empty()) {
                    return fail(kUsage, "USAGE", "pipeline needs exactly one of --input or --simulate");
                }
                if (pipe_simulate) {
                    cfg.source.simulation = pipe_sim.settings();
                    cfg.source.m0 = pipe_cat.m0;
                    cfg.source.max_depth = pipe_cat.max_depth;
                } else {
                    pipe_cat.fill(cfg.source);
                }
                pipe_opts.fill(cfg, true, true);
            }
        }
        const auto result = etas::run_pipeline(cfg);
        etas::write_outputs(out_dir, result.files);
        print_summary(result);
        return kOk;
    } catch (const etas::IoError& e) {
        return fail(kIo, "IO", e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(kIo, "IO", e.what());
    } catch (const etas::NumericError& e) {
        return fail(kNumeric, "NUMERIC", e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kValidation, "VALIDATION", e.what());
    } catch (const std::exception& e) {
        return fail(kNumeric, "NUMERIC", e.what());
    }
}
