#pragma once

#include "etas/catalog.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace etas {

/// Temporal ETAS parameters, ordered (mu, kappa, c, a, p) everywhere they are serialized.
///
/// lambda(t) = mu + sum_{t_i < t} kappa e^{a (m_i - m0)} (t - t_i + c)^{-p}
struct EtasParams {
    double mu{0.0};     ///< background rate, events/day
    double kappa{0.0};  ///< productivity scale
    double c{0.0};      ///< Omori offset, days
    double a{0.0};      ///< productivity exponent, per magnitude unit
    double p{0.0};      ///< Omori exponent

    [[nodiscard]] std::array<double, 5> to_array() const noexcept { return {mu, kappa, c, a, p}; }
    [[nodiscard]] static EtasParams from_array(const std::array<double, 5>& v) noexcept {
        return {v[0], v[1], v[2], v[3], v[4]};
    }
    /// Throws std::invalid_argument unless every field is finite and strictly positive.
    void validate() const;
    friend bool operator==(const EtasParams&, const EtasParams&) = default;
};

[[nodiscard]] double intensity(double t, const Catalog& cat, const EtasParams& params);

struct LikelihoodValue {
    double value{0.0};
    /// d ll / d (mu, kappa, c, a, p); zero unless requested.
    std::array<double, 5> gradient{};
    std::size_t n_target_events{0};
};

/// Point-process log-likelihood over `target`:
///   sum_{t_i in target} log lambda(t_i) - integral_target lambda.
/// Events before target.start act as history only.
[[nodiscard]] LikelihoodValue evaluate_log_likelihood(const Catalog& cat, const EtasParams& params,
                                                      TimeWindow target, bool with_gradient);

[[nodiscard]] double log_likelihood(const Catalog& cat, const EtasParams& params, TimeWindow target);

/// Integral of lambda over `target` (closed form).
[[nodiscard]] double integrated_intensity(const Catalog& cat, const EtasParams& params,
                                          TimeWindow target);

struct FitOptions {
    std::size_t max_iterations{2000};
    double relative_tolerance{1e-8};
    /// Convergence threshold on the log-parameter gradient, scaled by max(1, |ll|).
    double gradient_tolerance{1e-7};
};

struct FitReport {
    EtasParams params{};
    double log_likelihood{0.0};
    std::size_t iterations{0};
    std::size_t evaluations{0};
    bool converged{false};
    TimeWindow learning_window{};
    TimeWindow target_window{};
};

/// Maximum-likelihood fit in log-parameter space (quasi-Newton with backtracking).
/// The first `learning_fraction` of the catalog window is history only.
[[nodiscard]] FitReport fit_params(const Catalog& cat, const EtasParams& init,
                                   double learning_fraction, const FitOptions& options = {});

/// Random time change tau_i = integral_{window.start}^{t_i} lambda. The returned
/// catalog keeps magnitudes, order and parents; its window is [0, Lambda(window.end)].
[[nodiscard]] Catalog time_rescale(const Catalog& cat, const EtasParams& params);

struct MotherAssignment {
    ParentRef mother{ParentRef::background()};
    double contribution{0.0};  ///< winning term of the rate (mu for background)
};

using Attribution = std::vector<MotherAssignment>;

/// Most-likely mother per event: the earlier event with the largest rate
/// contribution at the child's time, or background when mu is at least as large.
/// Ties between earlier events go to the most recent one.
[[nodiscard]] Attribution attribute_mothers(const Catalog& cat, const EtasParams& params);

}  // namespace etas
