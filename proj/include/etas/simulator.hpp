#pragma once

#include "etas/catalog.hpp"
#include "etas/etas_model.hpp"
#include "etas/magnitude_laws.hpp"

#include <cstdint>
#include <optional>

namespace etas {

struct SimConfig {
    EtasParams params{};
    GrLaw gr{std::numbers::ln10, 0.0};
    /// Set for conditional triggered magnitudes; empty means every magnitude is GR.
    std::optional<ConditionalLaw> conditional;
    TimeWindow window{0.0, 1000.0};
    std::uint64_t seed{0};
    /// Burn-in before window.start; events there seed the cascade but are not output.
    double learning_period{0.0};

    /// Throws std::invalid_argument on inconsistent or supercritical settings.
    void validate() const;
};

/// Upper bound on the mean number of direct offspring per triggered event, using the
/// Omori integral truncated at the simulated span. Values >= 1 are rejected.
[[nodiscard]] double branching_bound(const SimConfig& cfg);

/// Cluster simulation of the temporal ETAS process with ground-truth parents.
///
/// Background events form a homogeneous Poisson process of rate mu; each event then
/// spawns an inhomogeneous Poisson number of offspring with rate
/// kappa e^{a (m - m0)} (t - t_parent + c)^{-p} up to window.end. Offspring times come
/// from inverting the Omori integral, magnitudes from the GR or conditional law.
/// Output is time-sorted with parents remapped; identical configs give identical output.
[[nodiscard]] Catalog simulate(const SimConfig& cfg);

}  // namespace etas
