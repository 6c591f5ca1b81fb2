#include "etas/simulator.hpp"

#include "etas/error.hpp"
#include "etas/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace etas {

namespace {

constexpr std::size_t kMaxEvents = 20'000'000;

struct SimEvent {
    double time;
    double magnitude;
    std::int64_t parent;  // creation index or ParentRef::kBackground
};

}  // namespace

double branching_bound(const SimConfig& cfg) {
    const auto& prm = cfg.params;
    const double beta = cfg.gr.beta();
    if (!(beta > prm.a)) return std::numeric_limits<double>::infinity();
    const OmoriLaw omori_law(prm.c, prm.p);
    const double span = cfg.window.end - (cfg.window.start - cfg.learning_period);
    double moment = beta / (beta - prm.a);
    if (cfg.conditional) {
        // The conditional mean of e^{a x} is increasing in the coupling g < 1; take g -> 1.
        const double c1 = cfg.conditional->c1();
        moment = (1.0 + c1) * beta / (beta - prm.a) - 2.0 * c1 * beta / (2.0 * beta - prm.a);
    }
    return prm.kappa * omori_law.integral(span) * moment;
}

void SimConfig::validate() const {
    params.validate();
    if (!(window.start < window.end) || !std::isfinite(window.start) || !std::isfinite(window.end)) {
        throw std::invalid_argument("SimConfig: window must be a nonempty finite interval");
    }
    if (!(learning_period >= 0.0) || !std::isfinite(learning_period)) {
        throw std::invalid_argument("SimConfig: learning_period must be finite and >= 0");
    }
    if (conditional) {
        if (conditional->beta() != gr.beta() || conditional->a() != params.a ||
            conditional->m0() != gr.m0()) {
            throw std::invalid_argument("SimConfig: conditional law must share beta, a and m0");
        }
    }
    const double n = branching_bound(*this);
    if (!(n < 1.0)) {
        std::ostringstream os;
        os << "SimConfig: supercritical configuration, branching bound " << n
           << " >= 1 (needs beta > a and kappa * Omori integral * E[e^{a(m-m0)}] < 1)";
        throw std::invalid_argument(os.str());
    }
}

Catalog simulate(const SimConfig& cfg) {
    cfg.validate();
    const auto& prm = cfg.params;
    const double m0 = cfg.gr.m0();
    const double t_begin = cfg.window.start - cfg.learning_period;
    const double t_end = cfg.window.end;
    const OmoriLaw omori_law(prm.c, prm.p);
    const ProductivityLaw prod_law(prm.kappa, prm.a, m0);

    Rng rng(cfg.seed);
    std::vector<SimEvent> all;

    for (double t = t_begin + rng.exponential() / prm.mu; t <= t_end;
         t += rng.exponential() / prm.mu) {
        all.push_back({t, gr_sample(rng.uniform_open(), cfg.gr), ParentRef::kBackground});
    }

    // Breadth-first over generations; `all` doubles as the queue.
    for (std::size_t k = 0; k < all.size(); ++k) {
        const SimEvent parent = all[k];
        const double rho = productivity(parent.magnitude, prod_law);
        const double budget = rho * omori_law.integral(t_end - parent.time);
        for (double s = rng.exponential(); s <= budget; s += rng.exponential()) {
            const double delay = omori_law.inverse_integral(s / rho);
            const double t = std::min(parent.time + delay, t_end);
            const double u = rng.uniform_open();
            const double m = cfg.conditional ? conditional_sample(u, parent.magnitude, *cfg.conditional)
                                             : gr_sample(u, cfg.gr);
            all.push_back({t, m, static_cast<std::int64_t>(k)});
        }
        if (all.size() > kMaxEvents) {
            throw NumericError("simulate: event count exceeded " + std::to_string(kMaxEvents));
        }
    }

    Catalog raw;
    raw.m0 = m0;
    raw.window = {t_begin, t_end};
    raw.events.reserve(all.size());
    for (const auto& e : all) {
        Event ev;
        ev.time = e.time;
        ev.magnitude = e.magnitude;
        ev.parent = e.parent >= 0 ? ParentRef{e.parent} : ParentRef::background();
        raw.events.push_back(ev);
    }
    sort_by_time(raw);
    if (cfg.learning_period == 0.0) {
        raw.window = cfg.window;
        return raw;
    }
    return filter_catalog(raw, m0, std::numeric_limits<double>::max(), cfg.window);
}

}  // namespace etas
