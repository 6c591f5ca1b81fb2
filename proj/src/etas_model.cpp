#include "etas/etas_model.hpp"

#include "etas/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace etas {

namespace {

// Antiderivative pieces of s^{-p} on [s_l, s_u], expressed through
// L = log s_l, w = log(s_u / s_l) and q = 1 - p.
struct OmoriSpan {
    double value;     // integral of s^{-p} ds = (s_u^q - s_l^q) / q
    double d_dp;      // derivative of value with respect to p
};

// integral_0^w e^{q z} dz
double exp_integral(double q, double w) {
    const double qw = q * w;
    if (qw == 0.0) return w;
    return w * std::expm1(qw) / qw;
}

// integral_0^w z e^{q z} dz
double weighted_exp_integral(double q, double w) {
    const double qw = q * w;
    if (std::abs(qw) < 1.0) {
        // w^2 sum_k (qw)^k / (k! (k + 2))
        double term = 1.0;
        double sum = 0.5;
        for (int k = 1; k < 30; ++k) {
            term *= qw / k;
            const double add = term / (k + 2);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
        }
        return w * w * sum;
    }
    return (w * std::exp(qw) - exp_integral(q, w)) / q;
}

OmoriSpan omori_span(double lower, double upper, double c, double p, bool with_derivative) {
    const double s_l = lower + c;
    const double log_l = std::log(s_l);
    const double w = std::log1p((upper - lower) / s_l);
    const double q = 1.0 - p;
    const double scale = q == 0.0 ? 1.0 : std::exp(q * log_l);
    const double e = exp_integral(q, w);
    OmoriSpan out{scale * e, 0.0};
    if (with_derivative) {
        // d/dp = -d/dq = -integral_{L}^{L+w} y e^{q y} dy
        out.d_dp = -scale * (log_l * e + weighted_exp_integral(q, w));
    }
    return out;
}

// Index of the first event at time >= t.
std::size_t first_not_before(const std::vector<Event>& ev, double t) {
    return static_cast<std::size_t>(
        std::lower_bound(ev.begin(), ev.end(), t, [](const Event& e, double v) { return e.time < v; }) -
        ev.begin());
}

std::vector<double> magnitude_offsets(const Catalog& cat) {
    std::vector<double> x(cat.events.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = cat.events[j].magnitude - cat.m0;
    return x;
}

}  // namespace

void EtasParams::validate() const {
    const auto v = to_array();
    static constexpr const char* names[] = {"mu", "kappa", "c", "a", "p"};
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k]) || !(v[k] > 0.0)) {
            std::ostringstream os;
            os << "EtasParams: " << names[k] << " must be finite and positive (got " << v[k] << ")";
            throw std::invalid_argument(os.str());
        }
    }
}

double intensity(double t, const Catalog& cat, const EtasParams& params) {
    params.validate();
    double sum = 0.0;
    for (const auto& e : cat.events) {
        if (!(e.time < t)) break;
        sum += std::exp(params.a * (e.magnitude - cat.m0)) * std::pow(t - e.time + params.c, -params.p);
    }
    return params.mu + params.kappa * sum;
}

double integrated_intensity(const Catalog& cat, const EtasParams& params, TimeWindow target) {
    params.validate();
    if (!(target.start <= target.end)) throw std::invalid_argument("integrated_intensity: bad window");
    double total = 0.0;
    for (const auto& e : cat.events) {
        if (!(e.time < target.end)) break;
        const double lower = std::max(0.0, target.start - e.time);
        const double upper = target.end - e.time;
        total += std::exp(params.a * (e.magnitude - cat.m0)) *
                 omori_span(lower, upper, params.c, params.p, false).value;
    }
    return params.mu * target.length() + params.kappa * total;
}

LikelihoodValue evaluate_log_likelihood(const Catalog& cat, const EtasParams& params,
                                        TimeWindow target, bool with_gradient) {
    params.validate();
    if (!(target.start <= target.end)) throw std::invalid_argument("log_likelihood: bad target window");
    if (target.start < cat.window.start || target.end > cat.window.end) {
        throw std::invalid_argument("log_likelihood: target window outside the catalog window");
    }
    const auto& ev = cat.events;
    const auto x = magnitude_offsets(cat);
    std::vector<double> ax(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) ax[j] = params.a * x[j];

    const double mu = params.mu;
    const double kappa = params.kappa;
    const double c = params.c;
    const double p = params.p;

    LikelihoodValue out;
    double ll = 0.0;
    double g_mu = 0.0, g_kappa = 0.0, g_c = 0.0, g_a = 0.0, g_p = 0.0;

    const std::size_t begin = first_not_before(ev, target.start);
    std::size_t history_end = 0;
    for (std::size_t i = begin; i < ev.size() && ev[i].time <= target.end; ++i) {
        const double ti = ev[i].time;
        while (history_end < i && ev[history_end].time < ti) ++history_end;
        double s = 0.0, sa = 0.0, sc = 0.0, sp = 0.0;
        if (with_gradient) {
            for (std::size_t j = 0; j < history_end; ++j) {
                const double d = ti - ev[j].time + c;
                const double ld = std::log(d);
                const double w = std::exp(ax[j] - p * ld);
                s += w;
                sa += x[j] * w;
                sc += w / d;
                sp += w * ld;
            }
        } else {
            for (std::size_t j = 0; j < history_end; ++j) {
                s += std::exp(ax[j] - p * std::log(ti - ev[j].time + c));
            }
        }
        const double lambda = mu + kappa * s;
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
            std::ostringstream os;
            os << "log_likelihood: non-positive intensity " << lambda << " at event " << i;
            throw NumericError(os.str());
        }
        ll += std::log(lambda);
        ++out.n_target_events;
        if (with_gradient) {
            const double inv = 1.0 / lambda;
            g_mu += inv;
            g_kappa += s * inv;
            g_a += kappa * sa * inv;
            g_c -= p * kappa * sc * inv;
            g_p -= kappa * sp * inv;
        }
    }

    // Compensator.
    double comp = 0.0;
    for (std::size_t j = 0; j < ev.size() && ev[j].time < target.end; ++j) {
        const double lower = std::max(0.0, target.start - ev[j].time);
        const double upper = target.end - ev[j].time;
        const double prod = std::exp(ax[j]);
        const auto span = omori_span(lower, upper, c, p, with_gradient);
        comp += prod * span.value;
        if (with_gradient) {
            g_kappa -= prod * span.value;
            g_a -= kappa * x[j] * prod * span.value;
            g_c -= kappa * prod * (std::pow(upper + c, -p) - std::pow(lower + c, -p));
            g_p -= kappa * prod * span.d_dp;
        }
    }
    ll -= mu * target.length() + kappa * comp;
    if (with_gradient) g_mu -= target.length();

    out.value = ll;
    if (with_gradient) out.gradient = {g_mu, g_kappa, g_c, g_a, g_p};
    return out;
}

double log_likelihood(const Catalog& cat, const EtasParams& params, TimeWindow target) {
    const auto v = evaluate_log_likelihood(cat, params, target, false);
    if (v.n_target_events == 0) throw std::invalid_argument("log_likelihood: no events in the target window");
    return v.value;
}

FitReport fit_params(const Catalog& cat, const EtasParams& init, double learning_fraction,
                     const FitOptions& options) {
    init.validate();
    if (cat.empty()) throw std::invalid_argument("fit_params: empty catalog");
    if (!(learning_fraction >= 0.0 && learning_fraction < 1.0)) {
        throw std::invalid_argument("fit_params: learning_fraction must lie in [0, 1)");
    }
    FitReport report;
    const double split = cat.window.start + learning_fraction * cat.window.length();
    report.learning_window = {cat.window.start, split};
    report.target_window = {split, cat.window.end};

    constexpr std::size_t dim = 5;
    using Vec = std::array<double, dim>;

    // Objective: negative log-likelihood in log-parameter space.
    auto evaluate = [&](const Vec& z, Vec& grad) -> double {
        Vec theta;
        for (std::size_t k = 0; k < dim; ++k) theta[k] = std::exp(z[k]);
        const auto params = EtasParams::from_array(theta);
        ++report.evaluations;
        try {
            params.validate();
            const auto v = evaluate_log_likelihood(cat, params, report.target_window, true);
            if (v.n_target_events == 0) {
                throw std::invalid_argument("fit_params: no events in the target window");
            }
            if (!std::isfinite(v.value)) return std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < dim; ++k) grad[k] = -v.gradient[k] * theta[k];
            for (double g : grad) {
                if (!std::isfinite(g)) return std::numeric_limits<double>::infinity();
            }
            return -v.value;
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    auto inf_norm = [](const Vec& v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    Vec z;
    {
        const auto a = init.to_array();
        for (std::size_t k = 0; k < dim; ++k) z[k] = std::log(a[k]);
    }
    Vec g{};
    double f = evaluate(z, g);
    if (!std::isfinite(f)) throw NumericError("fit_params: log-likelihood not finite at the initial point");

    // Inverse Hessian approximation, row-major.
    std::array<double, dim * dim> h{};
    auto reset_h = [&](double scale) {
        h.fill(0.0);
        for (std::size_t k = 0; k < dim; ++k) h[k * dim + k] = scale;
    };
    reset_h(1.0 / std::max(1.0, inf_norm(g)));
    bool h_fresh = true;

    constexpr double armijo = 1e-4;
    constexpr double max_step = 2.0;  // log units per iteration
    std::size_t small_change_streak = 0;
    bool converged = false;

    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        const double gtol = options.gradient_tolerance * std::max(1.0, std::abs(f));
        if (inf_norm(g) <= gtol) {
            converged = true;
            break;
        }
        Vec dir{};
        for (std::size_t r = 0; r < dim; ++r) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) acc -= h[r * dim + k] * g[k];
            dir[r] = acc;
        }
        double slope = 0.0;
        for (std::size_t k = 0; k < dim; ++k) slope += dir[k] * g[k];
        if (!(slope < 0.0)) {
            reset_h(1.0 / std::max(1.0, inf_norm(g)));
            h_fresh = true;
            continue;
        }
        double step = 1.0;
        const double dn = inf_norm(dir);
        if (dn * step > max_step) step = max_step / dn;

        Vec z_new{}, g_new{};
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < dim; ++k) z_new[k] = z[k] + step * dir[k];
            f_new = evaluate(z_new, g_new);
            if (std::isfinite(f_new) && f_new <= f + armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (h_fresh) break;  // no descent possible along the gradient either
            reset_h(1.0 / std::max(1.0, inf_norm(g)));
            h_fresh = true;
            continue;
        }

        Vec s{}, y{};
        double sy = 0.0, yy = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            s[k] = z_new[k] - z[k];
            y[k] = g_new[k] - g[k];
            sy += s[k] * y[k];
            yy += y[k] * y[k];
        }
        const double change = std::abs(f - f_new);
        const double f_old = f;
        z = z_new;
        g = g_new;
        f = f_new;

        if (sy > 1e-12 * std::sqrt(yy) * inf_norm(s)) {
            if (h_fresh) reset_h(sy / yy);
            // BFGS inverse update: H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rho = 1.0 / sy;
            Vec hy{};
            for (std::size_t r = 0; r < dim; ++r) {
                double acc = 0.0;
                for (std::size_t k = 0; k < dim; ++k) acc += h[r * dim + k] * y[k];
                hy[r] = acc;
            }
            double yhy = 0.0;
            for (std::size_t k = 0; k < dim; ++k) yhy += y[k] * hy[k];
            for (std::size_t r = 0; r < dim; ++r) {
                for (std::size_t k = 0; k < dim; ++k) {
                    h[r * dim + k] += -rho * (s[r] * hy[k] + hy[r] * s[k]) +
                                      (rho * rho * yhy + rho) * s[r] * s[k];
                }
            }
            h_fresh = false;
        }

        if (change <= options.relative_tolerance * std::max(1.0, std::abs(f_old))) {
            if (++small_change_streak >= 3) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            small_change_streak = 0;
        }
    }

    Vec theta;
    for (std::size_t k = 0; k < dim; ++k) theta[k] = std::exp(z[k]);
    report.params = EtasParams::from_array(theta);
    report.log_likelihood = -f;
    report.iterations = iter;
    report.converged = converged;
    return report;
}

Catalog time_rescale(const Catalog& cat, const EtasParams& params) {
    params.validate();
    Catalog out = cat;
    const auto& ev = cat.events;
    const auto x = magnitude_offsets(cat);
    std::vector<double> prod(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) prod[j] = std::exp(params.a * x[j]);

    auto transform = [&](double t) {
        double sum = 0.0;
        for (std::size_t j = 0; j < ev.size() && ev[j].time < t; ++j) {
            sum += prod[j] * omori_span(0.0, t - ev[j].time, params.c, params.p, false).value;
        }
        return params.mu * (t - cat.window.start) + params.kappa * sum;
    };
    for (std::size_t i = 0; i < ev.size(); ++i) out.events[i].time = transform(ev[i].time);
    out.window = {0.0, transform(cat.window.end)};
    return out;
}

Attribution attribute_mothers(const Catalog& cat, const EtasParams& params) {
    params.validate();
    const auto& ev = cat.events;
    Attribution out(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        MotherAssignment best{ParentRef::background(), params.mu};
        for (std::size_t j = 0; j < i && ev[j].time < ev[i].time; ++j) {
            const double term = params.kappa * std::exp(params.a * (ev[j].magnitude - cat.m0)) *
                                std::pow(ev[i].time - ev[j].time + params.c, -params.p);
            if (term > best.contribution || (term == best.contribution && best.mother.is_index())) {
                best = {ParentRef::index(j), term};
            }
        }
        out[i] = best;
    }
    return out;
}

}  // namespace etas
