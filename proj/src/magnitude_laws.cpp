#include "etas/magnitude_laws.hpp"

#include "etas/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace etas {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

GrLaw::GrLaw(double beta, double m0) : beta_(beta), m0_(m0) {
    require(std::isfinite(beta) && beta > 0.0, "GrLaw: beta must be positive");
    require(std::isfinite(m0), "GrLaw: m0 must be finite");
}

ConditionalLaw::ConditionalLaw(double beta, double a, double c1, double m0)
    : beta_(beta), a_(a), c1_(c1), m0_(m0) {
    require(std::isfinite(beta) && beta > 0.0, "ConditionalLaw: beta must be positive");
    require(std::isfinite(a) && a > 0.0, "ConditionalLaw: a must be positive");
    require(c1 >= 0.0 && c1 < 1.0, "ConditionalLaw: c1 must lie in [0, 1)");
    require(beta > a, "ConditionalLaw: requires beta > a");
    require(std::isfinite(m0), "ConditionalLaw: m0 must be finite");
}

double ConditionalLaw::coupling(double m_prime) const {
    require(m_prime >= m0_, "ConditionalLaw: mother magnitude below m0");
    return 1.0 - 2.0 * std::exp(-(beta_ - a_) * (m_prime - m0_));
}

OmoriLaw::OmoriLaw(double c, double p) : c_(c), p_(p) {
    require(std::isfinite(c) && c > 0.0, "OmoriLaw: c must be positive");
    require(std::isfinite(p) && p > 0.0, "OmoriLaw: p must be positive");
}

double OmoriLaw::integral(double t) const {
    require(t >= 0.0, "OmoriLaw::integral: negative time");
    if (p_ == 1.0) return std::log1p(t / c_);
    // ((t + c)^{1-p} - c^{1-p}) / (1 - p), written to stay accurate near p = 1.
    const double q = 1.0 - p_;
    const double lc = std::log(c_);
    const double span = std::log1p(t / c_);
    return std::exp(q * lc) * span * (q * span == 0.0 ? 1.0 : std::expm1(q * span) / (q * span));
}

double OmoriLaw::inverse_integral(double value) const {
    require(value >= 0.0, "OmoriLaw::inverse_integral: negative value");
    if (p_ == 1.0) return c_ * std::expm1(value);
    // (1 + t/c)^q = 1 + q value / c^q
    const double q = 1.0 - p_;
    const double z = q * value / std::pow(c_, q);
    if (!(z > -1.0)) return std::numeric_limits<double>::infinity();  // beyond the total mass (p > 1)
    return c_ * std::expm1(std::log1p(z) / q);
}

ProductivityLaw::ProductivityLaw(double kappa, double a, double m0) : kappa_(kappa), a_(a), m0_(m0) {
    require(std::isfinite(kappa) && kappa > 0.0, "ProductivityLaw: kappa must be positive");
    require(std::isfinite(a), "ProductivityLaw: a must be finite");
    require(std::isfinite(m0), "ProductivityLaw: m0 must be finite");
}

double gr_density(double m, const GrLaw& law) {
    require(m >= law.m0(), "gr_density: magnitude below m0");
    return law.beta() * std::exp(-law.beta() * (m - law.m0()));
}

double gr_cdf(double m, const GrLaw& law) {
    if (m <= law.m0()) return 0.0;
    return -std::expm1(-law.beta() * (m - law.m0()));
}

double gr_sample(double u, const GrLaw& law) {
    require(u > 0.0 && u < 1.0, "gr_sample: u must lie in (0, 1)");
    return law.m0() - std::log1p(-u) / law.beta();
}

double conditional_density(double m, double m_prime, const ConditionalLaw& law) {
    require(m >= law.m0(), "conditional_density: magnitude below m0");
    const double g = law.coupling(m_prime);
    const double y = std::exp(-law.beta() * (m - law.m0()));
    const double value = law.beta() * y * (1.0 + law.c1() * g * (1.0 - 2.0 * y));
    if (value < 0.0) {
        std::ostringstream os;
        os << "conditional_density: negative density at m=" << m << ", m'=" << m_prime;
        throw NumericError(os.str());
    }
    return value;
}

double conditional_cdf(double m, double m_prime, const ConditionalLaw& law) {
    const double g = law.coupling(m_prime);
    if (m <= law.m0()) return 0.0;
    const double y = std::exp(-law.beta() * (m - law.m0()));
    // F = 1 - y + c1 g (y^2 - y)
    return -std::expm1(-law.beta() * (m - law.m0())) + law.c1() * g * y * (y - 1.0);
}

double conditional_sample(double u, double m_prime, const ConditionalLaw& law) {
    require(u > 0.0 && u < 1.0, "conditional_sample: u must lie in (0, 1)");
    const double k = law.c1() * law.coupling(m_prime);
    if (k == 0.0) return gr_sample(u, law.marginal_gr());
    // k y^2 - (1 + k) y + (1 - u) = 0, root in (0, 1]. The stable form of the smaller root
    // is 2 s / ((1 + k) + sqrt((1 + k)^2 - 4 k s)) with s = 1 - u.
    const double s = 1.0 - u;
    const double b = 1.0 + k;
    const double disc = b * b - 4.0 * k * s;
    if (!(disc >= 0.0)) {
        std::ostringstream os;
        os << "conditional_sample: no real root for u=" << u << ", m'=" << m_prime;
        throw NumericError(os.str());
    }
    double y = 2.0 * s / (b + std::sqrt(disc));
    // At u -> 0 the exact root is 1; rounding may put it a few ulps above.
    if (y > 1.0 && y <= 1.0 + 1e-12) y = 1.0;
    if (!(y > 0.0 && y <= 1.0)) {
        std::ostringstream os;
        os << "conditional_sample: root " << y << " outside (0, 1] for u=" << u << ", m'=" << m_prime;
        throw NumericError(os.str());
    }
    return law.m0() - std::log(y) / law.beta();
}

double conditional_mean(double m_prime, const ConditionalLaw& law) {
    return law.m0() + (1.0 + 0.5 * law.c1() * law.coupling(m_prime)) / law.beta();
}

double conditional_exp_moment(double s, double m_prime, const ConditionalLaw& law) {
    require(s < law.beta(), "conditional_exp_moment: requires s < beta");
    const double beta = law.beta();
    const double k = law.c1() * law.coupling(m_prime);
    // integral of beta e^{-beta x} e^{s x} [1 + k (1 - 2 e^{-beta x})] over x >= 0
    return (1.0 + k) * beta / (beta - s) - 2.0 * k * beta / (2.0 * beta - s);
}

double productivity(double m, const ProductivityLaw& law) {
    require(m >= law.m0(), "productivity: magnitude below m0");
    return law.kappa() * std::exp(law.a() * (m - law.m0()));
}

double omori(double t, const OmoriLaw& law) {
    require(t >= 0.0, "omori: negative time");
    return std::pow(t + law.c(), -law.p());
}

}  // namespace etas
