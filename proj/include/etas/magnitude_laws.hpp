#pragma once

#include <numbers>

namespace etas {

/// Gutenberg-Richter density beta * exp(-beta (m - m0)) above the completeness magnitude.
class GrLaw {
public:
    GrLaw(double beta, double m0);

    /// beta = b ln 10.
    [[nodiscard]] static GrLaw from_b_value(double b, double m0) {
        return GrLaw(b * std::numbers::ln10, m0);
    }

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double m0() const noexcept { return m0_; }
    [[nodiscard]] double b_value() const noexcept { return beta_ / std::numbers::ln10; }

private:
    double beta_;
    double m0_;
};

/// Triggered-magnitude law conditioned on the mother magnitude m':
///
///   p(m | m') = beta e^{-beta x} [1 + c1 (1 - 2 e^{-(beta - a) x'}) (1 - 2 e^{-beta x})]
///
/// with x = m - m0 and x' = m' - m0. Reduces to GrLaw when c1 = 0. The constructor
/// requires 0 <= c1 < 1 and beta > a, which keeps the bracket positive for every m'.
class ConditionalLaw {
public:
    ConditionalLaw(double beta, double a, double c1, double m0);

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double c1() const noexcept { return c1_; }
    [[nodiscard]] double m0() const noexcept { return m0_; }
    [[nodiscard]] GrLaw marginal_gr() const { return GrLaw(beta_, m0_); }

    /// The mother-dependent factor g(m') = 1 - 2 e^{-(beta - a)(m' - m0)}, in [-1, 1).
    [[nodiscard]] double coupling(double m_prime) const;

private:
    double beta_;
    double a_;
    double c1_;
    double m0_;
};

/// Omori-Utsu kernel (t + c)^{-p}.
class OmoriLaw {
public:
    OmoriLaw(double c, double p);

    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] double p() const noexcept { return p_; }

    /// Integral of the kernel over [0, t]; logarithmic form at p = 1.
    [[nodiscard]] double integral(double t) const;

    /// Inverse of integral(): the t >= 0 with integral(t) = value.
    [[nodiscard]] double inverse_integral(double value) const;

private:
    double c_;
    double p_;
};

/// Expected direct offspring scaling kappa e^{a (m - m0)}.
class ProductivityLaw {
public:
    ProductivityLaw(double kappa, double a, double m0);

    [[nodiscard]] double kappa() const noexcept { return kappa_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double m0() const noexcept { return m0_; }

private:
    double kappa_;
    double a_;
    double m0_;
};

[[nodiscard]] double gr_density(double m, const GrLaw& law);
[[nodiscard]] double gr_cdf(double m, const GrLaw& law);
/// Inverse-CDF draw; u must lie in (0, 1).
[[nodiscard]] double gr_sample(double u, const GrLaw& law);

[[nodiscard]] double conditional_density(double m, double m_prime, const ConditionalLaw& law);
[[nodiscard]] double conditional_cdf(double m, double m_prime, const ConditionalLaw& law);
/// Closed-form inverse of conditional_cdf (a quadratic in y = e^{-beta (m - m0)}).
[[nodiscard]] double conditional_sample(double u, double m_prime, const ConditionalLaw& law);
/// E[m | m'] = m0 + (1 + c1 g(m') / 2) / beta.
[[nodiscard]] double conditional_mean(double m_prime, const ConditionalLaw& law);
/// E[e^{s (m - m0)} | m'] for s < beta.
[[nodiscard]] double conditional_exp_moment(double s, double m_prime, const ConditionalLaw& law);

[[nodiscard]] double productivity(double m, const ProductivityLaw& law);
[[nodiscard]] double omori(double t, const OmoriLaw& law);

}  // namespace etas
