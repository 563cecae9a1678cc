#pragma once

#include <cstdint>
#include <vector>

namespace pointcert {

/// Total failure probability of a statistical claim.
struct Confidence {
    double alpha = 1e-3;
    bool one_sided = true;

    void validate() const;
};

/// Standard normal CDF.
double phi(double x);

/// Standard normal quantile, p in (0, 1). Absolute error below 1e-9
/// (rational approximation refined by Newton steps on phi).
double phi_inv(double p);

/// Chi-square CDF with `dof` degrees of freedom, x >= 0, dof >= 1.
double chi2_cdf(double x, int dof);

/// Chi-square quantile; |chi2_cdf(chi2_inv(p, m), m) - p| <= 1e-10.
double chi2_inv(double p, int dof);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double regularized_beta(double x, double a, double b);

/// Quantile of Beta(a, b): smallest x with I_x(a, b) >= p.
double beta_inv(double p, double a, double b);

/// One-sided lower confidence bound for a binomial proportion at level
/// 1 - alpha: 0 when k = 0, alpha^(1/n) when k = n, otherwise the
/// alpha-quantile of Beta(k, n - k + 1).
double clopper_pearson_lower(std::int64_t k, std::int64_t n, double alpha);

/// Gauss-Hermite rule: integral of f(t) exp(-t^2) dt ~ sum w_i f(t_i).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int n);

/// Tolerance budget of the scalar functions above. Certification engines
/// subtract this from every margin before issuing a certificate.
inline constexpr double kSpecialFnSlack = 1e-9;

} // namespace pointcert
