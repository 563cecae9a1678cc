#include "pointcert/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pointcert/errors.hpp"

namespace pointcert {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Acklam's rational approximation to the normal quantile (~1e-9 relative
// error before refinement).
double norm_quantile_estimate(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// Lower incomplete gamma by power series, for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma by Lentz continued fraction, for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the incomplete beta (Lentz).
double beta_cf(double x, double a, double b) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double md = static_cast<double>(m);
        const double m2 = 2.0 * md;
        double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h;
}

double beta_pdf_log(double x, double a, double b) {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
           (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Monotone bracketed inversion of an increasing CDF: Newton steps that stay
// inside the bracket, otherwise bisection (geometric once the lower edge is
// positive, so quantiles many orders of magnitude below the bracket width
// still resolve). Tolerance is in probability space.
template <typename Cdf, typename Pdf>
double invert_cdf(double p, double lo, double hi, Cdf cdf, Pdf pdf, double ptol) {
    const auto midpoint = [](double a, double b) {
        return a > 0.0 ? std::sqrt(a) * std::sqrt(b) : 0.5 * (a + b);
    };
    double x = midpoint(std::max(lo, 1e-300), hi);
    double f = cdf(x) - p;
    for (int it = 0; it < 400; ++it) {
        if (std::fabs(f) <= ptol) break;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        const double dens = pdf(x);
        double next = dens > 1e-300 ? x - f / dens : midpoint(lo, hi);
        if (!(next > lo && next < hi)) next = midpoint(lo, hi);
        if (next == x) break;
        x = next;
        f = cdf(x) - p;
    }
    return x;
}

} // namespace

void Confidence::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("confidence alpha must be in (0, 1)");
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Lower-half quantile (p <= 0.5), where phi is a relatively accurate small
// tail value and Newton refinement is numerically safe.
double phi_inv_lower(double p) {
    double x = norm_quantile_estimate(p);
    // Two Newton refinements push the absolute error well below 1e-9.
    for (int i = 0; i < 2; ++i) {
        const double err = phi(x) - p;
        const double dens = normal_pdf(x);
        if (dens <= 0.0) break;
        x -= err / dens;
    }
    return x;
}

} // namespace

double phi_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("phi_inv requires p in (0, 1)");
    if (p == 0.5) return 0.0;
    // Symmetric by construction: the upper half routes through the lower
    // tail, which avoids cancellation in erfc near 1.
    return p < 0.5 ? phi_inv_lower(p) : -phi_inv_lower(1.0 - p);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw DomainError("regularized_gamma_p requires a > 0");
    if (!(x >= 0.0)) throw DomainError("regularized_gamma_p requires x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi2_cdf(double x, int dof) {
    if (dof < 1) throw DomainError("chi2_cdf requires dof >= 1");
    if (!(x >= 0.0)) throw DomainError("chi2_cdf requires x >= 0");
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi2_inv(double p, int dof) {
    if (dof < 1) throw DomainError("chi2_inv requires dof >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("chi2_inv requires p in (0, 1)");
    const double m = static_cast<double>(dof);
    // Bracket: mean + tails grow like m + k*sqrt(2m); widen until enclosed.
    double hi = m + 10.0 * std::sqrt(2.0 * m) + 10.0;
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    const double half = 0.5 * m;
    auto cdf = [dof](double x) { return chi2_cdf(x, dof); };
    auto pdf = [half](double x) {
        if (x <= 0.0) return 0.0;
        return std::exp((half - 1.0) * std::log(x) - 0.5 * x - half * std::log(2.0) -
                        std::lgamma(half));
    };
    return invert_cdf(p, 0.0, hi, cdf, pdf, 1e-12);
}

double regularized_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("regularized_beta requires a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("regularized_beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = a * std::log(x) + b * std::log1p(-x) -
                            (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
    return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double beta_inv(double p, double a, double b) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta_inv requires p in [0, 1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    auto cdf = [a, b](double x) { return regularized_beta(x, a, b); };
    auto pdf = [a, b](double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return std::exp(beta_pdf_log(x, a, b));
    };
    return invert_cdf(p, 0.0, 1.0, cdf, pdf, 1e-12);
}

double clopper_pearson_lower(std::int64_t k, std::int64_t n, double alpha) {
    if (n < 1) throw DomainError("clopper_pearson_lower requires n >= 1");
    if (k < 0 || k > n) throw DomainError("clopper_pearson_lower requires 0 <= k <= n");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("clopper_pearson_lower requires alpha in (0, 1)");
    if (k == 0) return 0.0;
    if (k == n) return std::pow(alpha, 1.0 / static_cast<double>(n));
    return beta_inv(alpha, static_cast<double>(k), static_cast<double>(n - k + 1));
}

GaussHermiteRule gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite requires n >= 1");
    GaussHermiteRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    // Newton iteration on the physicists' Hermite polynomials, largest root
    // first; symmetric pairs fill in from both ends.
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[1];
        else
            z = 2.0 * z - rule.nodes[static_cast<std::size_t>(i) - 2];

        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 0.7511255444649425; // pi^(-1/4)
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
        const double w = 2.0 / (pp * pp);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    // The plain double recurrence loses the far nodes somewhere above
    // n ~ 200; verify the first two moments instead of returning garbage.
    double mass = 0.0, second = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        mass += rule.weights[i];
        second += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
    }
    const double sqrt_pi = std::sqrt(kPi);
    if (!(std::fabs(mass - sqrt_pi) <= 1e-10 * sqrt_pi) ||
        !(std::fabs(second - 0.5 * sqrt_pi) <= 1e-10 * sqrt_pi))
        throw DomainError("gauss_hermite: order " + std::to_string(n) +
                          " is beyond the accuracy of the recurrence");
    return rule;
}

} // namespace pointcert
