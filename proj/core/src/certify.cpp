#include "pointcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pointcert/errors.hpp"
#include "pointcert/specialfn.hpp"

namespace pointcert {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt3 = 1.73205080756887729353;

// phi_inv extended to the closed interval for bound arithmetic.
double quantile_or_inf(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return phi_inv(p);
}

// chi-square helpers tolerant of the 0/1 limits reached inside the nested
// p-tilde compositions.
double chi2_cdf3_ext(double x) {
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return chi2_cdf(x, 3);
}

double chi2_inv3_ext(double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return chi2_inv(p, 3);
}

} // namespace

int Region::lattice_dim() const {
    switch (kind) {
    case Kind::Interval: return 1;
    case Kind::Box: return static_cast<int>(extent.size());
    case Kind::L2Ball:
        return family == TransformFamily::AdditiveNoise ? -1
                                                        : family_traits(family).param_dim;
    case Kind::FrobeniusBall: return 9;
    case Kind::RotationBall: return -1; // probed through the sphere grid
    }
    return -1;
}

const char* region_kind_name(Region::Kind kind) {
    switch (kind) {
    case Region::Kind::Interval: return "interval";
    case Region::Kind::Box: return "box";
    case Region::Kind::L2Ball: return "l2_ball";
    case Region::Kind::FrobeniusBall: return "frobenius_ball";
    case Region::Kind::RotationBall: return "rotation_ball";
    }
    return "?";
}

Region::Kind region_kind_from_name(const std::string& name) {
    if (name == "interval") return Region::Kind::Interval;
    if (name == "box") return Region::Kind::Box;
    if (name == "l2_ball") return Region::Kind::L2Ball;
    if (name == "frobenius_ball") return Region::Kind::FrobeniusBall;
    if (name == "rotation_ball") return Region::Kind::RotationBall;
    throw InvalidInput("unknown region kind: " + name);
}

double certify_additive(double pa_lower, double pb_upper) {
    if (!(pa_lower >= 0.0 && pa_lower <= 1.0 && pb_upper >= 0.0 && pb_upper <= 1.0))
        throw DomainError("certify_additive: bounds must lie in [0, 1]");
    if (pa_lower <= pb_upper) return 0.0;
    return 0.5 * (quantile_or_inf(pa_lower) - quantile_or_inf(pb_upper));
}

double sampled_threshold(TransformFamily family, const GridSpec& grid, std::size_t n_points,
                         double cloud_norm, RotationBound bound) {
    if (grid.resolution < 1) throw InvalidInput("sampled_threshold: resolution must be >= 1");
    if (n_points < 1) throw InvalidInput("sampled_threshold: empty cloud");
    const double n = static_cast<double>(n_points);
    const double m = static_cast<double>(grid.resolution);
    const auto expect_ranges = [&](std::size_t k) {
        if (grid.ranges.size() != k)
            throw InvalidInput("sampled_threshold: wrong range count for family");
        for (double r : grid.ranges)
            if (!(r > 0.0)) throw InvalidInput("sampled_threshold: ranges must be positive");
    };
    switch (family) {
    case TransformFamily::ZTaper: {
        expect_ranges(1);
        return grid.ranges[0] * std::sqrt(n) / (2.0 * m);
    }
    case TransformFamily::TaperRotation: {
        expect_ranges(2);
        const double taper = grid.ranges[0];
        return std::sqrt(n * (4.0 * taper * taper + 8.0 * taper + 5.0)) / (2.0 * m);
    }
    case TransformFamily::TwistTaperRotation: {
        expect_ranges(3);
        const double taper = grid.ranges[1];
        const double g = 1.0 + taper;
        return std::sqrt(n * (1.0 + 6.75 * g * g)) / (2.0 * m);
    }
    case TransformFamily::GeneralRotation: {
        expect_ranges(1);
        const double r = grid.ranges[0];
        if (bound == RotationBound::Standard) return kSqrt2 * kPi * r * cloud_norm / (4.0 * m);
        // Tight variant: worst composed angle 2*arccos(1 - x) with
        // x = delta^2/4 + eps^2 r^2 / 8, eps = sqrt(2)/(2M), delta = r/(2M).
        const double x = r * r / (8.0 * m * m);
        const double angle = 2.0 * (std::sqrt(2.0 * x) + (kPi / 2.0 - kSqrt2) * std::pow(x, 1.5));
        return angle * cloud_norm;
    }
    default:
        throw InvalidInput(std::string("sampled_threshold: unsupported family ") +
                           family_traits(family).name);
    }
}

namespace {

// Symmetric axis grid with spacing 2/M and both endpoints included, so the
// worst distance to a grid value is 1/M.
std::vector<double> axis_grid(double range, int m) {
    std::vector<double> vals;
    const double step = 2.0 / static_cast<double>(m);
    const int k = static_cast<int>(std::ceil(range * m - 1e-9));
    vals.reserve(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i < k; ++i) vals.push_back(-range + step * i);
    vals.push_back(range);
    return vals;
}

} // namespace

std::vector<TransformParam> certification_grid(TransformFamily family, const GridSpec& grid,
                                               std::int64_t max_points) {
    if (grid.resolution < 1) throw InvalidInput("certification_grid: resolution must be >= 1");
    const int m = grid.resolution;
    std::vector<TransformParam> out;
    const auto budget = [&](std::int64_t count) {
        if (count > max_points)
            throw ResourceError("certification grid of " + std::to_string(count) +
                                " points exceeds the budget of " + std::to_string(max_points));
    };
    switch (family) {
    case TransformFamily::ZTaper: {
        if (grid.ranges.size() != 1) throw InvalidInput("z_taper grid expects one range");
        const double r = grid.ranges[0];
        budget(static_cast<std::int64_t>(m) + 1);
        for (int j = 0; j <= m; ++j)
            out.push_back(ZTaperParam{(2.0 * j / static_cast<double>(m) - 1.0) * r});
        return out;
    }
    case TransformFamily::TaperRotation: {
        if (grid.ranges.size() != 2)
            throw InvalidInput("taper_rotation grid expects two ranges");
        const auto taper = axis_grid(grid.ranges[0], m);
        const auto rot = axis_grid(grid.ranges[1], m);
        budget(static_cast<std::int64_t>(taper.size()) * static_cast<std::int64_t>(rot.size()));
        for (double a : taper)
            for (double b : rot) out.push_back(TaperRotationParam{a, b});
        return out;
    }
    case TransformFamily::TwistTaperRotation: {
        if (grid.ranges.size() != 3)
            throw InvalidInput("twist_taper_rotation grid expects three ranges");
        const auto twist = axis_grid(grid.ranges[0], m);
        const auto taper = axis_grid(grid.ranges[1], m);
        const auto rot = axis_grid(grid.ranges[2], m);
        budget(static_cast<std::int64_t>(twist.size()) * static_cast<std::int64_t>(taper.size()) *
               static_cast<std::int64_t>(rot.size()));
        for (double a : twist)
            for (double b : taper)
                for (double c : rot) out.push_back(TwistTaperRotationParam{a, b, c});
        return out;
    }
    case TransformFamily::GeneralRotation: {
        if (grid.ranges.size() != 1)
            throw InvalidInput("general_rotation grid expects one range");
        const auto rotations = sample_sphere_grid(m, grid.ranges[0]);
        budget(static_cast<std::int64_t>(rotations.size()));
        out.reserve(rotations.size());
        for (const auto& r : rotations) out.push_back(r);
        return out;
    }
    default:
        throw InvalidInput(std::string("certification_grid: unsupported family ") +
                           family_traits(family).name);
    }
}

Certificate certify_sampled(const BaseClassifier& classifier, const PointCloud& cloud,
                            TransformFamily family, const GridSpec& grid, double sigma,
                            std::int64_t n_per_point, double alpha, std::uint64_t seed,
                            const SampledOptions& options) {
    if (!(sigma > 0.0)) throw InvalidInput("certify_sampled: sigma must be positive");
    const auto params = certification_grid(family, grid, options.max_grid_points);
    const int m_splits = static_cast<int>(params.size());
    const double threshold = sampled_threshold(family, grid, cloud.size(),
                                               cloud.frobenius_norm(), options.rotation_bound);
    const SmoothingSpec spec = SmoothingSpec::input_gaussian(sigma);

    Certificate cert;
    cert.protocol = family == TransformFamily::GeneralRotation ? "sampled_rotation"
                                                               : "sampled_lattice";
    cert.alpha = alpha;
    cert.grid_m = grid.resolution;
    cert.grid_points = m_splits;
    cert.n_samples = n_per_point;
    cert.seed = seed;
    cert.region.family = family;
    cert.region.kind = family == TransformFamily::GeneralRotation
                           ? Region::Kind::RotationBall
                           : (grid.ranges.size() == 1 ? Region::Kind::Interval : Region::Kind::Box);
    cert.region.extent = grid.ranges;

    double min_left = std::numeric_limits<double>::infinity();
    double min_pa = 1.0;
    int top = -1;
    for (std::size_t j = 0; j < params.size(); ++j) {
        const PointCloud moved = apply_transform(params[j], cloud);
        const auto counts = estimate_probs(classifier, moved, spec, n_per_point,
                                           mix_seed(seed, static_cast<std::uint64_t>(j)),
                                           options.threads);
        const ProbBound bound = certify_bound(counts, alpha, m_splits);
        if (bound.pa_lower <= 0.5) {
            cert.top_label = -1;
            cert.certified = false;
            cert.reason = "abstain at grid index " + std::to_string(j);
            cert.pa_lower = bound.pa_lower;
            return cert;
        }
        if (top < 0) {
            top = bound.top_label;
        } else if (bound.top_label != top) {
            cert.top_label = -1;
            cert.certified = false;
            cert.reason = "label mismatch at grid index " + std::to_string(j);
            cert.pa_lower = std::min(min_pa, bound.pa_lower);
            return cert;
        }
        const double left =
            0.5 * sigma * (quantile_or_inf(bound.pa_lower) - quantile_or_inf(bound.pb_upper));
        min_left = std::min(min_left, left);
        min_pa = std::min(min_pa, bound.pa_lower);
    }

    cert.top_label = top;
    cert.pa_lower = min_pa;
    cert.margin = min_left - kSpecialFnSlack - threshold;
    cert.certified = cert.margin > 0.0;
    if (!cert.certified && cert.reason.empty()) cert.reason = "margin below threshold";
    return cert;
}

double p_tilde_lower(double pa, double frob_radius, int arc_samples) {
    if (!(pa > 0.5 && pa < 1.0)) throw DomainError("p_tilde_lower: pa must be in (0.5, 1)");
    if (arc_samples < 1) throw InvalidInput("p_tilde_lower: arc_samples must be >= 1");
    if (frob_radius <= 0.0) return pa;       // continuous limit
    if (frob_radius >= 1.0) return 0.0;      // outside the validity range
    const double r = frob_radius;
    const double u = chi2_inv(pa, 3);
    const double u_comp = chi2_inv(1.0 - pa, 3);

    // All scales equal: worst case splits the budget evenly over three axes.
    const double up = 1.0 + r / kSqrt3;
    const double down = 1.0 - r / kSqrt3;
    const double p1 = chi2_cdf3_ext(u / std::pow(up, 6));
    const double p2 = 1.0 - chi2_cdf3_ext(u_comp / std::pow(down, 6));

    // Mixed cases: infimum over the quarter arc r1^2 + r2^2 = r^2, sampled
    // and corrected by the Lipschitz bound of the minimized function.
    const double step = (kPi / 2.0) / static_cast<double>(arc_samples);
    double min3 = std::numeric_limits<double>::infinity();
    double min4 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < arc_samples; ++i) {
        const double theta = (i + 0.5) * step;
        const double r1 = r * std::cos(theta);
        const double r2 = r * std::sin(theta);
        {
            const double inner = chi2_cdf3_ext(u_comp / ((1.0 - r2) * (1.0 - r2)));
            const double v =
                chi2_cdf3_ext(chi2_inv3_ext(1.0 - inner) / std::pow(1.0 + r1 / kSqrt2, 4));
            min3 = std::min(min3, v);
        }
        {
            const double inner = chi2_cdf3_ext(u / ((1.0 + r2) * (1.0 + r2)));
            const double v = 1.0 - chi2_cdf3_ext(chi2_inv3_ext(1.0 - inner) /
                                                 std::pow(1.0 - r1 / kSqrt2, 4));
            min4 = std::min(min4, v);
        }
    }
    const double sqrt_pi_e = std::sqrt(kPi * 2.718281828459045235360287);
    const double tail = std::sqrt(kPi) * std::sqrt(u) * std::exp(-0.5 * u + 1.0);
    const double l3 = 2.0 * r * u / sqrt_pi_e +
                      kSqrt2 * r * u_comp / (std::pow(1.0 - r, 3) * tail);
    const double l4 = kSqrt2 * r * u / sqrt_pi_e +
                      2.0 * r * u_comp / (std::pow(1.0 - r / kSqrt2, 5) * tail);
    const double p3 = std::max(0.0, min3 - 0.5 * step * l3);
    const double p4 = std::max(0.0, min4 - 0.5 * step * l4);

    return std::clamp(std::min(std::min(p1, p2), std::min(p3, p4)), 0.0, 1.0);
}

double linear_certified_radius(double pa, double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("linear_certified_radius: sigma must be positive");
    if (!(pa > 0.5 && pa < 1.0)) return 0.0;
    const auto holds = [&](double r) {
        const double pt = p_tilde_lower(pa, r);
        if (pt <= 0.5) return false;
        const double gap = sigma * (phi_inv(pt) - phi_inv(1.0 - pt));
        return r + kSpecialFnSlack <= gap / (2.0 + gap);
    };
    double lo = 0.0;
    double hi = 1.0 - 1e-6;
    if (holds(hi)) return hi;
    // The condition is monotone: p_tilde shrinks and the right side grows
    // more slowly than r.
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

Certificate certify_linear(const BaseClassifier& classifier, const PointCloud& cloud,
                           double sigma, std::int64_t n, double alpha, std::uint64_t seed,
                           double requested_radius, int threads) {
    if (!(requested_radius >= 0.0)) throw InvalidInput("certify_linear: negative radius");
    const SmoothingSpec spec = SmoothingSpec::linear_map_gaussian(sigma);
    const auto counts = estimate_probs(classifier, cloud, spec, n, seed, threads);
    const ProbBound bound = certify_bound(counts, alpha, 1);

    Certificate cert;
    cert.protocol = "linear_map";
    cert.alpha = alpha;
    cert.n_samples = n;
    cert.seed = seed;
    cert.region.family = TransformFamily::Linear;
    cert.region.kind = Region::Kind::FrobeniusBall;
    cert.region.extent = {requested_radius};
    cert.pa_lower = bound.pa_lower;

    if (bound.pa_lower <= 0.5) {
        cert.top_label = -1;
        cert.certified = false;
        cert.reason = "abstain: pa_lower <= 0.5";
        return cert;
    }
    cert.top_label = bound.top_label;
    const double certified_radius = linear_certified_radius(bound.pa_lower, sigma);
    cert.margin = certified_radius - requested_radius - kSpecialFnSlack;
    cert.certified = cert.margin > 0.0;
    if (!cert.certified) cert.reason = "requested radius exceeds the certified radius";
    return cert;
}

double certify_l2(double pa_lower, double pb_upper, double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("certify_l2: sigma must be positive");
    return sigma * certify_additive(pa_lower, pb_upper);
}

double certify_linf(double pa_lower, double pb_upper, double sigma, std::size_t n_points) {
    if (n_points < 1) throw InvalidInput("certify_linf: empty cloud");
    return certify_l2(pa_lower, pb_upper, sigma) /
           std::sqrt(3.0 * static_cast<double>(n_points));
}

double zyx_to_general(double euler_range) {
    if (!(euler_range >= 0.0 && euler_range <= kPi / 2.0 + 1e-15))
        throw DomainError("zyx_to_general: euler range must lie in [0, pi/2]");
    return 2.0 * euler_range;
}

double region_weighted_radius(const Region& region, const std::vector<double>& sigma) {
    for (double s : sigma)
        if (!(s > 0.0)) throw InvalidInput("region_weighted_radius: sigma must be positive");
    switch (region.kind) {
    case Region::Kind::Interval:
    case Region::Kind::Box: {
        if (region.extent.size() != sigma.size())
            throw InvalidInput("region/sigma dimension mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            const double w = region.extent[i] / sigma[i];
            s += w * w;
        }
        return std::sqrt(s); // the farthest box corner
    }
    case Region::Kind::L2Ball: {
        if (region.extent.size() != 1) throw InvalidInput("l2 ball expects one extent");
        const double min_sigma = *std::min_element(sigma.begin(), sigma.end());
        return region.extent[0] / min_sigma;
    }
    default:
        throw InvalidInput("region kind has no weighted radius");
    }
}

Certificate certify_additive_protocol(const BaseClassifier& classifier, const PointCloud& cloud,
                                      const Region& requested, const std::vector<double>& sigma,
                                      std::int64_t n, double alpha, std::uint64_t seed,
                                      int threads) {
    if (!family_traits(requested.family).is_additive)
        throw InvalidInput(std::string("additive protocol requires an additive family, got ") +
                           family_traits(requested.family).name);
    const double required = region_weighted_radius(requested, sigma);
    const SmoothingSpec spec = SmoothingSpec::param_gaussian(requested.family, sigma);
    const auto counts = estimate_probs(classifier, cloud, spec, n, seed, threads);
    const ProbBound bound = certify_bound(counts, alpha, 1);

    Certificate cert;
    cert.protocol = "additive";
    cert.alpha = alpha;
    cert.n_samples = n;
    cert.seed = seed;
    cert.region = requested;
    cert.pa_lower = bound.pa_lower;
    if (bound.pa_lower <= 0.5) {
        cert.top_label = -1;
        cert.certified = false;
        cert.reason = "abstain: pa_lower <= 0.5";
        return cert;
    }
    cert.top_label = bound.top_label;
    const double radius = certify_additive(bound.pa_lower, bound.pb_upper);
    cert.margin = radius - required - kSpecialFnSlack;
    cert.certified = cert.margin > 0.0;
    if (!cert.certified) cert.reason = "requested region exceeds the certified radius";
    return cert;
}

Certificate certify_norm_ball_protocol(const BaseClassifier& classifier, const PointCloud& cloud,
                                       NormKind norm, double requested_radius, double sigma,
                                       std::int64_t n, double alpha, std::uint64_t seed,
                                       int threads) {
    if (!(requested_radius >= 0.0)) throw InvalidInput("norm ball: negative radius");
    const SmoothingSpec spec = SmoothingSpec::input_gaussian(sigma);
    const auto counts = estimate_probs(classifier, cloud, spec, n, seed, threads);
    const ProbBound bound = certify_bound(counts, alpha, 1);

    Certificate cert;
    cert.protocol = norm == NormKind::L2 ? "l2_ball" : "linf_ball";
    cert.alpha = alpha;
    cert.n_samples = n;
    cert.seed = seed;
    cert.region.family = TransformFamily::AdditiveNoise;
    cert.region.kind = Region::Kind::L2Ball;
    cert.region.extent = {requested_radius};
    cert.pa_lower = bound.pa_lower;
    if (bound.pa_lower <= 0.5) {
        cert.top_label = -1;
        cert.certified = false;
        cert.reason = "abstain: pa_lower <= 0.5";
        return cert;
    }
    cert.top_label = bound.top_label;
    const double radius = norm == NormKind::L2
                              ? certify_l2(bound.pa_lower, bound.pb_upper, sigma)
                              : certify_linf(bound.pa_lower, bound.pb_upper, sigma, cloud.size());
    cert.margin = radius - requested_radius - kSpecialFnSlack;
    cert.certified = cert.margin > 0.0;
    if (!cert.certified) cert.reason = "requested radius exceeds the certified radius";
    return cert;
}

} // namespace pointcert
