#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pointcert/classifier.hpp"
#include "pointcert/smoothing.hpp"
#include "pointcert/transforms.hpp"

namespace pointcert {

/// Parameter region a certificate talks about.
struct Region {
    enum class Kind {
        Interval,      // [-extent[0], extent[0]] for one scalar parameter
        Box,           // per-axis symmetric half-ranges extent[i]
        L2Ball,        // ||alpha||_2 <= extent[0]
        FrobeniusBall, // ||A||_F <= extent[0]
        RotationBall,  // axis in S^2, angle in [0, extent[0]]
    };
    TransformFamily family = TransformFamily::ZRotation;
    Kind kind = Kind::Interval;
    std::vector<double> extent;

    int lattice_dim() const;
};

const char* region_kind_name(Region::Kind kind);
Region::Kind region_kind_from_name(const std::string& name);

/// Outcome of one certification attempt for one input.
struct Certificate {
    std::string input_id;
    int top_label = -1;
    bool certified = false;
    Region region;
    double margin = 0.0; // left minus right side of the governing inequality
    double pa_lower = 0.0;
    double alpha = 0.0; // total failure probability (confidence = 1 - alpha)
    std::string protocol;
    int grid_m = 0;
    std::int64_t grid_points = 0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string reason; // why certification was refused, when it was
};

/// Grid resolution and per-parameter symmetric ranges for the sampled
/// protocols.
struct GridSpec {
    int resolution = 10; // M
    std::vector<double> ranges;
};

/// Weighted-l2 certified radius for additive transformations:
/// (phi_inv(pa) - phi_inv(pb)) / 2, in units of sigma. The certified region
/// is { alpha : sum_i (alpha_i / sigma_i)^2 <= radius^2 }. Zero when
/// pa <= pb.
double certify_additive(double pa_lower, double pb_upper);

/// Bound used for the general-rotation threshold.
enum class RotationBound {
    Standard, // arccos(1 - x) <= (pi/2) sqrt(x)
    Tight,    // arccos(1 - x) <= sqrt(2x) + (pi/2 - sqrt(2)) x^(3/2)
};

/// Right-hand side of the per-grid-point certification condition for the
/// sampled protocols. `cloud_norm` is only used for general rotation.
double sampled_threshold(TransformFamily family, const GridSpec& grid, std::size_t n_points,
                         double cloud_norm, RotationBound bound = RotationBound::Standard);

/// Grid parameters enumerated by the sampled protocols. Throws ResourceError
/// when the grid would exceed `max_points`.
std::vector<TransformParam> certification_grid(TransformFamily family, const GridSpec& grid,
                                               std::int64_t max_points = 1000000);

struct SampledOptions {
    std::int64_t max_grid_points = 1000000;
    RotationBound rotation_bound = RotationBound::Standard;
    int threads = 1;
};

/// Sampled certification (z-taper, general rotation, taper + rotation,
/// twist + taper + rotation): estimates the smoothed class probability at
/// every grid parameter under input Gaussian noise at per-point confidence
/// alpha / grid_points and certifies the grid ranges when the minimum margin
/// clears the interpolation-error threshold.
Certificate certify_sampled(const BaseClassifier& classifier, const PointCloud& cloud,
                            TransformFamily family, const GridSpec& grid, double sigma,
                            std::int64_t n_per_point, double alpha, std::uint64_t seed,
                            const SampledOptions& options = {});

/// Lower bound on the smoothed top-class probability after a linear attack
/// of Frobenius radius `frob_radius`, given probability `pa` under the
/// unattacked linear-map smoothing. Valid for pa in (0.5, 1) and
/// 0 < frob_radius < 1; returns 0 outside the radius validity range.
double p_tilde_lower(double pa, double frob_radius, int arc_samples = 64);

/// Largest Frobenius radius certified at smoothed probability `pa` with
/// linear-map smoothing scale `sigma` (bisection, 60 iterations).
double linear_certified_radius(double pa, double sigma);

/// Linear-transformation protocol: smooth with i.i.d. Gaussian 3x3
/// perturbations, bound pa, then certify { A : ||A||_F <= requested_radius }.
Certificate certify_linear(const BaseClassifier& classifier, const PointCloud& cloud,
                           double sigma, std::int64_t n, double alpha, std::uint64_t seed,
                           double requested_radius, int threads = 1);

/// Certified l2 radius for additive coordinate noise.
double certify_l2(double pa_lower, double pb_upper, double sigma);

/// Certified l-infinity radius: the l2 radius divided by sqrt(3N).
double certify_linf(double pa_lower, double pb_upper, double sigma, std::size_t n_points);

/// Euler-box containment: rotations with all three ZYX angles in
/// [-euler_range, euler_range] are contained in the general rotations with
/// angle up to 2 * euler_range. Requires euler_range in [0, pi/2].
double zyx_to_general(double euler_range);

/// Additive protocol for a requested region (Interval, Box or L2Ball):
/// smooth in parameter space, bound pa, compare the region's weighted radius
/// against the certified radius.
Certificate certify_additive_protocol(const BaseClassifier& classifier, const PointCloud& cloud,
                                      const Region& requested, const std::vector<double>& sigma,
                                      std::int64_t n, double alpha, std::uint64_t seed,
                                      int threads = 1);

enum class NormKind { L2, Linf };

/// Norm-ball protocol under input Gaussian smoothing.
Certificate certify_norm_ball_protocol(const BaseClassifier& classifier, const PointCloud& cloud,
                                       NormKind norm, double requested_radius, double sigma,
                                       std::int64_t n, double alpha, std::uint64_t seed,
                                       int threads = 1);

/// Largest weighted-norm value the region reaches, in sigma units; this is
/// the left side the additive condition must dominate.
double region_weighted_radius(const Region& region, const std::vector<double>& sigma);

} // namespace pointcert
