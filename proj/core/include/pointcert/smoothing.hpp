#pragma once

#include <cstdint>
#include <vector>

#include "pointcert/rng.hpp"
#include "pointcert/transforms.hpp"

namespace pointcert {

class BaseClassifier;

/// Where the smoothing noise lives.
enum class SmoothingRegime {
    ParamGaussian,     // noise in the transformation parameter space
    InputGaussian,     // additive coordinate noise in R^(3N)
    LinearMapGaussian, // 3x3 perturbation with i.i.d. Gaussian entries
};

struct SmoothingSpec {
    SmoothingRegime regime = SmoothingRegime::InputGaussian;
    TransformFamily family = TransformFamily::ZRotation; // ParamGaussian only
    std::vector<double> sigma;                           // per-dimension std devs

    static SmoothingSpec param_gaussian(TransformFamily family, std::vector<double> sigma);
    static SmoothingSpec input_gaussian(double sigma);
    static SmoothingSpec linear_map_gaussian(double sigma);

    void validate() const;
};

/// Monte-Carlo class-probability lower bound. pb_upper is always
/// 1 - pa_lower.
struct ProbBound {
    double pa_lower = 0.0;
    double pb_upper = 1.0;
    int top_label = -1;
    std::int64_t n_samples = 0;
    double alpha_used = 0.0;
};

/// Draws one smoothing parameter. `n_points` sizes the noise array for the
/// InputGaussian regime and is ignored otherwise.
TransformParam sample_smoothing_param(const SmoothingSpec& spec, std::size_t n_points, Rng& rng);

/// Counts argmax predictions over n smoothing draws. Sample i uses the RNG
/// stream mix_seed(seed, i), so the counts are identical for any thread
/// count. Argmax ties break toward the lowest class index.
std::vector<std::int64_t> estimate_probs(const BaseClassifier& classifier,
                                         const PointCloud& cloud, const SmoothingSpec& spec,
                                         std::int64_t n, std::uint64_t seed, int threads = 1);

/// Clopper-Pearson lower bound on the top class at level 1 - alpha/m_splits.
ProbBound certify_bound(const std::vector<std::int64_t>& counts, double alpha, int m_splits);

/// Label of the smoothed classifier: argmax of estimate_probs counts.
int smoothed_label(const BaseClassifier& classifier, const PointCloud& cloud,
                   const SmoothingSpec& spec, std::int64_t n, std::uint64_t seed,
                   int threads = 1);

/// Index of the largest count; ties break toward the lowest index.
int argmax_lowest(const std::vector<std::int64_t>& counts);
int argmax_lowest(const std::vector<double>& values);

} // namespace pointcert
