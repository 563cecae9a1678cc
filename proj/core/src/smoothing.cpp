#include "pointcert/smoothing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "pointcert/classifier.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"
#include "pointcert/specialfn.hpp"

namespace pointcert {

SmoothingSpec SmoothingSpec::param_gaussian(TransformFamily family, std::vector<double> sigma) {
    SmoothingSpec s;
    s.regime = SmoothingRegime::ParamGaussian;
    s.family = family;
    s.sigma = std::move(sigma);
    s.validate();
    return s;
}

SmoothingSpec SmoothingSpec::input_gaussian(double sigma) {
    SmoothingSpec s;
    s.regime = SmoothingRegime::InputGaussian;
    s.family = TransformFamily::AdditiveNoise;
    s.sigma = {sigma};
    s.validate();
    return s;
}

SmoothingSpec SmoothingSpec::linear_map_gaussian(double sigma) {
    SmoothingSpec s;
    s.regime = SmoothingRegime::LinearMapGaussian;
    s.family = TransformFamily::Linear;
    s.sigma = {sigma};
    s.validate();
    return s;
}

void SmoothingSpec::validate() const {
    if (sigma.empty()) throw InvalidInput("smoothing spec without sigma");
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s))
            throw InvalidInput("smoothing sigma entries must be positive and finite");
    if (regime == SmoothingRegime::ParamGaussian) {
        const int dim = family_traits(family).param_dim;
        if (dim <= 0)
            throw InvalidInput(std::string("parameter smoothing is undefined for family ") +
                               family_traits(family).name);
        if (static_cast<int>(sigma.size()) != dim)
            throw InvalidInput("sigma dimension does not match the family parameter dimension");
    } else {
        if (sigma.size() != 1)
            throw InvalidInput("input/linear-map smoothing uses a single sigma");
    }
}

TransformParam sample_smoothing_param(const SmoothingSpec& spec, std::size_t n_points, Rng& rng) {
    switch (spec.regime) {
    case SmoothingRegime::ParamGaussian: {
        std::vector<double> c(spec.sigma.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = spec.sigma[i] * rng.gaussian();
        return make_param(spec.family, c);
    }
    case SmoothingRegime::InputGaussian: {
        AdditiveNoiseParam p;
        p.delta.resize(n_points);
        const double s = spec.sigma[0];
        for (Vec3& d : p.delta) d = {s * rng.gaussian(), s * rng.gaussian(), s * rng.gaussian()};
        return p;
    }
    case SmoothingRegime::LinearMapGaussian: {
        LinearParam p;
        const double s = spec.sigma[0];
        for (double& v : p.a.m) v = s * rng.gaussian();
        return p;
    }
    }
    throw InvalidInput("unknown smoothing regime");
}

int argmax_lowest(const std::vector<std::int64_t>& counts) {
    if (counts.empty()) throw InvalidInput("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i)
        if (counts[i] > counts[best]) best = i;
    return static_cast<int>(best);
}

int argmax_lowest(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInput("argmax of empty vector");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return static_cast<int>(best);
}

std::vector<std::int64_t> estimate_probs(const BaseClassifier& classifier,
                                         const PointCloud& cloud, const SmoothingSpec& spec,
                                         std::int64_t n, std::uint64_t seed, int threads) {
    if (n < 1) throw InvalidInput("estimate_probs: n must be >= 1");
    spec.validate();
    const int c = classifier.num_classes();

    // Atomic per-class counters keep the reduction order-independent; sample
    // i always draws from stream mix_seed(seed, i).
    std::vector<std::atomic<std::int64_t>> tally(static_cast<std::size_t>(c));
    for (auto& t : tally) t.store(0, std::memory_order_relaxed);
    parallel_for(n, threads, [&](std::int64_t i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const TransformParam param = sample_smoothing_param(spec, cloud.size(), rng);
        const int y = argmax_lowest(classifier.evaluate(apply_transform(param, cloud)));
        tally[static_cast<std::size_t>(y)].fetch_add(1, std::memory_order_relaxed);
    });

    std::vector<std::int64_t> counts(static_cast<std::size_t>(c), 0);
    for (std::size_t k = 0; k < counts.size(); ++k)
        counts[k] = tally[k].load(std::memory_order_relaxed);
    return counts;
}

ProbBound certify_bound(const std::vector<std::int64_t>& counts, double alpha, int m_splits) {
    if (counts.empty()) throw InvalidInput("certify_bound: empty counts");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("certify_bound: alpha in (0, 1)");
    if (m_splits < 1) throw InvalidInput("certify_bound: m_splits must be >= 1");
    std::int64_t n = 0;
    for (std::int64_t v : counts) {
        if (v < 0) throw InvalidInput("certify_bound: negative count");
        n += v;
    }
    if (n < 1) throw InvalidInput("certify_bound: no samples");
    ProbBound b;
    b.top_label = argmax_lowest(counts);
    b.n_samples = n;
    b.alpha_used = alpha / static_cast<double>(m_splits);
    b.pa_lower = clopper_pearson_lower(counts[static_cast<std::size_t>(b.top_label)], n, b.alpha_used);
    b.pb_upper = 1.0 - b.pa_lower;
    return b;
}

int smoothed_label(const BaseClassifier& classifier, const PointCloud& cloud,
                   const SmoothingSpec& spec, std::int64_t n, std::uint64_t seed, int threads) {
    return argmax_lowest(estimate_probs(classifier, cloud, spec, n, seed, threads));
}

} // namespace pointcert
