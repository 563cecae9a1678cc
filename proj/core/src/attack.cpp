#include "pointcert/attack.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"

namespace pointcert {

namespace {

std::vector<double> axis_lattice(double radius, int resolution) {
    if (radius < 0.0) throw InvalidInput("attack region with negative extent");
    if (radius == 0.0 || resolution == 1) return {0.0};
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(resolution));
    const double step = 2.0 * radius / static_cast<double>(resolution - 1);
    for (int i = 0; i < resolution; ++i) vals.push_back(-radius + step * i);
    return vals;
}

// All probe parameters of the region lattice, in lexicographic axis order.
std::vector<TransformParam> lattice_probes(const Region& region, int resolution,
                                           std::int64_t max_probes) {
    std::vector<TransformParam> probes;
    if (region.kind == Region::Kind::RotationBall) {
        const auto rots = sample_sphere_grid(resolution, region.extent.at(0));
        if (static_cast<std::int64_t>(rots.size()) > max_probes)
            throw ResourceError("rotation probe set of " + std::to_string(rots.size()) +
                                " points exceeds the budget of " + std::to_string(max_probes));
        for (const auto& r : rots) probes.push_back(r);
        return probes;
    }

    const int dim = region.lattice_dim();
    if (dim < 1)
        throw InvalidInput("grid attack is undefined for this region; use random_attack");
    std::vector<std::vector<double>> axes;
    if (region.kind == Region::Kind::Interval || region.kind == Region::Kind::Box) {
        if (static_cast<int>(region.extent.size()) != dim)
            throw InvalidInput("region extent does not match its dimension");
        for (double r : region.extent) axes.push_back(axis_lattice(r, resolution));
    } else { // L2Ball / FrobeniusBall: lattice over the bounding box
        const double r = region.extent.at(0);
        axes.assign(static_cast<std::size_t>(dim), axis_lattice(r, resolution));
    }

    double count = 1.0;
    for (const auto& a : axes) count *= static_cast<double>(a.size());
    if (count > static_cast<double>(max_probes))
        throw ResourceError("attack lattice of " + std::to_string(static_cast<std::int64_t>(count)) +
                            " points exceeds the budget of " + std::to_string(max_probes));

    const bool ball =
        region.kind == Region::Kind::L2Ball || region.kind == Region::Kind::FrobeniusBall;
    const double r2 = ball ? region.extent.at(0) * region.extent.at(0) : 0.0;
    std::vector<std::size_t> idx(axes.size(), 0);
    std::vector<double> coords(axes.size(), 0.0);
    for (;;) {
        for (std::size_t d = 0; d < axes.size(); ++d) coords[d] = axes[d][idx[d]];
        bool keep = true;
        if (ball) {
            double s = 0.0;
            for (double c : coords) s += c * c;
            keep = s <= r2 * (1.0 + 1e-12) + 1e-15;
        }
        if (keep) probes.push_back(make_param(region.family, coords));
        // odometer increment, last axis fastest
        std::size_t d = axes.size();
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
            if (d == 0) return probes;
        }
    }
}

AttackReport run_probes(const BaseClassifier& classifier, const PointCloud& cloud,
                        const Region& region, const std::vector<TransformParam>& probes,
                        const SmoothingSpec& spec, std::int64_t n, std::uint64_t seed,
                        int threads) {
    AttackReport report;
    report.region = region;
    report.n_samples = n;
    report.seed = seed;
    report.clean_label = smoothed_label(classifier, cloud, spec, n, seed, threads);

    // Blocks keep the first-flip short circuit while letting probes run in
    // parallel; the reported flip is always the lattice-minimal one.
    const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(threads) * 16);
    std::vector<int> labels(probes.size(), -1);
    for (std::size_t start = 0; start < probes.size(); start += block) {
        const std::size_t stop = std::min(probes.size(), start + block);
        parallel_for(static_cast<std::int64_t>(stop - start), threads, [&](std::int64_t k) {
            const std::size_t j = start + static_cast<std::size_t>(k);
            const PointCloud moved = apply_transform(probes[j], cloud);
            labels[j] = smoothed_label(classifier, moved, spec, n, seed, 1);
        });
        for (std::size_t j = start; j < stop; ++j) {
            if (labels[j] != report.clean_label) {
                report.found = probes[j];
                report.flipped_label = labels[j];
                report.probes = static_cast<std::int64_t>(j) + 1;
                return report;
            }
        }
    }
    report.probes = static_cast<std::int64_t>(probes.size());
    return report;
}

} // namespace

AttackReport grid_attack(const BaseClassifier& classifier, const PointCloud& cloud,
                         const Region& region, int resolution, const SmoothingSpec& spec,
                         std::int64_t n, std::uint64_t seed, int threads,
                         std::int64_t max_probes) {
    if (resolution < 1) throw InvalidInput("grid_attack: resolution must be >= 1");
    const auto probes = lattice_probes(region, resolution, max_probes);
    return run_probes(classifier, cloud, region, probes, spec, n, seed, threads);
}

namespace {

TransformParam random_probe(const Region& region, std::size_t cloud_points, Rng& rng) {
    switch (region.kind) {
    case Region::Kind::Interval: {
        const double r = region.extent.at(0);
        return make_param(region.family, {rng.uniform(-r, r)});
    }
    case Region::Kind::Box: {
        std::vector<double> c;
        c.reserve(region.extent.size());
        for (double r : region.extent) c.push_back(rng.uniform(-r, r));
        return make_param(region.family, c);
    }
    case Region::Kind::L2Ball:
    case Region::Kind::FrobeniusBall: {
        const double r = region.extent.at(0);
        int dim = region.lattice_dim();
        if (dim < 1 && region.family == TransformFamily::AdditiveNoise)
            dim = static_cast<int>(3 * cloud_points);
        if (dim < 1) throw InvalidInput("random_attack: region has no sampling dimension");
        std::vector<double> g(static_cast<std::size_t>(dim));
        double norm2 = 0.0;
        for (double& v : g) {
            v = rng.gaussian();
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        const double scale =
            norm > 0.0 ? r * std::pow(rng.uniform(), 1.0 / dim) / norm : 0.0;
        for (double& v : g) v *= scale;
        if (region.family == TransformFamily::AdditiveNoise) {
            AdditiveNoiseParam p;
            p.delta.resize(cloud_points);
            for (std::size_t i = 0; i < cloud_points; ++i)
                p.delta[i] = {g[3 * i], g[3 * i + 1], g[3 * i + 2]};
            return p;
        }
        return make_param(region.family, g);
    }
    case Region::Kind::RotationBall: {
        Vec3 axis;
        double norm = 0.0;
        do {
            axis = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
            norm = axis.norm();
        } while (norm < 1e-12);
        return GeneralRotationParam{axis / norm, rng.uniform(0.0, region.extent.at(0))};
    }
    }
    throw InvalidInput("random_attack: unknown region kind");
}

} // namespace

AttackReport random_attack(const BaseClassifier& classifier, const PointCloud& cloud,
                           const Region& region, std::int64_t n_probes,
                           const SmoothingSpec& spec, std::int64_t n, std::uint64_t seed,
                           int threads) {
    if (n_probes < 1) throw InvalidInput("random_attack: n_probes must be >= 1");
    std::vector<TransformParam> probes;
    probes.reserve(static_cast<std::size_t>(n_probes));
    for (std::int64_t i = 0; i < n_probes; ++i) {
        Rng rng(mix_seed(mix64(seed) ^ 0x70726f6265ULL, static_cast<std::uint64_t>(i)));
        probes.push_back(random_probe(region, cloud.size(), rng));
    }
    return run_probes(classifier, cloud, region, probes, spec, n, seed, threads);
}

bool region_contains(const Region& region, const TransformParam& param, double tol) {
    if (family_of(param) != region.family) return false;
    switch (region.kind) {
    case Region::Kind::Interval:
    case Region::Kind::Box: {
        const auto c = param_components(param);
        if (c.size() != region.extent.size()) return false;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (std::fabs(c[i]) > region.extent[i] + tol) return false;
        return true;
    }
    case Region::Kind::L2Ball:
    case Region::Kind::FrobeniusBall: {
        double s = 0.0;
        if (region.family == TransformFamily::AdditiveNoise) {
            const auto& p = std::get<AdditiveNoiseParam>(param);
            for (const Vec3& d : p.delta) s += d.squared_norm();
        } else {
            for (double v : param_components(param)) s += v * v;
        }
        return std::sqrt(s) <= region.extent.at(0) + tol;
    }
    case Region::Kind::RotationBall: {
        const auto& p = std::get<GeneralRotationParam>(param);
        return p.angle >= -tol && p.angle <= region.extent.at(0) + tol;
    }
    }
    return false;
}

} // namespace pointcert
