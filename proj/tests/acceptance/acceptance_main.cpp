// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. The CLI binary path is expected as argv[1] (used by the
// determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pointcert/attack.hpp"
#include "pointcert/certify.hpp"
#include "pointcert/classifier.hpp"
#include "pointcert/runner.hpp"
#include "pointcert/specialfn.hpp"
#include "test_support.hpp"

using namespace pointcert;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;

int g_failures = 0;

bool criterion(int index, const std::string& name, const std::function<std::string()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    if (!detail.empty() && detail.rfind("FAIL", 0) == 0) pass = false;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", index,
                name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
    return pass;
}

std::string fail(const std::string& why) { return "FAIL: " + why; }

// ---------------------------------------------------------------------------
// 1. Interpolation-bound soundness

// Nearest value index in a sorted-but-possibly-unevenly-spaced axis.
std::size_t nearest_index(const std::vector<double>& axis, double v) {
    std::size_t best = 0;
    double dist = std::fabs(v - axis[0]);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        const double d = std::fabs(v - axis[i]);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

std::vector<double> dense_axis(double range, double step) {
    std::vector<double> vals;
    for (double v = -range; v < range + step / 2; v += step) vals.push_back(std::min(v, range));
    vals.back() = range;
    return vals;
}

std::string run_criterion_1() {
    const int clouds = 100;
    const std::size_t n_points = 64;
    double worst_slack = std::numeric_limits<double>::infinity();

    for (int c = 0; c < clouds; ++c) {
        const PointCloud cloud = testsupport::random_ball_cloud(n_points, 1000 + c);
        const double norm = cloud.frobenius_norm();

        // z-taper, R = 0.5, M = 20; probes ten times finer than the grid.
        {
            const GridSpec grid{20, {0.5}};
            const double thr = sampled_threshold(TransformFamily::ZTaper, grid, n_points, norm);
            const auto params = certification_grid(TransformFamily::ZTaper, grid);
            const double spacing = 2.0 * 0.5 / 20.0; // grid step; probes are 10x finer
            for (int i = 0; i <= 200; ++i) {
                const double theta = -0.5 + i * spacing / 10.0;
                const long j = std::lround((theta + 0.5) / spacing);
                const auto& g = params[static_cast<std::size_t>(
                    std::clamp<long>(j, 0, static_cast<long>(params.size()) - 1))];
                const double err = interpolation_error(ZTaperParam{theta}, g, cloud);
                worst_slack = std::min(worst_slack, thr - err);
                if (err > thr + 1e-9)
                    return fail("z-taper bound violated: err=" + std::to_string(err) +
                                " thr=" + std::to_string(thr));
            }
        }

        // taper+rotation, (taper 0.2, rotation 0.35), M = 20.
        {
            const GridSpec grid{20, {0.2, 0.35}};
            const double thr =
                sampled_threshold(TransformFamily::TaperRotation, grid, n_points, norm);
            const auto taper_axis = dense_axis(0.2, 0.2 / 20.0 / 1.0);   // grid spacing 0.1 -> 0.01
            const auto rot_axis = dense_axis(0.35, 0.35 / 35.0 / 1.0);   // 0.01
            std::vector<double> g_taper, g_rot;
            for (double v = -0.2; v < 0.2 - 1e-12; v += 0.1) g_taper.push_back(v);
            g_taper.push_back(0.2);
            for (double v = -0.35; v < 0.35 - 1e-12; v += 0.1) g_rot.push_back(v);
            g_rot.push_back(0.35);
            for (double a : taper_axis) {
                const double ga = g_taper[nearest_index(g_taper, a)];
                for (double b : rot_axis) {
                    const double gb = g_rot[nearest_index(g_rot, b)];
                    const double err = interpolation_error(TransformParam{TaperRotationParam{a, b}},
                                                           TaperRotationParam{ga, gb}, cloud);
                    worst_slack = std::min(worst_slack, thr - err);
                    if (err > thr + 1e-9) return fail("taper+rotation bound violated");
                }
            }
        }

        // twist+taper+rotation, (twist 0.35, taper 0.2, rotation 0.35), M = 20.
        {
            const GridSpec grid{20, {0.35, 0.2, 0.35}};
            const double thr =
                sampled_threshold(TransformFamily::TwistTaperRotation, grid, n_points, norm);
            std::vector<double> g_twist, g_taper, g_rot;
            for (double v = -0.35; v < 0.35 - 1e-12; v += 0.1) g_twist.push_back(v);
            g_twist.push_back(0.35);
            for (double v = -0.2; v < 0.2 - 1e-12; v += 0.1) g_taper.push_back(v);
            g_taper.push_back(0.2);
            g_rot = g_twist;
            // Precompute grid-transformed clouds to keep the sweep affordable.
            std::vector<PointCloud> grid_clouds(g_twist.size() * g_taper.size() * g_rot.size());
            for (std::size_t i = 0; i < g_twist.size(); ++i)
                for (std::size_t j = 0; j < g_taper.size(); ++j)
                    for (std::size_t k = 0; k < g_rot.size(); ++k)
                        grid_clouds[(i * g_taper.size() + j) * g_rot.size() + k] = apply_transform(
                            TwistTaperRotationParam{g_twist[i], g_taper[j], g_rot[k]}, cloud);
            const auto twist_axis = dense_axis(0.35, 0.01);
            const auto taper_axis = dense_axis(0.2, 0.01);
            const auto rot_axis = dense_axis(0.35, 0.01);
            for (double a : twist_axis) {
                const std::size_t ia = nearest_index(g_twist, a);
                for (double b : taper_axis) {
                    const std::size_t jb = nearest_index(g_taper, b);
                    for (double cc : rot_axis) {
                        const std::size_t kc = nearest_index(g_rot, cc);
                        const PointCloud probe =
                            apply_transform(TwistTaperRotationParam{a, b, cc}, cloud);
                        const double err = cloud_distance(
                            probe, grid_clouds[(ia * g_taper.size() + jb) * g_rot.size() + kc]);
                        worst_slack = std::min(worst_slack, thr - err);
                        if (err > thr + 1e-9) return fail("twist+taper+rotation bound violated");
                    }
                }
            }
        }

        // general rotation, R = 10 degrees, M = 5; randomized dense probes
        // plus the angle extremes.
        {
            const double range = 10.0 * kDeg;
            const int m = 5;
            const GridSpec grid{m, {range}};
            const double thr =
                sampled_threshold(TransformFamily::GeneralRotation, grid, n_points, norm);
            const auto rots = sample_sphere_grid(m, range);
            // axes repeat in blocks of m angle samples
            std::vector<Vec3> axes;
            for (std::size_t i = 0; i < rots.size(); i += m) axes.push_back(rots[i].axis);
            const double eps = std::sqrt(2.0) / (2.0 * m) + 1e-12;
            const double delta = range / (2.0 * m) + 1e-12;
            Rng rng(4000 + c);
            for (int probe = 0; probe < 10000 / 10; ++probe) { // 1000 per cloud, 100 clouds
                Vec3 k{rng.gaussian(), rng.gaussian(), rng.gaussian()};
                k = k / k.norm();
                const double theta =
                    probe % 10 == 0 ? range : (probe % 10 == 1 ? 0.0 : rng.uniform(0.0, range));
                std::size_t best_axis = 0;
                double best_dot = -2.0;
                for (std::size_t i = 0; i < axes.size(); ++i) {
                    const double d = k.dot(axes[i]);
                    if (d > best_dot) {
                        best_dot = d;
                        best_axis = i;
                    }
                }
                if (axis_angle_between(k, axes[best_axis]) > eps)
                    return fail("rotation grid does not cover an axis probe");
                const double slot = std::clamp(
                    std::round(theta / (range / m) - 0.5), 0.0, static_cast<double>(m - 1));
                const GeneralRotationParam& g =
                    rots[best_axis * static_cast<std::size_t>(m) + static_cast<std::size_t>(slot)];
                if (std::fabs(theta - g.angle) > delta)
                    return fail("rotation grid does not cover an angle probe");
                const double err = interpolation_error(
                    TransformParam{GeneralRotationParam{k, theta}}, g, cloud);
                worst_slack = std::min(worst_slack, thr - err);
                if (err > thr + 1e-9) return fail("general-rotation bound violated");
            }
        }
    }
    std::ostringstream os;
    os << "worst remaining slack " << worst_slack;
    return os.str();
}

// ---------------------------------------------------------------------------
// 2. Certificate soundness under grid attack

struct SoundnessSetting {
    std::string name;
    TransformFamily family;
    Region region;
    std::vector<double> sigma; // parameter sigmas (additive) or {input sigma}
    std::int64_t n;
    int grid_m; // 0 = additive protocol
};

std::vector<SoundnessSetting> soundness_settings() {
    return {
        {"z_rotation +-180deg",
         TransformFamily::ZRotation,
         {TransformFamily::ZRotation, Region::Kind::Interval, {kPi}},
         {1.6},
         1000,
         0},
        {"z_twist +-20deg",
         TransformFamily::ZTwist,
         {TransformFamily::ZTwist, Region::Kind::Interval, {20.0 * kDeg}},
         {0.5},
         1000,
         0},
        {"z_shear 0.1",
         TransformFamily::ZShear,
         {TransformFamily::ZShear, Region::Kind::L2Ball, {0.1}},
         {0.25, 0.25},
         500,
         0},
        {"twist_rotation 20deg,5deg",
         TransformFamily::TwistRotation,
         {TransformFamily::TwistRotation, Region::Kind::Box, {20.0 * kDeg, 5.0 * kDeg}},
         {0.5, 0.2},
         500,
         0},
        {"z_taper 0.2",
         TransformFamily::ZTaper,
         {TransformFamily::ZTaper, Region::Kind::Interval, {0.2}},
         {0.12},
         2000,
         10},
    };
}

AnalyticOracle oracle_for(TransformFamily family) {
    switch (family) {
    case TransformFamily::ZRotation:
    case TransformFamily::ZShear:
    case TransformFamily::ZTaper:
        // statistic mean-z: invariant under the family, sensitive to noise
        return AnalyticOracle({0, 0, 1}, 0.05, 20.0);
    case TransformFamily::ZTwist:
    case TransformFamily::TwistRotation:
        return AnalyticOracle({0.35, 0.0, 0.9367496997597597}, 0.02, 25.0);
    default: return AnalyticOracle({0, 0, 1}, 0.0, 10.0);
    }
}

SmoothingSpec smoothing_for_setting(const SoundnessSetting& s) {
    if (s.grid_m > 0) return SmoothingSpec::input_gaussian(s.sigma[0]);
    return SmoothingSpec::param_gaussian(s.family, s.sigma);
}

std::string run_criterion_2() {
    const auto settings = soundness_settings();
    const int reps = 20;
    int runs = 0, issued = 0, violations = 0;

    // classifier 0: analytic oracle; classifier 1: trained tiny point net
    const Dataset corpus =
        make_synthetic_dataset({ShapeKind::Sphere, ShapeKind::Cube}, 25, 64, 0.02, 555);
    std::vector<TinyPointNet> nets;
    for (const auto& s : settings) {
        const SmoothingSpec aug = smoothing_for_setting(s);
        // the input-noise-augmented task converges slower than the
        // parameter-noise ones
        const int epochs = s.grid_m > 0 ? 100 : 60;
        nets.push_back(train_augmented(corpus, aug, epochs, 0.02, 99, {16, 32, 16}, 16));
    }

    for (int kind = 0; kind < 2; ++kind) {
        for (std::size_t si = 0; si < settings.size(); ++si) {
            const auto& s = settings[si];
            const AnalyticOracle oracle = oracle_for(s.family);
            for (int rep = 0; rep < reps; ++rep) {
                ++runs;
                const std::uint64_t seed = mix_seed(777, 10000 * kind + 100 * si +
                                                             static_cast<std::uint64_t>(rep));
                const PointCloud* cloud = nullptr;
                PointCloud oracle_cloud;
                const BaseClassifier* classifier = nullptr;
                if (kind == 0) {
                    oracle_cloud = testsupport::shifted_ball_cloud(
                        64, 0.30, 9000 + 100 * si + static_cast<std::uint64_t>(rep));
                    cloud = &oracle_cloud;
                    classifier = &oracle;
                } else {
                    cloud = &corpus.items[(static_cast<std::size_t>(rep) * 7 + si) %
                                          corpus.items.size()]
                                 .cloud;
                    classifier = &nets[si];
                }

                Certificate cert;
                if (s.grid_m > 0) {
                    SampledOptions opt;
                    opt.threads = 2;
                    cert = certify_sampled(*classifier, *cloud, s.family,
                                           GridSpec{s.grid_m, s.region.extent}, s.sigma[0], s.n,
                                           0.001, seed, opt);
                } else {
                    cert = certify_additive_protocol(*classifier, *cloud, s.region, s.sigma, s.n,
                                                     0.001, seed, 2);
                }
                if (!cert.certified) continue;
                ++issued;
                const SmoothingSpec spec = smoothing_for_setting(s);
                const AttackReport report =
                    grid_attack(*classifier, *cloud, s.region, 50, spec, s.n, seed, 2);
                if (report.found) {
                    ++violations;
                    std::fprintf(stderr, "  violation: %s kind=%d rep=%d\n", s.name.c_str(), kind,
                                 rep);
                }
            }
        }
    }

    std::ostringstream os;
    os << "runs=" << runs << " issued=" << issued << " violations=" << violations;
    if (runs != 200) return fail("expected 200 runs, got " + std::to_string(runs));
    if (issued < runs / 2) return fail("too few certificates issued to be meaningful: " + os.str());
    if (violations * 200 > runs) return fail("violation rate above 0.5%: " + os.str());
    return os.str();
}

// ---------------------------------------------------------------------------
// 3. Monte-Carlo vs quadrature for the smoothed oracle

std::string run_criterion_3() {
    // The hard oracle's smoothed top-class probability has an exact closed
    // form (Gaussian measure of the statistic crossing set); the quadrature
    // helper resolves the same smoothed expectation for soft oracles and is
    // checked against it in the unit suite. Twenty configurations, two
    // sample sizes each.
    int checked = 0;
    for (int k = 0; k < 20; ++k) {
        Rng rng(6000 + static_cast<std::uint64_t>(k));
        PointCloud cloud = testsupport::random_ball_cloud(48, 6100 + static_cast<std::uint64_t>(k));
        const Vec3 c0 = cloud.centroid();
        const Vec3 shift{rng.uniform(0.1, 0.3), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
        for (auto& p : cloud.points) p = p - c0 + shift;
        Vec3 d{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        d = d / d.norm();
        const double sigma = rng.uniform(0.3, 2.5);
        const Vec3 c = cloud.centroid();
        const double amp = std::hypot(d.x * c.x + d.y * c.y, d.y * c.x - d.x * c.y);
        const double t = d.z * c.z + rng.uniform(-0.8, 0.8) * amp;
        const AnalyticOracle oracle(d, t, std::numeric_limits<double>::infinity());
        const double truth = testsupport::smoothed_argmax_prob_zrotation(oracle, cloud, sigma);
        if (!(truth > 0.01 && truth < 0.99)) return fail("degenerate configuration " + std::to_string(k));
        const SmoothingSpec spec =
            SmoothingSpec::param_gaussian(TransformFamily::ZRotation, {sigma});
        for (std::int64_t n : {1000ll, 10000ll}) {
            const auto counts =
                estimate_probs(oracle, cloud, spec, n, 6200 + static_cast<std::uint64_t>(k), 2);
            const double p_hat = static_cast<double>(counts[1]) / static_cast<double>(n);
            const double sd = std::sqrt(truth * (1.0 - truth) / static_cast<double>(n));
            if (std::fabs(p_hat - truth) > 3.0 * sd) {
                std::ostringstream os;
                os << "config " << k << ": |" << p_hat << " - " << truth << "| > 3sd (n=" << n
                   << ")";
                return fail(os.str());
            }
            ++checked;
        }
    }
    return "checked " + std::to_string(checked) + " (config, n) pairs";
}

// ---------------------------------------------------------------------------
// 4. Closed-form spot checks

std::string run_criterion_4() {
    const double weighted = certify_additive(0.99, 0.01);
    if (std::fabs(0.5 * weighted - 1.163174) > 1e-4)
        return fail("additive radius at (0.99, 0.01), sigma 0.5");
    if (std::fabs(clopper_pearson_lower(1000, 1000, 0.001) - 0.993116) > 1e-6)
        return fail("clopper_pearson_lower(1000, 1000, 0.001)");
    if (sampled_threshold(TransformFamily::ZTaper, {100, {0.5}}, 64, 0.0) != 0.02)
        return fail("z-taper threshold R=0.5 M=100 N=64 not exactly 0.02");
    const double m = 0.2 * (phi_inv(0.9) - phi_inv(0.1));
    if (std::fabs(m / (2.0 + m) - 0.204018) > 1e-5)
        return fail("linear-radius envelope at p-tilde 0.9, sigma 0.2");
    for (const auto [pa, pb, sigma, n] :
         {std::tuple{0.9, 0.1, 0.5, std::size_t{64}}, std::tuple{0.99, 0.01, 1.0, std::size_t{16}},
          std::tuple{0.7, 0.3, 0.25, std::size_t{256}}}) {
        if (certify_linf(pa, pb, sigma, n) !=
            certify_l2(pa, pb, sigma) / std::sqrt(3.0 * static_cast<double>(n)))
            return fail("linf radius is not exactly l2 / sqrt(3N)");
    }
    return "all spot values match";
}

// ---------------------------------------------------------------------------
// 5. Scaled-Gaussian level sets vs the chi-square closed form

std::string run_criterion_5() {
    const std::int64_t samples = 1000000;
    for (double k : {0.5, 0.8, 1.25, 2.0}) {
        for (double pa : {0.6, 0.9, 0.99}) {
            double t_star, bound;
            const bool upper = k >= 1.0;
            if (upper) {
                t_star = chi2_inv(pa, 3);
                bound = chi2_cdf(t_star / (k * k), 3);
            } else {
                t_star = chi2_inv(1.0 - pa, 3);
                bound = 1.0 - chi2_cdf(t_star / (k * k), 3);
            }
            Rng rng(static_cast<std::uint64_t>(k * 1000 + pa * 100));
            std::int64_t hits = 0;
            for (std::int64_t i = 0; i < samples; ++i) {
                const double a = k * rng.gaussian();
                const double b = k * rng.gaussian();
                const double c = k * rng.gaussian();
                const double q = a * a + b * b + c * c;
                if (upper ? (q <= t_star) : (q >= t_star)) ++hits;
            }
            const double emp = static_cast<double>(hits) / static_cast<double>(samples);
            const double sd =
                std::sqrt(bound * (1.0 - bound) / static_cast<double>(samples));
            if (std::fabs(emp - bound) > 3.0 * sd) {
                std::ostringstream os;
                os << "k=" << k << " pa=" << pa << " |" << emp << " - " << bound << "| > 3sd";
                return fail(os.str());
            }
        }
    }
    return "12 level-set probabilities within 3 Monte-Carlo sigmas";
}

// ---------------------------------------------------------------------------
// 6. Rotation algebra

std::string run_criterion_6() {
    Rng rng(112233);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const auto draw = [&rng] {
            Vec3 axis{rng.gaussian(), rng.gaussian(), rng.gaussian()};
            axis = axis / axis.norm();
            return GeneralRotationParam{axis, rng.uniform(0.0, kPi)};
        };
        const GeneralRotationParam a = draw(), b = draw();
        const GeneralRotationParam c = compose_rotations(a, b);
        worst = std::max(worst, frobenius_distance(rotation_matrix(c),
                                                   rotation_matrix(b) * rotation_matrix(a)));
    }
    if (worst >= 1e-9) return fail("compose_rotations worst Frobenius error " + std::to_string(worst));

    for (double phi : {0.1, 0.5, 1.0, kPi / 2.0}) {
        const double limit = zyx_to_general(phi);
        for (int i = 0; i < 100000; ++i) {
            const double a = rng.uniform(-phi, phi);
            const double b = rng.uniform(-phi, phi);
            const double c = rng.uniform(-phi, phi);
            if (rotation_angle_of_zyx(a, b, c) > limit + 1e-9)
                return fail("ZYX containment violated at phi=" + std::to_string(phi));
        }
    }
    std::ostringstream os;
    os << "compose worst error " << worst << ", containment held for 4x1e5 triples";
    return os.str();
}

// ---------------------------------------------------------------------------
// 7. Sphere-grid coverage

std::string run_criterion_7() {
    const int m = 5;
    const double range = 0.2;
    const auto grid = sample_sphere_grid(m, range);
    const double eps = std::sqrt(2.0) / 10.0 + 1e-12;
    const double delta = 0.02 + 1e-12;
    Rng rng(31337);
    for (int probe = 0; probe < 10000; ++probe) {
        Vec3 k{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        k = k / k.norm();
        const double theta = probe == 0 ? range : rng.uniform(0.0, range);
        bool covered = false;
        for (const auto& g : grid) {
            if (std::fabs(theta - g.angle) > delta) continue;
            if (axis_angle_between(k, g.axis) <= eps) {
                covered = true;
                break;
            }
        }
        if (!covered) return fail("probe " + std::to_string(probe) + " uncovered");
    }
    return "10^4 probes covered at eps=sqrt(2)/10, delta=0.02 (grid size " +
           std::to_string(grid.size()) + ")";
}

// ---------------------------------------------------------------------------
// 8. Training gate

std::string run_criterion_8() {
    const auto start = std::chrono::steady_clock::now();
    const Dataset corpus =
        make_synthetic_dataset({ShapeKind::Sphere, ShapeKind::Cube}, 100, 64, 0.02, 4242);
    const SmoothingSpec aug = SmoothingSpec::param_gaussian(TransformFamily::ZRotation, {kPi});
    const TinyPointNet net = train_augmented(corpus, aug, 30, 0.05, 7, {}, 16);
    const double accuracy = dataset_accuracy(net, corpus);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= 60.0) return fail("training took " + std::to_string(secs) + "s");
    if (accuracy < 0.95) return fail("train accuracy " + std::to_string(accuracy));

    // gradient check: analytic backprop vs central differences
    const TinyPointNet toy(2, {6, 8, 6}, 12345);
    const PointCloud c1 = testsupport::random_ball_cloud(5, 1);
    const PointCloud c2 = testsupport::random_ball_cloud(5, 2);
    const std::vector<const PointCloud*> clouds{&c1, &c2};
    const std::vector<int> labels{0, 1};
    const auto grad = toy.batch_gradient(clouds, labels);
    auto weights = toy.flat_weights();
    TinyPointNet probe = toy;
    const double step = 1e-4;
    double rel = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double keep = weights[i];
        weights[i] = keep + step;
        probe.set_flat_weights(weights);
        const double up = probe.batch_loss(clouds, labels);
        weights[i] = keep - step;
        probe.set_flat_weights(weights);
        const double down = probe.batch_loss(clouds, labels);
        weights[i] = keep;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::fabs(numeric), std::fabs(grad[i]), 1e-6});
        rel = std::max(rel, std::fabs(numeric - grad[i]) / denom);
    }
    if (rel > 1e-3) return fail("gradient check relative error " + std::to_string(rel));
    std::ostringstream os;
    os << "accuracy " << accuracy << " in " << secs << "s, gradient rel err " << rel;
    return os.str();
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string g_cli_path;

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + g_cli_path + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string run_criterion_9() {
    if (g_cli_path.empty()) return fail("CLI path missing (pass it as argv[1])");
    const fs::path dir = fs::temp_directory_path() / "pointcert_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();

    // gen-data twice
    if (run_cli("--command gen-data --classes sphere,cube --per-class 3 --n-points 32 "
                "--noise-sd 0.02 --seed 5 --out " + d + "/a") != 0)
        return fail("gen-data run failed");
    if (run_cli("--command gen-data --classes sphere,cube --per-class 3 --n-points 32 "
                "--noise-sd 0.02 --seed 5 --out " + d + "/b") != 0)
        return fail("gen-data rerun failed");
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        if (slurp(entry.path()) != slurp(dir / "b" / name))
            return fail("gen-data output differs: " + name.string());
    }

    const std::string manifest = d + "/a/manifest.json";

    // train twice (both classifier kinds)
    if (run_cli("--command train --classifier centroid --dataset " + manifest + " --weights " +
                d + "/c1.json") != 0)
        return fail("centroid train failed");
    run_cli("--command train --classifier centroid --dataset " + manifest + " --weights " + d +
            "/c2.json");
    if (slurp(d + "/c1.json") != slurp(d + "/c2.json")) return fail("centroid weights differ");

    const std::string tiny_args = "--command train --classifier tiny --dataset " + manifest +
                                  " --family z_rotation --sigma 3.14 --epochs 3 --lr 0.05 "
                                  "--hidden1 8 --hidden2 8 --hidden3 8 --seed 9 --weights ";
    if (run_cli(tiny_args + d + "/t1.json") != 0) return fail("tiny train failed");
    run_cli(tiny_args + d + "/t2.json");
    if (slurp(d + "/t1.json") != slurp(d + "/t2.json")) return fail("tiny weights differ");

    // certify twice, plus a different thread count
    const std::string certify_args = "--command certify --dataset " + manifest +
                                     " --classifier centroid --weights " + d +
                                     "/c1.json --family z_twist --radius 20deg --sigma 0.5 "
                                     "--samples 200 --alpha 0.001 --seed 11 --out ";
    if (run_cli(certify_args + d + "/r1.json") != 0) return fail("certify failed");
    run_cli(certify_args + d + "/r2.json");
    run_cli(certify_args + d + "/r3.json --threads 2");
    const std::string r1 = slurp(d + "/r1.json");
    if (r1 != slurp(d + "/r2.json")) return fail("certify reports differ across reruns");
    {
        // thread count is part of the echoed config; reports must otherwise agree
        std::string r3 = slurp(d + "/r3.json");
        std::string r1n = r1, r3n = r3;
        const auto strip = [](std::string& s) {
            const auto pos = s.find("\"threads\":");
            if (pos != std::string::npos) s.erase(pos, s.find('\n', pos) - pos);
        };
        strip(r1n);
        strip(r3n);
        if (r1n != r3n) return fail("certify report depends on thread count");
    }

    // attack twice
    const std::string attack_args = "--command attack --dataset " + manifest +
                                    " --classifier centroid --weights " + d +
                                    "/c1.json --family z_rotation --radius 0.3 --sigma 0.5 "
                                    "--samples 100 --resolution 7 --seed 3 --out ";
    if (run_cli(attack_args + d + "/a1.json") != 0) return fail("attack failed");
    run_cli(attack_args + d + "/a2.json");
    if (slurp(d + "/a1.json") != slurp(d + "/a2.json")) return fail("attack reports differ");

    // eval twice (csv)
    const std::string eval_args = "--command eval --dataset " + manifest +
                                  " --classifier centroid --weights " + d +
                                  "/c1.json --format csv --out ";
    if (run_cli(eval_args + d + "/e1.csv") != 0) return fail("eval failed");
    run_cli(eval_args + d + "/e2.csv");
    if (slurp(d + "/e1.csv") != slurp(d + "/e2.csv")) return fail("eval reports differ");

    return "gen-data, train, certify, attack, eval reproduce byte-identically";
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    criterion(1, "interpolation-bound soundness", run_criterion_1);
    criterion(2, "certificate soundness under grid attack", run_criterion_2);
    criterion(3, "Monte-Carlo matches the quadrature oracle", run_criterion_3);
    criterion(4, "closed-form spot checks", run_criterion_4);
    criterion(5, "chi-square level-set validation", run_criterion_5);
    criterion(6, "rotation algebra", run_criterion_6);
    criterion(7, "sphere-grid coverage", run_criterion_7);
    criterion(8, "training gate", run_criterion_8);
    criterion(9, "CLI determinism", run_criterion_9);

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
