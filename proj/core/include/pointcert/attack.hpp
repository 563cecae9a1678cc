#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pointcert/certify.hpp"

namespace pointcert {

/// Result of an adversarial search over a parameter region. `found` is set
/// when the smoothed prediction at that parameter differs from the clean
/// smoothed prediction under the same seed policy.
struct AttackReport {
    std::string input_id;
    Region region;
    std::optional<TransformParam> found;
    std::optional<int> flipped_label;
    std::int64_t probes = 0;
    int clean_label = -1;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Probes every lattice point of the region at `resolution` points per axis
/// (L2 balls keep only in-ball lattice points; rotation regions use the
/// sphere cover at that resolution). The smoothed prediction is evaluated
/// with the same estimator and seed as certification; the report carries the
/// lattice-minimal flip. Short-circuits on the first flip in lattice order.
AttackReport grid_attack(const BaseClassifier& classifier, const PointCloud& cloud,
                         const Region& region, int resolution, const SmoothingSpec& spec,
                         std::int64_t n, std::uint64_t seed, int threads = 1,
                         std::int64_t max_probes = 1000000);

/// Uniform random probes over the region; otherwise as grid_attack.
AttackReport random_attack(const BaseClassifier& classifier, const PointCloud& cloud,
                           const Region& region, std::int64_t n_probes,
                           const SmoothingSpec& spec, std::int64_t n, std::uint64_t seed,
                           int threads = 1);

/// True when the parameter lies inside the region (boundary inclusive).
bool region_contains(const Region& region, const TransformParam& param, double tol = 1e-9);

} // namespace pointcert
