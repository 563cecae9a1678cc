#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pointcert/vecmat.hpp"

namespace pointcert {

/// N x 3 coordinate array. Immutable by convention: operations return new
/// clouds instead of mutating.
struct PointCloud {
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }

    Vec3 centroid() const;

    /// Largest point norm.
    double max_norm() const;

    /// Cloud-level l2 norm: sqrt(sum_i |p_i|^2).
    double frobenius_norm() const;

    bool finite() const;
};

/// Frobenius distance between two clouds of equal size.
double cloud_distance(const PointCloud& a, const PointCloud& b);

struct LabeledCloud {
    PointCloud cloud;
    int label = 0;
};

struct Dataset {
    std::vector<LabeledCloud> items;
    std::vector<std::string> class_names;

    int num_classes() const { return static_cast<int>(class_names.size()); }
};

/// Centers the cloud and scales it so the farthest point sits on the unit
/// sphere. A cloud of coincident points maps to all zeros.
PointCloud normalize(const PointCloud& cloud);

enum class CloudFormat { Off, Xyz };

/// Reads vertices from an OFF mesh (faces ignored) or an XYZ text file.
/// No normalization is applied.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);

/// One "x y z" line per point, 17 significant digits (round-trip exact).
void save_cloud_xyz(const PointCloud& cloud, const std::filesystem::path& path);

/// Deterministic subsample: without replacement when the cloud has at least
/// n points, with replacement otherwise.
PointCloud sample_n_points(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

enum class ShapeKind { Sphere, Cube, Cylinder, Cone, Torus, Plane, Helix, Cross };

ShapeKind shape_kind_from_name(const std::string& name);
const char* shape_kind_name(ShapeKind kind);

/// Synthetic labeled corpus: per class, `per_class` clouds of `n_points`
/// surface samples with Gaussian jitter of sd `noise_sd`. Shapes are built
/// centered at the origin and each cloud is scaled by its largest point norm
/// so it exactly fills the unit ball. Bit-reproducible for a given seed.
Dataset make_synthetic_dataset(const std::vector<ShapeKind>& classes, int per_class,
                               int n_points, double noise_sd, std::uint64_t seed);

/// Dataset manifest: {"classes": [...], "items": [{"path":..., "label":...}]}.
/// Paths are interpreted relative to the manifest's directory.
Dataset load_dataset_manifest(const std::filesystem::path& manifest_path);

/// Writes `dir/cloud_<i>.xyz` per item plus `dir/manifest.json`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

} // namespace pointcert
