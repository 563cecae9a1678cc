#include "pointcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pointcert/errors.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Vec3 PointCloud::centroid() const {
    Vec3 c;
    for (const Vec3& p : points) c += p;
    const double n = static_cast<double>(points.size());
    return n > 0.0 ? c / n : c;
}

double PointCloud::max_norm() const {
    double m = 0.0;
    for (const Vec3& p : points) m = std::max(m, p.norm());
    return m;
}

double PointCloud::frobenius_norm() const {
    double s = 0.0;
    for (const Vec3& p : points) s += p.squared_norm();
    return std::sqrt(s);
}

bool PointCloud::finite() const {
    return std::all_of(points.begin(), points.end(), [](const Vec3& p) { return p.finite(); });
}

double cloud_distance(const PointCloud& a, const PointCloud& b) {
    if (a.size() != b.size()) throw InvalidInput("cloud_distance: point counts differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a.points[i] - b.points[i]).squared_norm();
    return std::sqrt(s);
}

PointCloud normalize(const PointCloud& cloud) {
    if (cloud.size() == 0) throw InvalidInput("normalize: empty cloud");
    if (!cloud.finite()) throw InvalidInput("normalize: non-finite coordinate");
    const Vec3 c = cloud.centroid();
    PointCloud out;
    out.points.reserve(cloud.size());
    for (const Vec3& p : cloud.points) out.points.push_back(p - c);
    const double m = out.max_norm();
    if (m == 0.0) return out; // all points coincide
    for (Vec3& p : out.points) p = p / m;
    return out;
}

namespace {

struct TokenLine {
    std::vector<std::string> tokens;
    long line_no = 0;
};

std::vector<TokenLine> tokenize_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<TokenLine> lines;
    std::string raw;
    long no = 0;
    while (std::getline(in, raw)) {
        ++no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ss(raw);
        TokenLine tl;
        tl.line_no = no;
        std::string tok;
        while (ss >> tok) tl.tokens.push_back(tok);
        if (!tl.tokens.empty()) lines.push_back(std::move(tl));
    }
    return lines;
}

double parse_coord(const std::string& tok, long line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad coordinate '" + tok + "'", line_no);
    }
    if (pos != tok.size()) throw ParseError("bad coordinate '" + tok + "'", line_no);
    if (!std::isfinite(v)) throw ParseError("non-finite coordinate", line_no);
    return v;
}

long parse_count(const std::string& tok, long line_no) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("bad count '" + tok + "'", line_no);
    }
    if (pos != tok.size() || v < 0) throw ParseError("bad count '" + tok + "'", line_no);
    return v;
}

PointCloud load_off(const std::filesystem::path& path) {
    const auto lines = tokenize_lines(path);
    if (lines.empty()) throw ParseError("empty OFF file: " + path.string());

    std::size_t cursor = 0;
    const TokenLine& header = lines[cursor];
    std::vector<std::string> counts;
    std::string magic = header.tokens[0];
    if (magic.rfind("OFF", 0) != 0)
        throw ParseError("missing OFF header", header.line_no);
    if (magic.size() > 3) {
        // Glued header variant: "OFF123 64 0".
        counts.push_back(magic.substr(3));
    }
    counts.insert(counts.end(), header.tokens.begin() + 1, header.tokens.end());
    ++cursor;
    if (counts.empty()) {
        // Two-line layout: counts follow on the next token line.
        if (cursor >= lines.size()) throw ParseError("missing vertex counts", header.line_no);
        counts = lines[cursor].tokens;
        ++cursor;
    }
    if (counts.size() < 2) throw ParseError("OFF header needs vertex and face counts", header.line_no);
    const long n_vertices = parse_count(counts[0], header.line_no);
    if (n_vertices < 1) throw ParseError("OFF declares no vertices", header.line_no);

    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n_vertices));
    for (long i = 0; i < n_vertices; ++i) {
        if (cursor >= lines.size())
            throw ParseError("vertex count mismatch: expected " + std::to_string(n_vertices) +
                                 " vertices, file ended after " + std::to_string(i),
                             lines.back().line_no);
        const TokenLine& tl = lines[cursor];
        if (tl.tokens.size() < 3) throw ParseError("vertex line needs 3 coordinates", tl.line_no);
        cloud.points.push_back({parse_coord(tl.tokens[0], tl.line_no),
                                parse_coord(tl.tokens[1], tl.line_no),
                                parse_coord(tl.tokens[2], tl.line_no)});
        ++cursor;
    }
    // Faces (if any) are intentionally not read.
    return cloud;
}

PointCloud load_xyz(const std::filesystem::path& path) {
    const auto lines = tokenize_lines(path);
    PointCloud cloud;
    cloud.points.reserve(lines.size());
    for (const TokenLine& tl : lines) {
        if (tl.tokens.size() < 3) throw ParseError("XYZ line needs 3 coordinates", tl.line_no);
        cloud.points.push_back({parse_coord(tl.tokens[0], tl.line_no),
                                parse_coord(tl.tokens[1], tl.line_no),
                                parse_coord(tl.tokens[2], tl.line_no)});
    }
    if (cloud.points.empty()) throw ParseError("no points in " + path.string());
    return cloud;
}

} // namespace

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
    switch (format) {
    case CloudFormat::Off: return load_off(path);
    case CloudFormat::Xyz: return load_xyz(path);
    }
    throw InvalidInput("load_cloud: unknown format");
}

void save_cloud_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    char buf[128];
    for (const Vec3& p : cloud.points) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", p.x, p.y, p.z);
        out << buf;
    }
}

PointCloud sample_n_points(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
    if (cloud.size() == 0) throw InvalidInput("sample_n_points: empty cloud");
    if (n == 0) throw InvalidInput("sample_n_points: n must be positive");
    Rng rng(seed);
    PointCloud out;
    out.points.reserve(n);
    const std::size_t total = cloud.size();
    if (total >= n) {
        // Partial Fisher-Yates over an index array.
        std::vector<std::size_t> idx(total);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(total - i));
            std::swap(idx[i], idx[j]);
            out.points.push_back(cloud.points[idx[i]]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            out.points.push_back(cloud.points[rng.uniform_below(total)]);
    }
    return out;
}

ShapeKind shape_kind_from_name(const std::string& name) {
    if (name == "sphere") return ShapeKind::Sphere;
    if (name == "cube") return ShapeKind::Cube;
    if (name == "cylinder") return ShapeKind::Cylinder;
    if (name == "cone") return ShapeKind::Cone;
    if (name == "torus") return ShapeKind::Torus;
    if (name == "plane") return ShapeKind::Plane;
    if (name == "helix") return ShapeKind::Helix;
    if (name == "cross") return ShapeKind::Cross;
    throw InvalidInput("unknown shape kind: " + name);
}

const char* shape_kind_name(ShapeKind kind) {
    switch (kind) {
    case ShapeKind::Sphere: return "sphere";
    case ShapeKind::Cube: return "cube";
    case ShapeKind::Cylinder: return "cylinder";
    case ShapeKind::Cone: return "cone";
    case ShapeKind::Torus: return "torus";
    case ShapeKind::Plane: return "plane";
    case ShapeKind::Helix: return "helix";
    case ShapeKind::Cross: return "cross";
    }
    return "?";
}

namespace {

Vec3 sample_surface_point(ShapeKind kind, Rng& rng) {
    switch (kind) {
    case ShapeKind::Sphere: {
        Vec3 v;
        double n = 0.0;
        do {
            v = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
            n = v.norm();
        } while (n < 1e-12);
        return v / n;
    }
    case ShapeKind::Cube: {
        const std::uint64_t face = rng.uniform_below(6);
        const double u = rng.uniform(-1.0, 1.0), v = rng.uniform(-1.0, 1.0);
        const double s = (face % 2 == 0) ? 1.0 : -1.0;
        switch (face / 2) {
        case 0: return {s, u, v};
        case 1: return {u, s, v};
        default: return {u, v, s};
        }
    }
    case ShapeKind::Cylinder: {
        // Lateral area : cap area = 2 : 1 for radius 1, height 2.
        const double a = rng.uniform(0.0, 2.0 * kPi);
        if (rng.uniform() < 2.0 / 3.0) return {std::cos(a), std::sin(a), rng.uniform(-1.0, 1.0)};
        const double r = std::sqrt(rng.uniform());
        const double z = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return {r * std::cos(a), r * std::sin(a), z};
    }
    case ShapeKind::Cone: {
        // Apex (0,0,1), unit base circle at z = -1.
        const double a = rng.uniform(0.0, 2.0 * kPi);
        const double lateral_frac = std::sqrt(5.0) / (std::sqrt(5.0) + 1.0);
        if (rng.uniform() < lateral_frac) {
            const double t = std::sqrt(rng.uniform()); // radius fraction from apex
            return {t * std::cos(a), t * std::sin(a), 1.0 - 2.0 * t};
        }
        const double r = std::sqrt(rng.uniform());
        return {r * std::cos(a), r * std::sin(a), -1.0};
    }
    case ShapeKind::Torus: {
        const double major = 0.7, minor = 0.3;
        double u = 0.0, v = 0.0;
        // Rejection in the tube angle keeps the surface density uniform.
        for (;;) {
            u = rng.uniform(0.0, 2.0 * kPi);
            v = rng.uniform(0.0, 2.0 * kPi);
            const double w = (major + minor * std::cos(v)) / (major + minor);
            if (rng.uniform() < w) break;
        }
        const double ring = major + minor * std::cos(v);
        return {ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)};
    }
    case ShapeKind::Plane: return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
    case ShapeKind::Helix: {
        const double t = rng.uniform(0.0, 4.0 * kPi);
        return {0.8 * std::cos(t), 0.8 * std::sin(t), t / (2.0 * kPi) - 1.0};
    }
    case ShapeKind::Cross: {
        const std::uint64_t axis = rng.uniform_below(3);
        const double u = rng.uniform(-1.0, 1.0);
        if (axis == 0) return {u, 0.0, 0.0};
        if (axis == 1) return {0.0, u, 0.0};
        return {0.0, 0.0, u};
    }
    }
    throw InvalidInput("unknown shape kind");
}

} // namespace

Dataset make_synthetic_dataset(const std::vector<ShapeKind>& classes, int per_class,
                               int n_points, double noise_sd, std::uint64_t seed) {
    if (classes.empty()) throw InvalidInput("make_synthetic_dataset: no classes");
    if (per_class < 1) throw InvalidInput("make_synthetic_dataset: per_class must be >= 1");
    if (n_points < 1) throw InvalidInput("make_synthetic_dataset: n_points must be >= 1");
    if (noise_sd < 0.0) throw InvalidInput("make_synthetic_dataset: negative noise_sd");

    Dataset ds;
    for (ShapeKind kind : classes) ds.class_names.push_back(shape_kind_name(kind));

    std::uint64_t cloud_index = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (int k = 0; k < per_class; ++k, ++cloud_index) {
            Rng rng(mix_seed(seed, cloud_index));
            PointCloud cloud;
            cloud.points.reserve(static_cast<std::size_t>(n_points));
            for (int i = 0; i < n_points; ++i) {
                Vec3 p = sample_surface_point(classes[c], rng);
                if (noise_sd > 0.0)
                    p += Vec3{noise_sd * rng.gaussian(), noise_sd * rng.gaussian(),
                              noise_sd * rng.gaussian()};
                cloud.points.push_back(p);
            }
            const double m = cloud.max_norm();
            if (m > 0.0)
                for (Vec3& p : cloud.points) p = p / m;
            ds.items.push_back({std::move(cloud), static_cast<int>(c)});
        }
    }
    return ds;
}

} // namespace pointcert
