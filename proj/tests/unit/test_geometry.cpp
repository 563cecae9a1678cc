#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pointcert/classifier.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/geometry.hpp"
#include "test_support.hpp"

using namespace pointcert;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "pointcert_geometry_tests";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

} // namespace

TEST_CASE("normalize symmetric pair") {
    const PointCloud in{{{2, 0, 0}, {-2, 0, 0}}};
    const PointCloud out = normalize(in);
    CHECK(out.points[0].x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out.points[1].x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(out.points[0].y == 0.0);
}

TEST_CASE("normalize collapses a single point to the origin") {
    const PointCloud out = normalize(PointCloud{{{5, 5, 5}}});
    CHECK(out.points[0].norm() == 0.0);
}

TEST_CASE("normalize hand-computed three-point cloud") {
    // centroid (1/3, 1/3, 4/3); max shifted norm sqrt(66)/3.
    const PointCloud out = normalize(PointCloud{{{1, 0, 0}, {0, 1, 0}, {0, 0, 4}}});
    const double scale = std::sqrt(66.0) / 3.0;
    const Vec3 expected0{(1.0 - 1.0 / 3.0) / scale, (-1.0 / 3.0) / scale, (-4.0 / 3.0) / scale};
    CHECK(out.points[0].x == doctest::Approx(expected0.x).epsilon(1e-12));
    CHECK(out.points[0].y == doctest::Approx(expected0.y).epsilon(1e-12));
    CHECK(out.points[0].z == doctest::Approx(expected0.z).epsilon(1e-12));
    CHECK(out.points[2].z == doctest::Approx((8.0 / 3.0) / scale).epsilon(1e-12));
    // centroid ~0, max norm 1
    CHECK(out.centroid().norm() < 1e-9);
    CHECK(out.max_norm() == doctest::Approx(1.0).epsilon(1e-9));
    for (const Vec3& p : out.points) CHECK(p.norm() <= 1.0 + 1e-12);
}

TEST_CASE("normalize is idempotent") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const PointCloud cloud = testsupport::random_ball_cloud(40, seed);
        const PointCloud once = normalize(cloud);
        const PointCloud twice = normalize(once);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            CHECK(std::fabs(once.points[i].x - twice.points[i].x) < 1e-9);
            CHECK(std::fabs(once.points[i].y - twice.points[i].y) < 1e-9);
            CHECK(std::fabs(once.points[i].z - twice.points[i].z) < 1e-9);
        }
    }
}

TEST_CASE("normalize rejects bad input") {
    CHECK_THROWS_AS(normalize(PointCloud{}), InvalidInput);
    PointCloud bad{{{1, 0, 0}}};
    bad.points[0].y = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(normalize(bad), InvalidInput);
}

TEST_CASE("OFF parsing") {
    const auto dir = temp_dir();
    write_file(dir / "tri.off", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    const PointCloud tri = load_cloud(dir / "tri.off", CloudFormat::Off);
    REQUIRE(tri.size() == 3);
    CHECK(tri.points[1].x == 1.0);
    CHECK(tri.points[2].y == 1.0);

    // single-line header variant
    write_file(dir / "one.off", "OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    CHECK(load_cloud(dir / "one.off", CloudFormat::Off).size() == 3);

    // glued header variant seen in the wild
    write_file(dir / "glued.off", "OFF3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
    CHECK(load_cloud(dir / "glued.off", CloudFormat::Off).size() == 3);

    // declared four vertices, provides three
    write_file(dir / "short.off", "OFF\n4 0 0\n0 0 0\n1 0 0\n0 1 0\n");
    CHECK_THROWS_AS(load_cloud(dir / "short.off", CloudFormat::Off), ParseError);

    write_file(dir / "nothdr.off", "3 1 0\n0 0 0\n1 0 0\n0 1 0\n");
    CHECK_THROWS_AS(load_cloud(dir / "nothdr.off", CloudFormat::Off), ParseError);
}

TEST_CASE("ParseError carries a line number") {
    const auto dir = temp_dir();
    write_file(dir / "badline.off", "OFF\n2 0 0\n0 0 0\n1 oops 0\n");
    try {
        load_cloud(dir / "badline.off", CloudFormat::Off);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("XYZ parsing and exact round trip") {
    const auto dir = temp_dir();
    write_file(dir / "p.xyz", "0.1 0.2 0.3\n");
    const PointCloud one = load_cloud(dir / "p.xyz", CloudFormat::Xyz);
    REQUIRE(one.size() == 1);
    CHECK(one.points[0].x == 0.1);
    CHECK(one.points[0].y == 0.2);
    CHECK(one.points[0].z == 0.3);

    const PointCloud cloud = testsupport::random_ball_cloud(25, 99);
    save_cloud_xyz(cloud, dir / "rt.xyz");
    const PointCloud back = load_cloud(dir / "rt.xyz", CloudFormat::Xyz);
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(back.points[i].x == cloud.points[i].x);
        CHECK(back.points[i].y == cloud.points[i].y);
        CHECK(back.points[i].z == cloud.points[i].z);
    }

    write_file(dir / "empty.xyz", "# nothing\n");
    CHECK_THROWS_AS(load_cloud(dir / "empty.xyz", CloudFormat::Xyz), ParseError);
}

TEST_CASE("sample_n_points") {
    const PointCloud cloud = testsupport::random_ball_cloud(100, 5);
    const PointCloud all = sample_n_points(cloud, 100, 7);
    REQUIRE(all.size() == 100);
    // same multiset: match each sampled point to an identical original
    auto sorter = [](const Vec3& a, const Vec3& b) {
        return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    };
    auto a = cloud.points, b = all.points;
    std::sort(a.begin(), a.end(), sorter);
    std::sort(b.begin(), b.end(), sorter);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);

    const PointCloud s1 = sample_n_points(cloud, 37, 11);
    const PointCloud s2 = sample_n_points(cloud, 37, 11);
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.points[i].x == s2.points[i].x);

    const PointCloud small = testsupport::random_ball_cloud(10, 6);
    const PointCloud up = sample_n_points(small, 64, 3);
    REQUIRE(up.size() == 64);
    for (const Vec3& p : up.points) {
        bool present = false;
        for (const Vec3& q : small.points)
            present = present || (p.x == q.x && p.y == q.y && p.z == q.z);
        CHECK(present);
    }

    CHECK_THROWS_AS(sample_n_points(cloud, 0, 1), InvalidInput);
}

TEST_CASE("synthetic dataset basics") {
    const Dataset sphere = make_synthetic_dataset({ShapeKind::Sphere}, 1, 64, 0.0, 42);
    REQUIRE(sphere.items.size() == 1);
    for (const Vec3& p : sphere.items[0].cloud.points)
        CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-9));

    const Dataset two =
        make_synthetic_dataset({ShapeKind::Cube, ShapeKind::Sphere}, 10, 64, 0.02, 42);
    CHECK(two.items.size() == 20);
    CHECK(two.num_classes() == 2);
    for (const LabeledCloud& item : two.items) CHECK(item.cloud.max_norm() <= 1.0 + 1e-12);

    CHECK_THROWS_AS(shape_kind_from_name("blob"), InvalidInput);
    CHECK_THROWS_AS(make_synthetic_dataset({ShapeKind::Cube}, 0, 64, 0.0, 1), InvalidInput);
}

TEST_CASE("synthetic dataset is bit-reproducible") {
    const Dataset a = make_synthetic_dataset({ShapeKind::Torus, ShapeKind::Helix}, 3, 48, 0.01, 9);
    const Dataset b = make_synthetic_dataset({ShapeKind::Torus, ShapeKind::Helix}, 3, 48, 0.01, 9);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i)
        for (std::size_t j = 0; j < a.items[i].cloud.size(); ++j) {
            CHECK(a.items[i].cloud.points[j].x == b.items[i].cloud.points[j].x);
            CHECK(a.items[i].cloud.points[j].y == b.items[i].cloud.points[j].y);
            CHECK(a.items[i].cloud.points[j].z == b.items[i].cloud.points[j].z);
        }
}

TEST_CASE("cube and sphere separate under the centroid model") {
    const Dataset ds =
        make_synthetic_dataset({ShapeKind::Cube, ShapeKind::Sphere}, 40, 64, 0.02, 17);
    const CentroidModel model = CentroidModel::fit(ds);
    CHECK(dataset_accuracy(model, ds) > 0.95);
}

TEST_CASE("dataset manifest round trip") {
    const auto dir = temp_dir() / "ds";
    const Dataset ds = make_synthetic_dataset({ShapeKind::Cube, ShapeKind::Plane}, 2, 16, 0.0, 3);
    save_dataset(ds, dir);
    const Dataset back = load_dataset_manifest(dir / "manifest.json");
    REQUIRE(back.items.size() == ds.items.size());
    CHECK(back.class_names == ds.class_names);
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        CHECK(back.items[i].label == ds.items[i].label);
        for (std::size_t j = 0; j < ds.items[i].cloud.size(); ++j)
            CHECK(back.items[i].cloud.points[j].x == ds.items[i].cloud.points[j].x);
    }
}
