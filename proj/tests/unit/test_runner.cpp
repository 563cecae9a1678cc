#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pointcert/runner.hpp"

using namespace pointcert;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "pointcert_runner_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_quiet(const RunConfig& cfg) {
    std::ostringstream out, err;
    const int code = run(cfg, out, err);
    if (code != 0) INFO("stderr: ", err.str());
    return code;
}

// Shared fixture: a tiny corpus plus a fitted centroid model.
struct Workspace {
    fs::path dir;
    fs::path manifest;
    fs::path centroid;

    Workspace() {
        dir = temp_dir() / "ws";
        fs::create_directories(dir);
        RunConfig gen;
        gen.command = "gen-data";
        gen.classes = "sphere,cube";
        gen.per_class = 3;
        gen.n_points = 32;
        gen.noise_sd = 0.02;
        gen.seed = 11;
        gen.out = (dir / "data").string();
        REQUIRE(run_quiet(gen) == 0);
        manifest = dir / "data" / "manifest.json";

        RunConfig train;
        train.command = "train";
        train.classifier_kind = "centroid";
        train.dataset = manifest.string();
        train.weights = (dir / "centroid.json").string();
        REQUIRE(run_quiet(train) == 0);
        centroid = dir / "centroid.json";
    }
};

} // namespace

TEST_CASE("config file parsing with flag-style overrides") {
    const auto dir = temp_dir();
    const auto path = dir / "run.cfg";
    {
        std::ofstream out(path);
        out << "# a comment\n"
            << "command = certify\n"
            << "family = z_twist\n"
            << "radius = 20deg\n"
            << "sigma = 0.5\n"
            << "alpha = 0.001\n"
            << "seed = 42\n";
    }
    RunConfig cfg = parse_config_file(path);
    CHECK(cfg.command == "certify");
    CHECK(cfg.family == "z_twist");
    REQUIRE(cfg.radius.size() == 1);
    CHECK(cfg.radius[0] == doctest::Approx(20.0 * 3.14159265358979323846 / 180.0));
    CHECK(cfg.seed == 42);

    apply_config_entry(cfg, "radius", "0.1,0.2");
    REQUIRE(cfg.radius.size() == 2);
    CHECK(cfg.radius[1] == 0.2);

    CHECK_THROWS(apply_config_entry(cfg, "no_such_key", "1"));
    {
        std::ofstream out(dir / "bad.cfg");
        out << "command certify\n";
    }
    CHECK_THROWS(parse_config_file(dir / "bad.cfg"));
}

TEST_CASE("invalid pairings and bad configs exit 2") {
    Workspace ws;
    RunConfig cfg;
    cfg.command = "certify";
    cfg.dataset = ws.manifest.string();
    cfg.classifier_kind = "centroid";
    cfg.weights = ws.centroid.string();
    cfg.family = "z_taper";
    cfg.radius = {0.2};
    cfg.sigma = {0.25};
    cfg.region_kind = "frobenius_ball"; // z-taper with a Frobenius bound
    cfg.out = (ws.dir / "r.json").string();
    CHECK(run_quiet(cfg) == 2);

    cfg.region_kind.clear();
    cfg.command = "nonsense";
    CHECK(run_quiet(cfg) == 2);

    cfg.command = "certify";
    cfg.alpha = 0.0;
    CHECK(run_quiet(cfg) == 2);
}

TEST_CASE("missing files exit 3") {
    Workspace ws;
    RunConfig cfg;
    cfg.command = "certify";
    cfg.dataset = "/nonexistent/manifest.json";
    cfg.classifier_kind = "centroid";
    cfg.weights = ws.centroid.string();
    cfg.family = "z_rotation";
    cfg.radius = {0.3};
    cfg.sigma = {0.5};
    cfg.out = (ws.dir / "r.json").string();
    CHECK(run_quiet(cfg) == 3);
}

TEST_CASE("certify run writes records, summary and reproducible bytes") {
    Workspace ws;
    RunConfig cfg;
    cfg.command = "certify";
    cfg.dataset = ws.manifest.string();
    cfg.classifier_kind = "centroid";
    cfg.weights = ws.centroid.string();
    cfg.family = "z_twist";
    cfg.radius = {20.0 * 3.14159265358979323846 / 180.0};
    cfg.sigma = {0.5};
    cfg.samples = 200;
    cfg.seed = 5;
    cfg.out = (ws.dir / "report.json").string();
    REQUIRE(run_quiet(cfg) == 0);
    const std::string first = slurp(cfg.out);
    CHECK(first.find("\"records\"") != std::string::npos);
    CHECK(first.find("certified_accuracy") != std::string::npos);
    CHECK(first.find("certified_ratio") != std::string::npos);
    CHECK(first.find("\"seed\"") != std::string::npos);

    REQUIRE(run_quiet(cfg) == 0);
    CHECK(slurp(cfg.out) == first);

    // more workers: identical records (the echoed config differs in the
    // threads entry only)
    cfg.threads = 2;
    REQUIRE(run_quiet(cfg) == 0);
    std::string threaded = slurp(cfg.out);
    const auto strip_threads = [](std::string s) {
        const auto pos = s.find("\"threads\":");
        REQUIRE(pos != std::string::npos);
        return s.erase(pos, s.find('\n', pos) - pos);
    };
    CHECK(strip_threads(threaded) == strip_threads(first));

    // certified-accuracy <= certified-ratio
    const auto acc_pos = first.find("\"certified_accuracy\": ");
    const auto ratio_pos = first.find("\"certified_ratio\": ");
    REQUIRE(acc_pos != std::string::npos);
    REQUIRE(ratio_pos != std::string::npos);
    const double acc = std::stod(first.substr(acc_pos + 22));
    const double ratio = std::stod(first.substr(ratio_pos + 19));
    CHECK(acc <= ratio + 1e-12);
}

TEST_CASE("csv reports parse and reproduce") {
    Workspace ws;
    RunConfig cfg;
    cfg.command = "eval";
    cfg.dataset = ws.manifest.string();
    cfg.classifier_kind = "centroid";
    cfg.weights = ws.centroid.string();
    cfg.format = "csv";
    cfg.out = (ws.dir / "eval.csv").string();
    REQUIRE(run_quiet(cfg) == 0);
    const std::string text = slurp(cfg.out);
    CHECK(text.rfind("id,true_label,label,correct", 0) == 0);
    CHECK(text.find("# accuracy=") != std::string::npos);
    REQUIRE(run_quiet(cfg) == 0);
    CHECK(slurp(cfg.out) == text);
}

TEST_CASE("attack command produces a report") {
    Workspace ws;
    RunConfig cfg;
    cfg.command = "attack";
    cfg.dataset = ws.manifest.string();
    cfg.classifier_kind = "centroid";
    cfg.weights = ws.centroid.string();
    cfg.family = "z_rotation";
    cfg.radius = {0.2};
    cfg.sigma = {0.5};
    cfg.samples = 100;
    cfg.attack_resolution = 9;
    cfg.seed = 2;
    cfg.out = (ws.dir / "attack.json").string();
    REQUIRE(run_quiet(cfg) == 0);
    const std::string text = slurp(cfg.out);
    CHECK(text.find("flip_ratio") != std::string::npos);
    CHECK(text.find("clean_label") != std::string::npos);
    REQUIRE(run_quiet(cfg) == 0);
    CHECK(slurp(cfg.out) == text);
}
