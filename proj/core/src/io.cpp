#include <fstream>

#include "json_detail.hpp"
#include "pointcert/classifier.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/geometry.hpp"
#include "pointcert/serialize.hpp"

namespace pointcert {

using nlohmann::json;

namespace detail {

json param_json(const TransformParam& param) {
    json j;
    j["family"] = family_traits(family_of(param)).name;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ZRotationParam> || std::is_same_v<T, ZTwistParam> ||
                          std::is_same_v<T, ZTaperParam>) {
                j["theta"] = p.theta;
            } else if constexpr (std::is_same_v<T, ZShearParam>) {
                j["theta1"] = p.theta1;
                j["theta2"] = p.theta2;
            } else if constexpr (std::is_same_v<T, GeneralRotationParam>) {
                j["axis"] = {p.axis.x, p.axis.y, p.axis.z};
                j["angle"] = p.angle;
            } else if constexpr (std::is_same_v<T, LinearParam>) {
                j["matrix"] = p.a.m;
            } else if constexpr (std::is_same_v<T, TwistRotationParam>) {
                j["theta_twist"] = p.twist;
                j["theta_rot"] = p.rotation;
            } else if constexpr (std::is_same_v<T, TaperRotationParam>) {
                j["phi_taper"] = p.taper;
                j["theta_rot"] = p.rotation;
            } else if constexpr (std::is_same_v<T, TwistTaperRotationParam>) {
                j["phi_twist"] = p.twist;
                j["alpha_taper"] = p.taper;
                j["theta_rot"] = p.rotation;
            } else if constexpr (std::is_same_v<T, AdditiveNoiseParam>) {
                json rows = json::array();
                for (const Vec3& d : p.delta) rows.push_back({d.x, d.y, d.z});
                j["delta"] = std::move(rows);
            }
        },
        param);
    return j;
}

TransformParam param_from(const json& j) {
    const TransformFamily family = family_from_name(j.at("family").get<std::string>());
    switch (family) {
    case TransformFamily::ZRotation: return ZRotationParam{j.at("theta").get<double>()};
    case TransformFamily::ZTwist: return ZTwistParam{j.at("theta").get<double>()};
    case TransformFamily::ZTaper: return ZTaperParam{j.at("theta").get<double>()};
    case TransformFamily::ZShear:
        return ZShearParam{j.at("theta1").get<double>(), j.at("theta2").get<double>()};
    case TransformFamily::GeneralRotation: {
        const auto axis = j.at("axis");
        if (!axis.is_array() || axis.size() != 3) throw ParseError("rotation axis must be [x,y,z]");
        return GeneralRotationParam{
            {axis[0].get<double>(), axis[1].get<double>(), axis[2].get<double>()},
            j.at("angle").get<double>()};
    }
    case TransformFamily::Linear: {
        const auto rows = j.at("matrix");
        if (!rows.is_array() || rows.size() != 9)
            throw ParseError("linear matrix must be a row-major 9-array");
        LinearParam p;
        for (std::size_t i = 0; i < 9; ++i) p.a.m[i] = rows[i].get<double>();
        return p;
    }
    case TransformFamily::TwistRotation:
        return TwistRotationParam{j.at("theta_twist").get<double>(),
                                  j.at("theta_rot").get<double>()};
    case TransformFamily::TaperRotation:
        return TaperRotationParam{j.at("phi_taper").get<double>(),
                                  j.at("theta_rot").get<double>()};
    case TransformFamily::TwistTaperRotation:
        return TwistTaperRotationParam{j.at("phi_twist").get<double>(),
                                       j.at("alpha_taper").get<double>(),
                                       j.at("theta_rot").get<double>()};
    case TransformFamily::AdditiveNoise: {
        AdditiveNoiseParam p;
        for (const auto& row : j.at("delta")) {
            if (!row.is_array() || row.size() != 3)
                throw ParseError("noise rows must be [x,y,z]");
            p.delta.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
        }
        return p;
    }
    }
    throw ParseError("unknown family in parameter JSON");
}

json region_json(const Region& region) {
    json j;
    j["family"] = family_traits(region.family).name;
    j["kind"] = region_kind_name(region.kind);
    j["extent"] = region.extent;
    return j;
}

Region region_from(const json& j) {
    Region r;
    r.family = family_from_name(j.at("family").get<std::string>());
    r.kind = region_kind_from_name(j.at("kind").get<std::string>());
    r.extent = j.at("extent").get<std::vector<double>>();
    return r;
}

json certificate_json(const Certificate& cert) {
    json j;
    j["id"] = cert.input_id;
    j["label"] = cert.top_label;
    j["certified"] = cert.certified;
    j["protocol"] = cert.protocol;
    j["region"] = region_json(cert.region);
    j["margin"] = cert.margin;
    j["pA_lower"] = cert.pa_lower;
    j["alpha"] = cert.alpha;
    j["n_samples"] = cert.n_samples;
    j["grid_points"] = cert.grid_points;
    j["grid_m"] = cert.grid_m;
    j["seed"] = cert.seed;
    if (!cert.reason.empty()) j["reason"] = cert.reason;
    return j;
}

json attack_report_json(const AttackReport& report) {
    json j;
    j["id"] = report.input_id;
    j["region"] = region_json(report.region);
    j["clean_label"] = report.clean_label;
    j["probes"] = report.probes;
    j["n_samples"] = report.n_samples;
    j["seed"] = report.seed;
    j["found"] = report.found ? param_json(*report.found) : json(nullptr);
    j["flipped_label"] = report.flipped_label ? json(*report.flipped_label) : json(nullptr);
    return j;
}

} // namespace detail

std::string param_to_json(const TransformParam& param) { return detail::param_json(param).dump(); }

TransformParam param_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("parameter JSON: ") + e.what());
    }
    try {
        return detail::param_from(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("parameter JSON: ") + e.what());
    }
}

std::string certificate_to_json(const Certificate& cert) {
    return detail::certificate_json(cert).dump();
}

std::string attack_report_to_json(const AttackReport& report) {
    return detail::attack_report_json(report).dump();
}

// ---------------------------------------------------------------------------
// Dataset manifest

Dataset load_dataset_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ParseError("cannot open " + manifest_path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("manifest " + manifest_path.string() + ": " + e.what());
    }
    Dataset ds;
    try {
        ds.class_names = j.at("classes").get<std::vector<std::string>>();
        const auto dir = manifest_path.parent_path();
        for (const auto& item : j.at("items")) {
            const std::string rel = item.at("path").get<std::string>();
            const int label = item.at("label").get<int>();
            if (label < 0 || label >= ds.num_classes())
                throw ParseError("manifest label out of range: " + std::to_string(label));
            const auto path = dir / rel;
            const CloudFormat fmt =
                path.extension() == ".off" ? CloudFormat::Off : CloudFormat::Xyz;
            ds.items.push_back({load_cloud(path, fmt), label});
        }
    } catch (const json::exception& e) {
        throw ParseError("manifest " + manifest_path.string() + ": " + e.what());
    }
    if (ds.class_names.size() < 2) throw ParseError("manifest needs at least 2 classes");
    return ds;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json items = json::array();
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "cloud_%04zu.xyz", i);
        save_cloud_xyz(dataset.items[i].cloud, dir / name);
        items.push_back({{"path", name}, {"label", dataset.items[i].label}});
    }
    json j;
    j["classes"] = dataset.class_names;
    j["items"] = std::move(items);
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ParseError("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Classifier files

namespace {

json load_json_file(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ParseError(std::string("cannot open ") + what + " file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string(what) + " file " + path.string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path, const char* what) {
    std::ofstream out(path);
    if (!out) throw ParseError(std::string("cannot write ") + what + " file " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace

void save_weights(const TinyPointNet& net, const std::filesystem::path& path) {
    json j;
    j["kind"] = "tiny_point_net";
    j["h1"] = net.config().hidden1;
    j["h2"] = net.config().hidden2;
    j["h3"] = net.config().hidden3;
    j["num_classes"] = net.num_classes();
    j["n_train"] = net.trained_examples();
    j["seed"] = net.init_seed();
    j["weights"] = net.flat_weights();
    write_json_file(j, path, "weights");
}

TinyPointNet load_weights(const std::filesystem::path& path) {
    const json j = load_json_file(path, "weights");
    try {
        if (j.at("kind").get<std::string>() != "tiny_point_net")
            throw ParseError("weights file kind mismatch in " + path.string());
        TinyPointNetConfig cfg;
        cfg.hidden1 = j.at("h1").get<int>();
        cfg.hidden2 = j.at("h2").get<int>();
        cfg.hidden3 = j.at("h3").get<int>();
        TinyPointNet net(j.at("num_classes").get<int>(), cfg, j.at("seed").get<std::uint64_t>());
        const auto weights = j.at("weights").get<std::vector<double>>();
        if (weights.size() != net.weight_count())
            throw ParseError("weights file shape mismatch in " + path.string());
        net.set_flat_weights(weights);
        net.note_trained_examples(j.at("n_train").get<std::int64_t>());
        return net;
    } catch (const json::exception& e) {
        throw ParseError("weights file " + path.string() + ": " + e.what());
    }
}

TinyPointNet load_weights(const std::filesystem::path& path, int expected_classes) {
    TinyPointNet net = load_weights(path);
    if (net.num_classes() != expected_classes)
        throw InvalidInput("weights file declares " + std::to_string(net.num_classes()) +
                           " classes, expected " + std::to_string(expected_classes));
    return net;
}

void save_centroid_model(const CentroidModel& model, const std::filesystem::path& path) {
    json j;
    j["kind"] = "centroid";
    j["n_points"] = model.expected_points();
    j["temperature"] = model.temperature();
    j["centroids"] = model.centroids();
    write_json_file(j, path, "centroid model");
}

CentroidModel load_centroid_model(const std::filesystem::path& path) {
    const json j = load_json_file(path, "centroid model");
    try {
        if (j.at("kind").get<std::string>() != "centroid")
            throw ParseError("centroid file kind mismatch in " + path.string());
        return CentroidModel(j.at("centroids").get<std::vector<std::vector<double>>>(),
                             j.at("n_points").get<std::size_t>(),
                             j.at("temperature").get<double>());
    } catch (const json::exception& e) {
        throw ParseError("centroid model file " + path.string() + ": " + e.what());
    }
}

void save_oracle(const AnalyticOracle& oracle, const std::filesystem::path& path) {
    json j;
    j["kind"] = "analytic_oracle";
    const Vec3 d = oracle.direction();
    j["direction"] = {d.x, d.y, d.z};
    j["threshold"] = oracle.threshold();
    j["sharpness"] = oracle.sharpness();
    write_json_file(j, path, "oracle");
}

AnalyticOracle load_oracle(const std::filesystem::path& path) {
    const json j = load_json_file(path, "oracle");
    try {
        if (j.at("kind").get<std::string>() != "analytic_oracle")
            throw ParseError("oracle file kind mismatch in " + path.string());
        const auto d = j.at("direction");
        if (!d.is_array() || d.size() != 3) throw ParseError("oracle direction must be [x,y,z]");
        return AnalyticOracle({d[0].get<double>(), d[1].get<double>(), d[2].get<double>()},
                              j.at("threshold").get<double>(),
                              j.at("sharpness").is_string()
                                  ? std::numeric_limits<double>::infinity()
                                  : j.at("sharpness").get<double>());
    } catch (const json::exception& e) {
        throw ParseError("oracle file " + path.string() + ": " + e.what());
    }
}

std::unique_ptr<BaseClassifier> load_classifier(const std::string& kind,
                                                const std::filesystem::path& path) {
    if (kind == "tiny") return std::make_unique<TinyPointNet>(load_weights(path));
    if (kind == "centroid") return std::make_unique<CentroidModel>(load_centroid_model(path));
    if (kind == "oracle") return std::make_unique<AnalyticOracle>(load_oracle(path));
    throw InvalidInput("unknown classifier kind: " + kind);
}

} // namespace pointcert
