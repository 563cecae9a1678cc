#include "pointcert/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json_detail.hpp"
#include "pointcert/attack.hpp"
#include "pointcert/certify.hpp"
#include "pointcert/classifier.hpp"
#include "pointcert/errors.hpp"
#include "pointcert/parallel.hpp"

#ifndef POINTCERT_VERSION
#define POINTCERT_VERSION "0.0.0"
#endif

namespace pointcert {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double parse_scalar(const std::string& raw) {
    std::string text = raw;
    double factor = 1.0;
    if (text.size() > 3 && text.substr(text.size() - 3) == "deg") {
        factor = kPi / 180.0;
        text = text.substr(0, text.size() - 3);
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + raw + "'");
    }
    if (pos != text.size()) throw ConfigError("bad numeric value '" + raw + "'");
    return v * factor;
}

std::vector<double> parse_scalar_list(const std::string& raw) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // trim
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) continue;
        out.push_back(parse_scalar(item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw ConfigError("empty numeric list '" + raw + "'");
    return out;
}

long long parse_int(const std::string& raw) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(raw, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad integer '" + raw + "'");
    }
    if (pos != raw.size()) throw ConfigError("bad integer '" + raw + "'");
    return v;
}

// Protocol groups keyed by the `family` config value.
enum class ProtocolKind { Additive, Sampled, ZyxRotation, Linear, NormL2, NormLinf };

struct FamilyPlan {
    ProtocolKind protocol;
    TransformFamily family = TransformFamily::ZRotation; // meaningful unless NormL2/NormLinf
};

FamilyPlan plan_for(const std::string& name) {
    if (name == "l2") return {ProtocolKind::NormL2};
    if (name == "linf") return {ProtocolKind::NormLinf};
    if (name == "zyx_rotation") return {ProtocolKind::ZyxRotation, TransformFamily::GeneralRotation};
    const TransformFamily family = family_from_name(name);
    switch (family) {
    case TransformFamily::ZRotation:
    case TransformFamily::ZShear:
    case TransformFamily::ZTwist:
    case TransformFamily::TwistRotation:
    case TransformFamily::AdditiveNoise: return {ProtocolKind::Additive, family};
    case TransformFamily::ZTaper:
    case TransformFamily::TaperRotation:
    case TransformFamily::TwistTaperRotation:
    case TransformFamily::GeneralRotation: return {ProtocolKind::Sampled, family};
    case TransformFamily::Linear: return {ProtocolKind::Linear, family};
    }
    throw ConfigError("family '" + name + "' has no certification protocol");
}

Region build_region(const FamilyPlan& plan, const RunConfig& cfg) {
    Region region;
    switch (plan.protocol) {
    case ProtocolKind::NormL2:
    case ProtocolKind::NormLinf: {
        if (cfg.radius.size() != 1) throw ConfigError("l2/linf expects one radius");
        region.family = TransformFamily::AdditiveNoise;
        region.kind = Region::Kind::L2Ball;
        region.extent = cfg.radius;
        return region;
    }
    case ProtocolKind::Linear: {
        if (cfg.radius.size() != 1) throw ConfigError("linear expects one Frobenius radius");
        region.family = TransformFamily::Linear;
        region.kind = Region::Kind::FrobeniusBall;
        region.extent = cfg.radius;
        return region;
    }
    case ProtocolKind::ZyxRotation: {
        if (cfg.radius.size() != 1) throw ConfigError("zyx_rotation expects one Euler range");
        region.family = TransformFamily::GeneralRotation;
        region.kind = Region::Kind::RotationBall;
        region.extent = {zyx_to_general(cfg.radius[0])};
        return region;
    }
    case ProtocolKind::Sampled: {
        region.family = plan.family;
        const int dim = plan.family == TransformFamily::GeneralRotation
                            ? 1
                            : family_traits(plan.family).param_dim;
        if (static_cast<int>(cfg.radius.size()) != dim)
            throw ConfigError(std::string(family_traits(plan.family).name) + " expects " +
                              std::to_string(dim) + " radius value(s)");
        region.kind = plan.family == TransformFamily::GeneralRotation
                          ? Region::Kind::RotationBall
                          : (dim == 1 ? Region::Kind::Interval : Region::Kind::Box);
        region.extent = cfg.radius;
        return region;
    }
    case ProtocolKind::Additive: {
        region.family = plan.family;
        const int dim = family_traits(plan.family).param_dim;
        if (static_cast<int>(cfg.radius.size()) == dim && dim >= 1) {
            region.kind = dim == 1 ? Region::Kind::Interval : Region::Kind::Box;
        } else if (cfg.radius.size() == 1 && dim > 1) {
            region.kind = Region::Kind::L2Ball;
        } else {
            throw ConfigError(std::string(family_traits(plan.family).name) + " expects " +
                              std::to_string(dim) + " radius value(s) or one ball radius");
        }
        region.extent = cfg.radius;
        return region;
    }
    }
    throw ConfigError("unhandled protocol");
}

void check_region_kind_override(const FamilyPlan& plan, Region& region, const RunConfig& cfg) {
    if (cfg.region_kind.empty()) return;
    const Region::Kind requested = region_kind_from_name(cfg.region_kind);
    // Only pairings compatible with the family's protocol are accepted.
    const bool ok = [&] {
        switch (requested) {
        case Region::Kind::Interval:
        case Region::Kind::Box: return region.kind == requested;
        case Region::Kind::L2Ball:
            return plan.protocol == ProtocolKind::Additive &&
                   family_traits(plan.family).param_dim > 1 && region.extent.size() == 1;
        case Region::Kind::FrobeniusBall: return plan.protocol == ProtocolKind::Linear;
        case Region::Kind::RotationBall:
            return plan.protocol == ProtocolKind::Sampled || plan.protocol == ProtocolKind::ZyxRotation;
        }
        return false;
    }();
    if (!ok)
        throw ConfigError("region kind '" + cfg.region_kind + "' is incompatible with family '" +
                          cfg.family + "'");
    if (requested == Region::Kind::L2Ball) region.kind = requested;
}

std::int64_t default_samples(ProtocolKind protocol) {
    switch (protocol) {
    case ProtocolKind::Sampled:
    case ProtocolKind::ZyxRotation: return 10000;
    default: return 1000;
    }
}

void validate_sigma(const FamilyPlan& plan, const RunConfig& cfg) {
    if (cfg.sigma.empty()) throw ConfigError("sigma is required");
    for (double s : cfg.sigma)
        if (!(s > 0.0)) throw ConfigError("sigma entries must be positive");
    if (plan.protocol == ProtocolKind::Additive) {
        const int dim = family_traits(plan.family).param_dim;
        if (plan.family != TransformFamily::AdditiveNoise &&
            static_cast<int>(cfg.sigma.size()) != dim)
            throw ConfigError("sigma must have " + std::to_string(dim) + " entries for family '" +
                              cfg.family + "'");
        if (plan.family == TransformFamily::AdditiveNoise && cfg.sigma.size() != 1)
            throw ConfigError("additive_noise smoothing uses one sigma");
    } else if (cfg.sigma.size() != 1) {
        throw ConfigError("this protocol uses a single sigma");
    }
}

SmoothingSpec smoothing_for(const FamilyPlan& plan, const RunConfig& cfg) {
    switch (plan.protocol) {
    case ProtocolKind::Additive:
        if (plan.family == TransformFamily::AdditiveNoise)
            return SmoothingSpec::input_gaussian(cfg.sigma[0]);
        return SmoothingSpec::param_gaussian(plan.family, cfg.sigma);
    case ProtocolKind::Sampled:
    case ProtocolKind::ZyxRotation:
    case ProtocolKind::NormL2:
    case ProtocolKind::NormLinf: return SmoothingSpec::input_gaussian(cfg.sigma[0]);
    case ProtocolKind::Linear: return SmoothingSpec::linear_map_gaussian(cfg.sigma[0]);
    }
    throw ConfigError("unhandled protocol");
}

std::string record_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", index);
    return buf;
}

json config_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["dataset"] = c.dataset;
    j["classifier"] = c.classifier_kind;
    j["weights"] = c.weights;
    j["family"] = c.family;
    j["radius"] = c.radius;
    j["region_kind"] = c.region_kind;
    j["sigma"] = c.sigma;
    j["grid_m"] = c.grid_m;
    j["samples"] = c.samples;
    j["alpha"] = c.alpha;
    j["seed"] = c.seed;
    j["format"] = c.format;
    j["threads"] = c.threads;
    j["epochs"] = c.epochs;
    j["learning_rate"] = c.learning_rate;
    j["batch_size"] = c.batch_size;
    j["hidden"] = {c.hidden1, c.hidden2, c.hidden3};
    j["classes"] = c.classes;
    j["per_class"] = c.per_class;
    j["n_points"] = c.n_points;
    j["noise_sd"] = c.noise_sd;
    j["attack_mode"] = c.attack_mode;
    j["attack_resolution"] = c.attack_resolution;
    j["attack_probes"] = c.attack_probes;
    j["rotation_bound"] = c.rotation_bound;
    j["max_grid"] = c.max_grid;
    return j;
}

json report_header(const RunConfig& cfg) {
    json h;
    h["config"] = config_json(cfg);
    h["version"] = POINTCERT_VERSION;
    h["timestamp"] = cfg.timestamp;
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_json_report(const RunConfig& cfg, const json& records, const json& summary) {
    json report;
    report["header"] = report_header(cfg);
    report["records"] = records;
    report["summary"] = summary;
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write report to " + cfg.out);
    out << report.dump(2) << "\n";
}

// Flat CSV: one row per record, stable column order, summary appended as
// '#' comment lines.
void write_csv_report(const RunConfig& cfg, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows, const json& summary) {
    std::ofstream out(cfg.out);
    if (!out) throw std::runtime_error("cannot write report to " + cfg.out);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
    for (const auto& [key, value] : summary.items())
        out << "# " << key << "=" << (value.is_string() ? value.get<std::string>() : value.dump())
            << "\n";
}

// ---------------------------------------------------------------------------
// Commands

int cmd_gen_data(const RunConfig& cfg, std::ostream& out) {
    std::vector<ShapeKind> kinds;
    {
        std::stringstream ss(cfg.classes);
        std::string item;
        while (std::getline(ss, item, ',')) kinds.push_back(shape_kind_from_name(item));
    }
    const Dataset ds =
        make_synthetic_dataset(kinds, cfg.per_class, cfg.n_points, cfg.noise_sd, cfg.seed);
    save_dataset(ds, cfg.out);
    out << "gen-data: wrote " << ds.items.size() << " clouds (" << ds.num_classes()
        << " classes) to " << cfg.out << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset_manifest(cfg.dataset);
    double accuracy = 0.0;
    if (cfg.classifier_kind == "centroid") {
        const CentroidModel model = CentroidModel::fit(ds);
        save_centroid_model(model, cfg.weights);
        accuracy = dataset_accuracy(model, ds);
    } else { // tiny
        const FamilyPlan plan = plan_for(cfg.family);
        const SmoothingSpec augmentation = smoothing_for(plan, cfg);
        TinyPointNetConfig net_cfg{cfg.hidden1, cfg.hidden2, cfg.hidden3};
        const TinyPointNet net = train_augmented(ds, augmentation, cfg.epochs, cfg.learning_rate,
                                                 cfg.seed, net_cfg, cfg.batch_size);
        save_weights(net, cfg.weights);
        accuracy = dataset_accuracy(net, ds);
    }
    json summary;
    summary["train_accuracy"] = accuracy;
    summary["items"] = ds.items.size();
    if (!cfg.out.empty()) {
        if (cfg.format == "csv")
            write_csv_report(cfg, {"train_accuracy", "items"},
                             {{format_double(accuracy), std::to_string(ds.items.size())}},
                             summary);
        else
            write_json_report(cfg, json::array(), summary);
    }
    out << "train: accuracy=" << format_double(accuracy) << " weights=" << cfg.weights << "\n";
    return 0;
}

Certificate certify_one(const BaseClassifier& classifier, const PointCloud& cloud,
                        const FamilyPlan& plan, const Region& region, const RunConfig& cfg,
                        std::int64_t n, std::uint64_t seed, int engine_threads) {
    switch (plan.protocol) {
    case ProtocolKind::Additive:
        return certify_additive_protocol(classifier, cloud, region, cfg.sigma, n, cfg.alpha, seed,
                                         engine_threads);
    case ProtocolKind::Sampled:
    case ProtocolKind::ZyxRotation: {
        GridSpec grid{cfg.grid_m, region.extent};
        SampledOptions options;
        options.threads = engine_threads;
        options.max_grid_points = cfg.max_grid;
        options.rotation_bound = cfg.rotation_bound == "tight" ? RotationBound::Tight
                                                               : RotationBound::Standard;
        Certificate cert = certify_sampled(classifier, cloud, region.family, grid, cfg.sigma[0],
                                           n, cfg.alpha, seed, options);
        if (plan.protocol == ProtocolKind::ZyxRotation) cert.protocol = "zyx_via_general_rotation";
        return cert;
    }
    case ProtocolKind::Linear:
        return certify_linear(classifier, cloud, cfg.sigma[0], n, cfg.alpha, seed,
                              region.extent.at(0), engine_threads);
    case ProtocolKind::NormL2:
    case ProtocolKind::NormLinf:
        return certify_norm_ball_protocol(classifier, cloud,
                                          plan.protocol == ProtocolKind::NormL2 ? NormKind::L2
                                                                                : NormKind::Linf,
                                          region.extent.at(0), cfg.sigma[0], n, cfg.alpha, seed,
                                          engine_threads);
    }
    throw std::runtime_error("unhandled protocol");
}

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset_manifest(cfg.dataset);
    const auto classifier = load_classifier(cfg.classifier_kind, cfg.weights);
    const FamilyPlan plan = plan_for(cfg.family);
    Region region = build_region(plan, cfg);
    check_region_kind_override(plan, region, cfg);
    const std::int64_t n = cfg.samples > 0 ? cfg.samples : default_samples(plan.protocol);

    // Inputs fan out across threads; each engine call stays single-threaded
    // so the per-input seeds fully determine the records.
    std::vector<Certificate> certs(ds.items.size());
    parallel_for(static_cast<std::int64_t>(ds.items.size()), cfg.threads, [&](std::int64_t i) {
        const std::uint64_t seed_i = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
        Certificate cert = certify_one(*classifier, ds.items[static_cast<std::size_t>(i)].cloud,
                                       plan, region, cfg, n, seed_i, 1);
        cert.input_id = record_id(static_cast<std::size_t>(i));
        certs[static_cast<std::size_t>(i)] = std::move(cert);
    });

    std::size_t certified = 0, certified_correct = 0;
    json records = json::array();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        const Certificate& cert = certs[i];
        const int true_label = ds.items[i].label;
        const bool correct = cert.top_label == true_label;
        if (cert.certified) {
            ++certified;
            if (correct) ++certified_correct;
        }
        json rec = detail::certificate_json(cert);
        rec["true_label"] = true_label;
        rec["correct"] = correct;
        records.push_back(std::move(rec));
        rows.push_back({cert.input_id, std::to_string(true_label), std::to_string(cert.top_label),
                        cert.certified ? "1" : "0", format_double(cert.margin),
                        format_double(cert.pa_lower), cert.protocol,
                        std::to_string(cert.grid_points), std::to_string(cert.n_samples),
                        std::to_string(cert.seed)});
    }
    const double denom = static_cast<double>(std::max<std::size_t>(1, certs.size()));
    const double certified_accuracy = static_cast<double>(certified_correct) / denom;
    const double certified_ratio = static_cast<double>(certified) / denom;
    json summary;
    summary["certified_accuracy"] = certified_accuracy;
    summary["certified_ratio"] = certified_ratio;
    summary["inputs"] = certs.size();

    if (cfg.format == "csv")
        write_csv_report(cfg,
                         {"id", "true_label", "label", "certified", "margin", "pA_lower",
                          "protocol", "grid_points", "n_samples", "seed"},
                         rows, summary);
    else
        write_json_report(cfg, records, summary);
    out << "certify: certified-accuracy=" << format_double(certified_accuracy)
        << " certified-ratio=" << format_double(certified_ratio) << " inputs=" << certs.size()
        << "\n";
    return 0;
}

int cmd_attack(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset_manifest(cfg.dataset);
    const auto classifier = load_classifier(cfg.classifier_kind, cfg.weights);
    const FamilyPlan plan = plan_for(cfg.family);
    Region region = build_region(plan, cfg);
    check_region_kind_override(plan, region, cfg);
    const SmoothingSpec spec = smoothing_for(plan, cfg);
    const std::int64_t n = cfg.samples > 0 ? cfg.samples : default_samples(plan.protocol);

    std::vector<AttackReport> reports(ds.items.size());
    parallel_for(static_cast<std::int64_t>(ds.items.size()), cfg.threads, [&](std::int64_t i) {
        const std::uint64_t seed_i = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
        const PointCloud& cloud = ds.items[static_cast<std::size_t>(i)].cloud;
        AttackReport rep =
            cfg.attack_mode == "random"
                ? random_attack(*classifier, cloud, region, cfg.attack_probes, spec, n, seed_i, 1)
                : grid_attack(*classifier, cloud, region, cfg.attack_resolution, spec, n, seed_i,
                              1, cfg.max_grid);
        rep.input_id = record_id(static_cast<std::size_t>(i));
        reports[static_cast<std::size_t>(i)] = std::move(rep);
    });

    std::size_t flipped = 0;
    json records = json::array();
    std::vector<std::vector<std::string>> rows;
    for (const AttackReport& rep : reports) {
        if (rep.found) ++flipped;
        json rec = detail::attack_report_json(rep);
        records.push_back(std::move(rec));
        rows.push_back({rep.input_id, std::to_string(rep.clean_label),
                        rep.found ? "1" : "0",
                        rep.flipped_label ? std::to_string(*rep.flipped_label) : "",
                        std::to_string(rep.probes), std::to_string(rep.n_samples),
                        std::to_string(rep.seed)});
    }
    const double flip_ratio =
        static_cast<double>(flipped) / static_cast<double>(std::max<std::size_t>(1, reports.size()));
    json summary;
    summary["flip_ratio"] = flip_ratio;
    summary["inputs"] = reports.size();

    if (cfg.format == "csv")
        write_csv_report(
            cfg, {"id", "clean_label", "flipped", "flipped_label", "probes", "n_samples", "seed"},
            rows, summary);
    else
        write_json_report(cfg, records, summary);
    out << "attack: flip-ratio=" << format_double(flip_ratio) << " inputs=" << reports.size()
        << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const Dataset ds = load_dataset_manifest(cfg.dataset);
    const auto classifier = load_classifier(cfg.classifier_kind, cfg.weights);
    json records = json::array();
    std::vector<std::vector<std::string>> rows;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        const int label = predict_label(*classifier, ds.items[i].cloud);
        const bool ok = label == ds.items[i].label;
        if (ok) ++correct;
        json rec;
        rec["id"] = record_id(i);
        rec["true_label"] = ds.items[i].label;
        rec["label"] = label;
        rec["correct"] = ok;
        records.push_back(std::move(rec));
        rows.push_back({record_id(i), std::to_string(ds.items[i].label), std::to_string(label),
                        ok ? "1" : "0"});
    }
    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(std::max<std::size_t>(1, ds.items.size()));
    json summary;
    summary["accuracy"] = accuracy;
    summary["inputs"] = ds.items.size();
    if (cfg.format == "csv")
        write_csv_report(cfg, {"id", "true_label", "label", "correct"}, rows, summary);
    else
        write_json_report(cfg, records, summary);
    out << "eval: accuracy=" << format_double(accuracy) << " inputs=" << ds.items.size() << "\n";
    return 0;
}

void validate_config(const RunConfig& cfg) {
    const bool known = cfg.command == "train" || cfg.command == "certify" ||
                       cfg.command == "attack" || cfg.command == "gen-data" ||
                       cfg.command == "eval";
    if (!known) throw ConfigError("unknown command '" + cfg.command + "'");
    if (cfg.format != "json" && cfg.format != "csv")
        throw ConfigError("format must be json or csv");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");

    if (cfg.command == "gen-data") {
        if (cfg.out.empty()) throw ConfigError("gen-data requires out=<directory>");
        if (cfg.per_class < 1 || cfg.n_points < 1)
            throw ConfigError("per_class and n_points must be >= 1");
        return;
    }
    if (cfg.dataset.empty()) throw ConfigError("dataset manifest path is required");
    if (cfg.command == "eval") {
        if (cfg.classifier_kind.empty() || cfg.weights.empty())
            throw ConfigError("eval requires classifier and weights");
        if (cfg.out.empty()) throw ConfigError("eval requires out=<report path>");
        return;
    }
    if (cfg.command == "train") {
        if (cfg.weights.empty()) throw ConfigError("train requires weights=<output path>");
        if (cfg.classifier_kind != "tiny" && cfg.classifier_kind != "centroid")
            throw ConfigError("train supports classifier=tiny or classifier=centroid");
        if (cfg.classifier_kind == "tiny") {
            if (cfg.family.empty()) throw ConfigError("train requires an augmentation family");
            const FamilyPlan plan = plan_for(cfg.family);
            validate_sigma(plan, cfg);
            if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
            if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
        }
        return;
    }
    // certify / attack
    if (cfg.classifier_kind.empty() || cfg.weights.empty())
        throw ConfigError("certify/attack require classifier and weights");
    if (cfg.out.empty()) throw ConfigError("certify/attack require out=<report path>");
    if (cfg.family.empty()) throw ConfigError("family is required");
    const FamilyPlan plan = plan_for(cfg.family);
    validate_sigma(plan, cfg);
    if (cfg.radius.empty()) throw ConfigError("radius is required");
    for (double r : cfg.radius)
        if (!(r >= 0.0)) throw ConfigError("radius values must be >= 0");
    Region region = build_region(plan, cfg);
    check_region_kind_override(plan, region, cfg);
    if (plan.protocol == ProtocolKind::Sampled || plan.protocol == ProtocolKind::ZyxRotation) {
        if (cfg.grid_m < 1) throw ConfigError("grid_m must be >= 1");
        for (double r : cfg.radius)
            if (!(r > 0.0)) throw ConfigError("sampled protocols need positive ranges");
    }
    if (cfg.command == "attack") {
        if (cfg.attack_mode != "grid" && cfg.attack_mode != "random")
            throw ConfigError("attack_mode must be grid or random");
        if (cfg.attack_mode == "grid" && cfg.attack_resolution < 1)
            throw ConfigError("attack resolution must be >= 1");
        if (cfg.attack_mode == "random" && cfg.attack_probes < 1)
            throw ConfigError("attack probes must be >= 1");
    }
    if (cfg.rotation_bound != "standard" && cfg.rotation_bound != "tight")
        throw ConfigError("rotation_bound must be standard or tight");
}

} // namespace

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "command") c.command = value;
    else if (key == "dataset") c.dataset = value;
    else if (key == "classifier") c.classifier_kind = value;
    else if (key == "weights") c.weights = value;
    else if (key == "family") c.family = value;
    else if (key == "radius") c.radius = parse_scalar_list(value);
    else if (key == "region_kind") c.region_kind = value;
    else if (key == "sigma") c.sigma = parse_scalar_list(value);
    else if (key == "grid_m") c.grid_m = static_cast<int>(parse_int(value));
    else if (key == "samples") c.samples = parse_int(value);
    else if (key == "alpha") c.alpha = parse_scalar(value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "out") c.out = value;
    else if (key == "format") c.format = value;
    else if (key == "threads") c.threads = static_cast<int>(parse_int(value));
    else if (key == "timestamp") c.timestamp = value;
    else if (key == "epochs") c.epochs = static_cast<int>(parse_int(value));
    else if (key == "lr") c.learning_rate = parse_scalar(value);
    else if (key == "batch") c.batch_size = static_cast<int>(parse_int(value));
    else if (key == "h1") c.hidden1 = static_cast<int>(parse_int(value));
    else if (key == "h2") c.hidden2 = static_cast<int>(parse_int(value));
    else if (key == "h3") c.hidden3 = static_cast<int>(parse_int(value));
    else if (key == "classes") c.classes = value;
    else if (key == "per_class") c.per_class = static_cast<int>(parse_int(value));
    else if (key == "n_points") c.n_points = static_cast<int>(parse_int(value));
    else if (key == "noise_sd") c.noise_sd = parse_scalar(value);
    else if (key == "attack_mode") c.attack_mode = value;
    else if (key == "resolution") c.attack_resolution = static_cast<int>(parse_int(value));
    else if (key == "probes") c.attack_probes = parse_int(value);
    else if (key == "rotation_bound") c.rotation_bound = value;
    else if (key == "max_grid") c.max_grid = parse_int(value);
    else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    RunConfig cfg;
    std::string raw;
    long line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const auto begin = raw.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(raw.substr(0, eq));
        const std::string value = trim(raw.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate_config(cfg);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        if (cfg.command == "gen-data") return cmd_gen_data(cfg, out);
        if (cfg.command == "train") return cmd_train(cfg, out);
        if (cfg.command == "certify") return cmd_certify(cfg, out);
        if (cfg.command == "attack") return cmd_attack(cfg, out);
        return cmd_eval(cfg, out);
    } catch (const std::exception& e) {
        err << cfg.command << " failed: " << e.what() << "\n";
        return 3;
    }
}

} // namespace pointcert
