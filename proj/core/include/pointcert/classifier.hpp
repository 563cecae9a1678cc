#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "pointcert/geometry.hpp"
#include "pointcert/smoothing.hpp"

namespace pointcert {

/// A base classifier maps a cloud to a probability vector. Implementations
/// must be pure: the same cloud always yields the same output.
class BaseClassifier {
public:
    virtual ~BaseClassifier() = default;
    virtual int num_classes() const = 0;
    virtual std::vector<double> evaluate(const PointCloud& cloud) const = 0;
};

/// Argmax label with ties broken toward the lowest class index.
int predict_label(const BaseClassifier& classifier, const PointCloud& cloud);

/// Two-class classifier with a closed-form decision statistic
/// s(x) = direction . centroid(x). Class 1 probability is
/// logistic(sharpness * (s - threshold)); an infinite sharpness gives a hard
/// step. Smoothed probabilities under one-parameter smoothing are exactly
/// computable by quadrature, which makes this the ground-truth model for
/// soundness tests.
class AnalyticOracle final : public BaseClassifier {
public:
    AnalyticOracle(Vec3 direction, double threshold, double sharpness);

    int num_classes() const override { return 2; }
    std::vector<double> evaluate(const PointCloud& cloud) const override;

    double statistic(const PointCloud& cloud) const;
    Vec3 direction() const { return direction_; }
    double threshold() const { return threshold_; }
    double sharpness() const { return sharpness_; }

private:
    Vec3 direction_;
    double threshold_;
    double sharpness_;
};

/// Nearest-centroid model over rotation-invariant summary features
/// (moments of point norms, z and axial distance). Probabilities are a
/// softmax over negative squared feature distances.
class CentroidModel final : public BaseClassifier {
public:
    static CentroidModel fit(const Dataset& dataset, double temperature = 0.1);

    int num_classes() const override { return static_cast<int>(centroids_.size()); }
    std::vector<double> evaluate(const PointCloud& cloud) const override;

    static std::vector<double> features(const PointCloud& cloud);
    static constexpr int kFeatureDim = 6;

    std::size_t expected_points() const { return n_points_; }
    double temperature() const { return temperature_; }
    const std::vector<std::vector<double>>& centroids() const { return centroids_; }

    CentroidModel(std::vector<std::vector<double>> centroids, std::size_t n_points,
                  double temperature);

private:
    std::vector<std::vector<double>> centroids_;
    std::size_t n_points_ = 0;
    double temperature_ = 0.1;
};

struct TinyPointNetConfig {
    int hidden1 = 32;
    int hidden2 = 64;
    int hidden3 = 32;
};

/// Small point network: shared per-point MLP (3 -> H1 -> H2, ReLU), max-pool
/// over points, head MLP (H2 -> H3 -> C), softmax output. Max pooling makes
/// the output exactly invariant to point permutations and independent of the
/// point count.
class TinyPointNet final : public BaseClassifier {
public:
    TinyPointNet(int num_classes, const TinyPointNetConfig& config, std::uint64_t seed);

    int num_classes() const override { return num_classes_; }
    std::vector<double> evaluate(const PointCloud& cloud) const override;

    const TinyPointNetConfig& config() const { return config_; }
    std::uint64_t init_seed() const { return init_seed_; }
    std::int64_t trained_examples() const { return trained_examples_; }

    /// Flat weight vector (layer order w1, b1, w2, b2, w3, b3, w4, b4).
    std::vector<double> flat_weights() const;
    void set_flat_weights(const std::vector<double>& w);
    std::size_t weight_count() const;

    /// Mean cross-entropy over a batch.
    double batch_loss(const std::vector<const PointCloud*>& clouds,
                      const std::vector<int>& labels) const;
    /// Gradient of batch_loss in flat_weights() order.
    std::vector<double> batch_gradient(const std::vector<const PointCloud*>& clouds,
                                       const std::vector<int>& labels) const;

    void note_trained_examples(std::int64_t n) { trained_examples_ = n; }

private:
    friend TinyPointNet train_augmented(const Dataset&, const SmoothingSpec&, int, double,
                                        std::uint64_t, const TinyPointNetConfig&, int);

    int num_classes_;
    TinyPointNetConfig config_;
    std::uint64_t init_seed_;
    std::int64_t trained_examples_ = 0;
    std::vector<double> w1_, b1_, w2_, b2_, w3_, b3_, w4_, b4_;
};

/// Minibatch gradient descent with a fixed learning rate. Every minibatch
/// cloud is transformed by a parameter drawn from `augmentation` before the
/// gradient step. Single-threaded and bit-reproducible for a given seed;
/// epochs = 0 returns the seeded initialization unchanged. A non-finite
/// loss raises TrainingError with the epoch index.
TinyPointNet train_augmented(const Dataset& dataset, const SmoothingSpec& augmentation,
                             int epochs, double learning_rate, std::uint64_t seed,
                             const TinyPointNetConfig& config = {}, int batch_size = 16);

/// Fraction of items whose argmax matches the label.
double dataset_accuracy(const BaseClassifier& classifier, const Dataset& dataset);

/// JSON weight files; the round trip is exact on all weights.
void save_weights(const TinyPointNet& net, const std::filesystem::path& path);
TinyPointNet load_weights(const std::filesystem::path& path);
/// Loads and additionally checks the class count against the caller's.
TinyPointNet load_weights(const std::filesystem::path& path, int expected_classes);

void save_centroid_model(const CentroidModel& model, const std::filesystem::path& path);
CentroidModel load_centroid_model(const std::filesystem::path& path);

void save_oracle(const AnalyticOracle& oracle, const std::filesystem::path& path);
AnalyticOracle load_oracle(const std::filesystem::path& path);

/// Loads a classifier by kind name: "tiny", "centroid" or "oracle".
std::unique_ptr<BaseClassifier> load_classifier(const std::string& kind,
                                                const std::filesystem::path& path);

} // namespace pointcert
