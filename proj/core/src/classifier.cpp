#include "pointcert/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pointcert/errors.hpp"
#include "pointcert/rng.hpp"

namespace pointcert {

int predict_label(const BaseClassifier& classifier, const PointCloud& cloud) {
    return argmax_lowest(classifier.evaluate(cloud));
}

// ---------------------------------------------------------------------------
// AnalyticOracle

AnalyticOracle::AnalyticOracle(Vec3 direction, double threshold, double sharpness)
    : direction_(direction), threshold_(threshold), sharpness_(sharpness) {
    if (!direction.finite() || direction.norm() == 0.0)
        throw InvalidInput("oracle direction must be a finite nonzero vector");
    if (!std::isfinite(threshold)) throw InvalidInput("oracle threshold must be finite");
    if (std::isnan(sharpness) || sharpness <= 0.0)
        throw InvalidInput("oracle sharpness must be positive");
}

double AnalyticOracle::statistic(const PointCloud& cloud) const {
    return direction_.dot(cloud.centroid());
}

std::vector<double> AnalyticOracle::evaluate(const PointCloud& cloud) const {
    const double s = statistic(cloud) - threshold_;
    double p1;
    if (std::isinf(sharpness_)) {
        p1 = s > 0.0 ? 1.0 : (s < 0.0 ? 0.0 : 0.5);
    } else {
        p1 = 1.0 / (1.0 + std::exp(-sharpness_ * s));
    }
    return {1.0 - p1, p1};
}

// ---------------------------------------------------------------------------
// CentroidModel

std::vector<double> CentroidModel::features(const PointCloud& cloud) {
    if (cloud.size() == 0) throw InvalidInput("features: empty cloud");
    const double n = static_cast<double>(cloud.size());
    double sum_norm = 0, sum_norm2 = 0, sum_abs_z = 0, sum_z = 0, sum_z2 = 0, sum_r = 0,
           sum_r2 = 0;
    for (const Vec3& p : cloud.points) {
        const double nn = p.norm();
        const double r = std::sqrt(p.x * p.x + p.y * p.y);
        sum_norm += nn;
        sum_norm2 += nn * nn;
        sum_abs_z += std::fabs(p.z);
        sum_z += p.z;
        sum_z2 += p.z * p.z;
        sum_r += r;
        sum_r2 += r * r;
    }
    const auto sd = [n](double sum, double sum2) {
        const double mean = sum / n;
        return std::sqrt(std::max(0.0, sum2 / n - mean * mean));
    };
    return {sum_norm / n, sd(sum_norm, sum_norm2), sum_abs_z / n,
            sd(sum_z, sum_z2), sum_r / n,           sd(sum_r, sum_r2)};
}

CentroidModel::CentroidModel(std::vector<std::vector<double>> centroids, std::size_t n_points,
                             double temperature)
    : centroids_(std::move(centroids)), n_points_(n_points), temperature_(temperature) {
    if (centroids_.size() < 2) throw InvalidInput("centroid model needs at least 2 classes");
    for (const auto& c : centroids_)
        if (c.size() != kFeatureDim) throw InvalidInput("centroid feature size mismatch");
    if (!(temperature_ > 0.0)) throw InvalidInput("centroid temperature must be positive");
}

CentroidModel CentroidModel::fit(const Dataset& dataset, double temperature) {
    if (dataset.num_classes() < 2) throw InvalidInput("fit: dataset needs at least 2 classes");
    if (dataset.items.empty()) throw InvalidInput("fit: empty dataset");
    const std::size_t n_points = dataset.items.front().cloud.size();
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(dataset.num_classes()),
                                          std::vector<double>(kFeatureDim, 0.0));
    std::vector<int> counts(static_cast<std::size_t>(dataset.num_classes()), 0);
    for (const LabeledCloud& item : dataset.items) {
        if (item.cloud.size() != n_points)
            throw InvalidInput("fit: items have differing point counts");
        if (item.label < 0 || item.label >= dataset.num_classes())
            throw InvalidInput("fit: label out of range");
        const auto f = features(item.cloud);
        auto& s = sums[static_cast<std::size_t>(item.label)];
        for (int d = 0; d < kFeatureDim; ++d) s[static_cast<std::size_t>(d)] += f[static_cast<std::size_t>(d)];
        ++counts[static_cast<std::size_t>(item.label)];
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (counts[c] == 0) throw InvalidInput("fit: class without examples");
        for (double& v : sums[c]) v /= counts[c];
    }
    return CentroidModel(std::move(sums), n_points, temperature);
}

std::vector<double> CentroidModel::evaluate(const PointCloud& cloud) const {
    if (cloud.size() != n_points_)
        throw InvalidInput("centroid model expects " + std::to_string(n_points_) + " points");
    const auto f = features(cloud);
    std::vector<double> logits(centroids_.size());
    for (std::size_t c = 0; c < centroids_.size(); ++c) {
        double d2 = 0.0;
        for (int d = 0; d < kFeatureDim; ++d) {
            const double diff = f[static_cast<std::size_t>(d)] - centroids_[c][static_cast<std::size_t>(d)];
            d2 += diff * diff;
        }
        logits[c] = -d2 / (2.0 * temperature_ * temperature_);
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
        l = std::exp(l - mx);
        sum += l;
    }
    for (double& l : logits) l /= sum;
    return logits;
}

// ---------------------------------------------------------------------------
// TinyPointNet

namespace {

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

void xavier_fill(std::vector<double>& w, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : w) v = rng.uniform(-limit, limit);
}

// Dense layer y = W x + b with W stored row-major (rows x cols).
inline void affine(const std::vector<double>& w, const std::vector<double>& b, int rows,
                   int cols, const double* x, double* y) {
    for (int i = 0; i < rows; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        const double* wr = w.data() + static_cast<std::ptrdiff_t>(i) * cols;
        for (int j = 0; j < cols; ++j) s += wr[j] * x[j];
        y[i] = s;
    }
}

} // namespace

TinyPointNet::TinyPointNet(int num_classes, const TinyPointNetConfig& config, std::uint64_t seed)
    : num_classes_(num_classes), config_(config), init_seed_(seed) {
    if (num_classes < 2) throw InvalidInput("TinyPointNet needs at least 2 classes");
    if (config.hidden1 < 1 || config.hidden2 < 1 || config.hidden3 < 1)
        throw InvalidInput("TinyPointNet hidden sizes must be positive");
    const int h1 = config.hidden1, h2 = config.hidden2, h3 = config.hidden3;
    w1_.resize(static_cast<std::size_t>(h1) * 3);
    b1_.assign(static_cast<std::size_t>(h1), 0.0);
    w2_.resize(static_cast<std::size_t>(h2) * h1);
    b2_.assign(static_cast<std::size_t>(h2), 0.0);
    w3_.resize(static_cast<std::size_t>(h3) * h2);
    b3_.assign(static_cast<std::size_t>(h3), 0.0);
    w4_.resize(static_cast<std::size_t>(num_classes) * h3);
    b4_.assign(static_cast<std::size_t>(num_classes), 0.0);
    Rng rng(seed);
    xavier_fill(w1_, 3, h1, rng);
    xavier_fill(w2_, h1, h2, rng);
    xavier_fill(w3_, h2, h3, rng);
    xavier_fill(w4_, h3, num_classes, rng);
}

std::vector<double> TinyPointNet::evaluate(const PointCloud& cloud) const {
    if (cloud.size() == 0) throw InvalidInput("TinyPointNet: empty cloud");
    const int h1 = config_.hidden1, h2 = config_.hidden2, h3 = config_.hidden3;
    std::vector<double> a1(static_cast<std::size_t>(h1));
    std::vector<double> a2(static_cast<std::size_t>(h2));
    std::vector<double> pooled(static_cast<std::size_t>(h2),
                               -std::numeric_limits<double>::infinity());
    for (const Vec3& p : cloud.points) {
        const double xyz[3] = {p.x, p.y, p.z};
        affine(w1_, b1_, h1, 3, xyz, a1.data());
        for (double& v : a1) v = relu(v);
        affine(w2_, b2_, h2, h1, a1.data(), a2.data());
        for (int k = 0; k < h2; ++k) {
            const double v = relu(a2[static_cast<std::size_t>(k)]);
            if (v > pooled[static_cast<std::size_t>(k)]) pooled[static_cast<std::size_t>(k)] = v;
        }
    }
    std::vector<double> a3(static_cast<std::size_t>(h3));
    affine(w3_, b3_, h3, h2, pooled.data(), a3.data());
    for (double& v : a3) v = relu(v);
    std::vector<double> logits(static_cast<std::size_t>(num_classes_));
    affine(w4_, b4_, num_classes_, h3, a3.data(), logits.data());
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& l : logits) {
        l = std::exp(l - mx);
        sum += l;
    }
    for (double& l : logits) l /= sum;
    return logits;
}

std::size_t TinyPointNet::weight_count() const {
    return w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() + b3_.size() +
           w4_.size() + b4_.size();
}

std::vector<double> TinyPointNet::flat_weights() const {
    std::vector<double> out;
    out.reserve(weight_count());
    for (const auto* v : {&w1_, &b1_, &w2_, &b2_, &w3_, &b3_, &w4_, &b4_})
        out.insert(out.end(), v->begin(), v->end());
    return out;
}

void TinyPointNet::set_flat_weights(const std::vector<double>& w) {
    if (w.size() != weight_count()) throw InvalidInput("flat weight size mismatch");
    std::size_t off = 0;
    for (auto* v : {&w1_, &b1_, &w2_, &b2_, &w3_, &b3_, &w4_, &b4_}) {
        std::copy(w.begin() + static_cast<std::ptrdiff_t>(off),
                  w.begin() + static_cast<std::ptrdiff_t>(off + v->size()), v->begin());
        off += v->size();
    }
}

namespace {

struct GradAccum {
    std::vector<double> w1, b1, w2, b2, w3, b3, w4, b4;
};

} // namespace

double TinyPointNet::batch_loss(const std::vector<const PointCloud*>& clouds,
                                const std::vector<int>& labels) const {
    if (clouds.size() != labels.size() || clouds.empty())
        throw InvalidInput("batch_loss: clouds/labels mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < clouds.size(); ++i) {
        const auto probs = evaluate(*clouds[i]);
        const int y = labels[i];
        if (y < 0 || y >= num_classes_) throw InvalidInput("batch_loss: label out of range");
        total += -std::log(std::max(probs[static_cast<std::size_t>(y)], 1e-300));
    }
    return total / static_cast<double>(clouds.size());
}

std::vector<double> TinyPointNet::batch_gradient(const std::vector<const PointCloud*>& clouds,
                                                 const std::vector<int>& labels) const {
    if (clouds.size() != labels.size() || clouds.empty())
        throw InvalidInput("batch_gradient: clouds/labels mismatch");
    const int h1 = config_.hidden1, h2 = config_.hidden2, h3 = config_.hidden3;
    const int c = num_classes_;
    GradAccum g;
    g.w1.assign(w1_.size(), 0.0);
    g.b1.assign(b1_.size(), 0.0);
    g.w2.assign(w2_.size(), 0.0);
    g.b2.assign(b2_.size(), 0.0);
    g.w3.assign(w3_.size(), 0.0);
    g.b3.assign(b3_.size(), 0.0);
    g.w4.assign(w4_.size(), 0.0);
    g.b4.assign(b4_.size(), 0.0);

    std::vector<double> z1, a1_all, z2_all; // per-point activations of one cloud
    for (std::size_t item = 0; item < clouds.size(); ++item) {
        const PointCloud& cloud = *clouds[item];
        const int y = labels[item];
        if (y < 0 || y >= c) throw InvalidInput("batch_gradient: label out of range");
        const std::size_t n = cloud.size();
        if (n == 0) throw InvalidInput("batch_gradient: empty cloud");

        a1_all.assign(n * static_cast<std::size_t>(h1), 0.0);
        z2_all.assign(n * static_cast<std::size_t>(h2), 0.0);
        std::vector<double> pooled(static_cast<std::size_t>(h2),
                                   -std::numeric_limits<double>::infinity());
        std::vector<std::size_t> pool_src(static_cast<std::size_t>(h2), 0);
        z1.assign(static_cast<std::size_t>(h1), 0.0);

        for (std::size_t pt = 0; pt < n; ++pt) {
            const Vec3& p = cloud.points[pt];
            const double xyz[3] = {p.x, p.y, p.z};
            affine(w1_, b1_, h1, 3, xyz, z1.data());
            double* a1 = a1_all.data() + pt * static_cast<std::size_t>(h1);
            for (int i = 0; i < h1; ++i) a1[i] = relu(z1[static_cast<std::size_t>(i)]);
            double* z2 = z2_all.data() + pt * static_cast<std::size_t>(h2);
            affine(w2_, b2_, h2, h1, a1, z2);
            for (int k = 0; k < h2; ++k) {
                const double v = relu(z2[k]);
                if (v > pooled[static_cast<std::size_t>(k)]) {
                    pooled[static_cast<std::size_t>(k)] = v;
                    pool_src[static_cast<std::size_t>(k)] = pt;
                }
            }
        }

        std::vector<double> z3(static_cast<std::size_t>(h3));
        affine(w3_, b3_, h3, h2, pooled.data(), z3.data());
        std::vector<double> a3(static_cast<std::size_t>(h3));
        for (int i = 0; i < h3; ++i) a3[static_cast<std::size_t>(i)] = relu(z3[static_cast<std::size_t>(i)]);
        std::vector<double> logits(static_cast<std::size_t>(c));
        affine(w4_, b4_, c, h3, a3.data(), logits.data());
        const double mx = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        std::vector<double> probs(static_cast<std::size_t>(c));
        for (int i = 0; i < c; ++i) {
            probs[static_cast<std::size_t>(i)] = std::exp(logits[static_cast<std::size_t>(i)] - mx);
            sum += probs[static_cast<std::size_t>(i)];
        }
        for (double& v : probs) v /= sum;

        // dlogits = probs - onehot(y), averaged over the batch later.
        std::vector<double> dlogits = probs;
        dlogits[static_cast<std::size_t>(y)] -= 1.0;

        std::vector<double> da3(static_cast<std::size_t>(h3), 0.0);
        for (int i = 0; i < c; ++i) {
            const double d = dlogits[static_cast<std::size_t>(i)];
            g.b4[static_cast<std::size_t>(i)] += d;
            double* wr = g.w4.data() + static_cast<std::ptrdiff_t>(i) * h3;
            const double* w4r = w4_.data() + static_cast<std::ptrdiff_t>(i) * h3;
            for (int j = 0; j < h3; ++j) {
                wr[j] += d * a3[static_cast<std::size_t>(j)];
                da3[static_cast<std::size_t>(j)] += d * w4r[j];
            }
        }

        std::vector<double> dpooled(static_cast<std::size_t>(h2), 0.0);
        for (int i = 0; i < h3; ++i) {
            const double dz = z3[static_cast<std::size_t>(i)] > 0.0 ? da3[static_cast<std::size_t>(i)] : 0.0;
            if (dz == 0.0) continue;
            g.b3[static_cast<std::size_t>(i)] += dz;
            double* wr = g.w3.data() + static_cast<std::ptrdiff_t>(i) * h2;
            const double* w3r = w3_.data() + static_cast<std::ptrdiff_t>(i) * h2;
            for (int j = 0; j < h2; ++j) {
                wr[j] += dz * pooled[static_cast<std::size_t>(j)];
                dpooled[static_cast<std::size_t>(j)] += dz * w3r[j];
            }
        }

        // Pool gradient routes to the winning point of each channel.
        std::vector<double> da1(static_cast<std::size_t>(h1));
        for (std::size_t pt = 0; pt < n; ++pt) {
            std::fill(da1.begin(), da1.end(), 0.0);
            bool touched = false;
            const double* z2 = z2_all.data() + pt * static_cast<std::size_t>(h2);
            const double* a1 = a1_all.data() + pt * static_cast<std::size_t>(h1);
            for (int k = 0; k < h2; ++k) {
                if (pool_src[static_cast<std::size_t>(k)] != pt) continue;
                const double dz = z2[k] > 0.0 ? dpooled[static_cast<std::size_t>(k)] : 0.0;
                if (dz == 0.0) continue;
                touched = true;
                g.b2[static_cast<std::size_t>(k)] += dz;
                double* wr = g.w2.data() + static_cast<std::ptrdiff_t>(k) * h1;
                const double* w2r = w2_.data() + static_cast<std::ptrdiff_t>(k) * h1;
                for (int j = 0; j < h1; ++j) {
                    wr[j] += dz * a1[j];
                    da1[static_cast<std::size_t>(j)] += dz * w2r[j];
                }
            }
            if (!touched) continue;
            const Vec3& p = cloud.points[pt];
            const double xyz[3] = {p.x, p.y, p.z};
            for (int i = 0; i < h1; ++i) {
                const double dz = a1[i] > 0.0 ? da1[static_cast<std::size_t>(i)] : 0.0;
                if (dz == 0.0) continue;
                g.b1[static_cast<std::size_t>(i)] += dz;
                double* wr = g.w1.data() + static_cast<std::ptrdiff_t>(i) * 3;
                for (int j = 0; j < 3; ++j) wr[j] += dz * xyz[j];
            }
        }
    }

    const double inv = 1.0 / static_cast<double>(clouds.size());
    std::vector<double> out;
    out.reserve(weight_count());
    for (const auto* v : {&g.w1, &g.b1, &g.w2, &g.b2, &g.w3, &g.b3, &g.w4, &g.b4})
        for (double x : *v) out.push_back(x * inv);
    return out;
}

TinyPointNet train_augmented(const Dataset& dataset, const SmoothingSpec& augmentation,
                             int epochs, double learning_rate, std::uint64_t seed,
                             const TinyPointNetConfig& config, int batch_size) {
    if (dataset.num_classes() < 2) throw InvalidInput("train_augmented: needs >= 2 classes");
    if (dataset.items.empty()) throw InvalidInput("train_augmented: empty dataset");
    if (epochs < 0) throw InvalidInput("train_augmented: negative epochs");
    if (batch_size < 1) throw InvalidInput("train_augmented: batch size must be >= 1");
    augmentation.validate();

    TinyPointNet net(dataset.num_classes(), config, mix_seed(seed, 0));
    if (epochs == 0) return net;

    std::vector<double> weights = net.flat_weights();
    std::vector<std::size_t> order(dataset.items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::int64_t seen = 0;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng rng(mix_seed(seed, 1 + static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_below(i))]);

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(batch_size));
            std::vector<PointCloud> augmented;
            std::vector<const PointCloud*> clouds;
            std::vector<int> labels;
            augmented.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                const LabeledCloud& item = dataset.items[order[i]];
                const TransformParam param =
                    sample_smoothing_param(augmentation, item.cloud.size(), rng);
                augmented.push_back(apply_transform(param, item.cloud));
                labels.push_back(item.label);
            }
            for (const PointCloud& c : augmented) clouds.push_back(&c);

            const double loss = net.batch_loss(clouds, labels);
            if (!std::isfinite(loss)) throw TrainingError("training loss diverged", epoch);
            const auto grad = net.batch_gradient(clouds, labels);
            for (std::size_t k = 0; k < weights.size(); ++k)
                weights[k] -= learning_rate * grad[k];
            net.set_flat_weights(weights);
            seen += static_cast<std::int64_t>(stop - start);
        }
    }
    net.note_trained_examples(seen);
    return net;
}

double dataset_accuracy(const BaseClassifier& classifier, const Dataset& dataset) {
    if (dataset.items.empty()) throw InvalidInput("dataset_accuracy: empty dataset");
    int correct = 0;
    for (const LabeledCloud& item : dataset.items)
        if (predict_label(classifier, item.cloud) == item.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(dataset.items.size());
}

} // namespace pointcert
