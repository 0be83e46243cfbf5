#include "gazeshutter/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/dataset.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/hash.hpp"
#include "gazeshutter/rng.hpp"

namespace gazeshutter {

using nlohmann::json;

namespace {

constexpr int kGrid = 4;
constexpr int kColorBins = 48;  // 4 x 4 x 3 joint RGB quantization
constexpr int kGradientBins = 16;
constexpr int kCellDim = kColorBins + kGradientBins;

void l1_normalize(std::span<double> block) {
    double sum = 0.0;
    for (double v : block) sum += v;
    if (sum <= 0.0) return;
    for (double& v : block) v /= sum;
}

}  // namespace

SceneDescriptor base_descriptor_rgb(std::span<const std::uint8_t> rgb, int width, int height) {
    if (width <= 0 || height <= 0 || rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw DataError("descriptor input is not a packed RGB buffer");

    SceneDescriptor d{};
    auto cell_of = [&](int x, int y) {
        const int cx = std::min(x * kGrid / width, kGrid - 1);
        const int cy = std::min(y * kGrid / height, kGrid - 1);
        return cy * kGrid + cx;
    };

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t px = (static_cast<std::size_t>(y) * width + x) * 3;
            const int rq = rgb[px] * 4 / 256;
            const int gq = rgb[px + 1] * 4 / 256;
            const int bq = rgb[px + 2] * 3 / 256;
            const int bin = (rq * 4 + gq) * 3 + bq;
            d[static_cast<std::size_t>(cell_of(x, y)) * kCellDim + bin] += 1.0;
        }
    }

    // Gradient orientation over the grayscale interior, magnitude weighted.
    auto gray = [&](int x, int y) {
        const std::size_t px = (static_cast<std::size_t>(y) * width + x) * 3;
        return 0.299 * rgb[px] + 0.587 * rgb[px + 1] + 0.114 * rgb[px + 2];
    };
    constexpr double kPi = 3.141592653589793;
    for (int y = 1; y + 1 < height; ++y) {
        for (int x = 1; x + 1 < width; ++x) {
            const double gx = 0.5 * (gray(x + 1, y) - gray(x - 1, y));
            const double gy = 0.5 * (gray(x, y + 1) - gray(x, y - 1));
            const double magnitude = std::hypot(gx, gy);
            if (magnitude <= 1e-12) continue;
            const double angle = std::atan2(gy, gx);  // [-pi, pi]
            int bin = static_cast<int>((angle + kPi) / (2.0 * kPi) * kGradientBins);
            bin = std::clamp(bin, 0, kGradientBins - 1);
            d[static_cast<std::size_t>(cell_of(x, y)) * kCellDim + kColorBins + bin] += magnitude;
        }
    }

    for (int cell = 0; cell < kGrid * kGrid; ++cell) {
        auto* base = d.data() + static_cast<std::size_t>(cell) * kCellDim;
        l1_normalize({base, kColorBins});
        l1_normalize({base + kColorBins, kGradientBins});
    }
    return d;
}

SceneModel SceneModel::zeros() {
    SceneModel m;
    m.w1.assign(kEmbeddingDim * kDescriptorDim, 0.0);
    m.b1.assign(kEmbeddingDim, 0.0);
    m.w2.assign(2 * kEmbeddingDim, 0.0);
    m.b2.assign(2, 0.0);
    return m;
}

namespace {

void check_shapes(const SceneModel& m) {
    if (m.w1.size() != kEmbeddingDim * kDescriptorDim || m.b1.size() != kEmbeddingDim ||
        m.w2.size() != 2 * kEmbeddingDim || m.b2.size() != 2)
        throw DataError("scene model has wrong parameter shapes");
}

struct ForwardState {
    std::array<double, kEmbeddingDim> pre{};  // bottleneck pre-activation
    Embedding68 embedding{};
    std::array<double, 2> logits{};
    std::array<double, 2> probabilities{};
};

ForwardState forward_full(const SceneModel& m, const SceneDescriptor& d) {
    ForwardState s;
    for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
        double z = m.b1[j];
        const double* row = m.w1.data() + j * kDescriptorDim;
        for (std::size_t k = 0; k < kDescriptorDim; ++k) z += row[k] * d[k];
        s.pre[j] = z;
        s.embedding[j] = z > 0.0 ? z : 0.0;
    }
    for (std::size_t i = 0; i < 2; ++i) {
        double z = m.b2[i];
        const double* row = m.w2.data() + i * kEmbeddingDim;
        for (std::size_t j = 0; j < kEmbeddingDim; ++j) z += row[j] * s.embedding[j];
        s.logits[i] = z;
    }
    const double mx = std::max(s.logits[0], s.logits[1]);
    const double e0 = std::exp(s.logits[0] - mx);
    const double e1 = std::exp(s.logits[1] - mx);
    s.probabilities[0] = e0 / (e0 + e1);
    s.probabilities[1] = e1 / (e0 + e1);
    return s;
}

SceneGradients zero_gradients() {
    SceneGradients g;
    g.w1.assign(kEmbeddingDim * kDescriptorDim, 0.0);
    g.b1.assign(kEmbeddingDim, 0.0);
    g.w2.assign(2 * kEmbeddingDim, 0.0);
    g.b2.assign(2, 0.0);
    return g;
}

// Mean cross-entropy and its gradient in one pass.
double loss_and_gradients(const SceneModel& m, std::span<const LabeledDescriptor> samples,
                          SceneGradients& g) {
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (const auto& sample : samples) {
        const ForwardState s = forward_full(m, sample.descriptor);
        const auto target = static_cast<std::size_t>(sample.label);
        loss += -std::log(std::max(s.probabilities[target], 1e-300));

        std::array<double, 2> dlogits = s.probabilities;
        dlogits[target] -= 1.0;
        std::array<double, kEmbeddingDim> dembedding{};
        for (std::size_t i = 0; i < 2; ++i) {
            const double di = dlogits[i] * inv_n;
            g.b2[i] += di;
            double* w2_row = g.w2.data() + i * kEmbeddingDim;
            const double* m2_row = m.w2.data() + i * kEmbeddingDim;
            for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
                w2_row[j] += di * s.embedding[j];
                dembedding[j] += dlogits[i] * m2_row[j];
            }
        }
        for (std::size_t j = 0; j < kEmbeddingDim; ++j) {
            if (s.pre[j] <= 0.0) continue;
            const double dj = dembedding[j] * inv_n;
            g.b1[j] += dj;
            double* w1_row = g.w1.data() + j * kDescriptorDim;
            for (std::size_t k = 0; k < kDescriptorDim; ++k)
                w1_row[k] += dj * sample.descriptor[k];
        }
    }
    return loss * inv_n;
}

void axpy(std::vector<double>& x, const std::vector<double>& g, double a) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * g[i];
}

std::uint64_t fingerprint_samples(std::span<const LabeledDescriptor> samples) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : samples) {
        h = fnv1a_doubles({s.descriptor.data(), s.descriptor.size()}, h);
        const double label = static_cast<double>(s.label);
        h = fnv1a_doubles({&label, 1}, h);
    }
    return h;
}

}  // namespace

SceneForward forward(const SceneModel& model, const SceneDescriptor& descriptor) {
    check_shapes(model);
    const ForwardState s = forward_full(model, descriptor);
    return {s.embedding, s.probabilities};
}

double cross_entropy(const SceneModel& model, std::span<const LabeledDescriptor> samples) {
    check_shapes(model);
    if (samples.empty()) throw DataError("cross-entropy over an empty sample set");
    double loss = 0.0;
    for (const auto& sample : samples) {
        const ForwardState s = forward_full(model, sample.descriptor);
        loss += -std::log(std::max(s.probabilities[static_cast<std::size_t>(sample.label)], 1e-300));
    }
    return loss / static_cast<double>(samples.size());
}

SceneGradients cross_entropy_gradients(const SceneModel& model,
                                       std::span<const LabeledDescriptor> samples) {
    check_shapes(model);
    if (samples.empty()) throw DataError("gradient over an empty sample set");
    SceneGradients g = zero_gradients();
    loss_and_gradients(model, samples, g);
    return g;
}

SceneModel train_scene_model(std::span<const LabeledDescriptor> samples, int epochs,
                             double learning_rate, std::uint64_t seed) {
    std::size_t n_sensitive = 0;
    for (const auto& s : samples)
        if (s.label == PrivacyClass::Sensitive) ++n_sensitive;
    if (n_sensitive == 0 || n_sensitive == samples.size())
        throw TrainingError("scene model training needs both classes present");

    SceneModel m = SceneModel::zeros();
    Rng rng(seed);
    for (double& w : m.w1) w = rng.uniform(-0.01, 0.01);
    for (double& w : m.b1) w = rng.uniform(-0.01, 0.01);
    for (double& w : m.w2) w = rng.uniform(-0.01, 0.01);
    for (double& w : m.b2) w = rng.uniform(-0.01, 0.01);
    m.epochs = epochs;
    m.learning_rate = learning_rate;
    m.seed = seed;
    m.train_fingerprint = fingerprint_samples(samples);

    double lr = learning_rate;
    SceneGradients g = zero_gradients();
    for (int epoch = 0; epoch < epochs && lr > 1e-12; ++epoch) {
        std::fill(g.w1.begin(), g.w1.end(), 0.0);
        std::fill(g.b1.begin(), g.b1.end(), 0.0);
        std::fill(g.w2.begin(), g.w2.end(), 0.0);
        std::fill(g.b2.begin(), g.b2.end(), 0.0);
        const double loss = loss_and_gradients(m, samples, g);

        while (lr > 1e-12) {
            axpy(m.w1, g.w1, -lr);
            axpy(m.b1, g.b1, -lr);
            axpy(m.w2, g.w2, -lr);
            axpy(m.b2, g.b2, -lr);
            if (cross_entropy(m, samples) <= loss + 1e-6) break;
            // revert and retry with a smaller step
            axpy(m.w1, g.w1, lr);
            axpy(m.b1, g.b1, lr);
            axpy(m.w2, g.w2, lr);
            axpy(m.b2, g.b2, lr);
            lr *= 0.5;
        }
    }
    return m;
}

std::pair<PrivacyClass, double> cnn_direct_classify(const SceneModel& model,
                                                    const SceneDescriptor& descriptor) {
    const double score = forward(model, descriptor).probabilities[0];
    return {score >= 0.5 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive, score};
}

SegmentSamples sample_segment_images(const Recording& recording, std::uint64_t seed, int cutoff) {
    if (recording.annotations.empty()) throw DataError("recording has no annotation segments");

    // Merge consecutive segments with identical annotation into maximal ones.
    struct Span {
        double start, end;
        int level;
    };
    std::vector<Span> merged;
    for (std::size_t i = 0; i < recording.annotations.size(); ++i) {
        const auto& seg = recording.annotations[i];
        if (i > 0) {
            const auto& prev = recording.annotations[i - 1];
            if (prev.environment == seg.environment && prev.activity == seg.activity &&
                prev.privacy_level == seg.privacy_level) {
                merged.back().end = seg.end;
                continue;
            }
        }
        merged.push_back({seg.start, seg.end, seg.privacy_level});
    }

    SegmentSamples out;
    Rng rng(seed);
    for (const auto& span : merged) {
        std::vector<std::size_t> frames;
        for (std::size_t i = 0; i < recording.scene.size(); ++i)
            if (recording.scene[i].t >= span.start && recording.scene[i].t < span.end)
                frames.push_back(i);
        if (frames.empty()) {
            ++out.skipped_segments;
            continue;
        }
        const std::size_t pick = frames[rng.uniform_below(frames.size())];
        out.samples.push_back(
            {recording.scene[pick].descriptor, label_from_level(span.level, cutoff)});
    }
    return out;
}

void save_scene_model(const SceneModel& model, const std::filesystem::path& path) {
    check_shapes(model);
    json j;
    j["format"] = "scene-model";
    j["version"] = 1;
    j["shape"] = {{"descriptor", kDescriptorDim}, {"embedding", kEmbeddingDim}, {"classes", 2}};
    j["w1"] = model.w1;
    j["b1"] = model.b1;
    j["w2"] = model.w2;
    j["b2"] = model.b2;
    j["epochs"] = model.epochs;
    j["learning_rate"] = model.learning_rate;
    j["seed"] = model.seed;
    j["train_fingerprint"] = model.train_fingerprint;
    auto out = open_output(path);
    out << j.dump() << '\n';
}

SceneModel load_scene_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "scene-model" || j.value("version", 0) != 1)
        throw DataError(path.string() + ": not a version-1 scene model file");
    if (j["shape"]["descriptor"] != kDescriptorDim || j["shape"]["embedding"] != kEmbeddingDim ||
        j["shape"]["classes"] != 2)
        throw DataError(path.string() + ": unexpected model shape header");

    SceneModel m;
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();
    m.epochs = j.value("epochs", 0);
    m.learning_rate = j.value("learning_rate", 0.0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.train_fingerprint = j.value("train_fingerprint", std::uint64_t{0});
    check_shapes(m);
    for (const auto* block : {&m.w1, &m.b1, &m.w2, &m.b2})
        for (double v : *block)
            if (!std::isfinite(v)) throw DataError(path.string() + ": non-finite parameter");
    return m;
}

}  // namespace gazeshutter
