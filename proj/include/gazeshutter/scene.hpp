#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Scene image pathway: a fixed hand-crafted 1024-d descriptor feeding a
// trainable 1024 -> 68 bottleneck with a 2-class softmax head. The 68-d
// bottleneck activation doubles as the scene embedding for the combined
// classifier. Precomputed embeddings from any external network can be
// ingested through the descriptor CSV format instead.

// Descriptor layout: 4x4 spatial grid, per cell a 48-bin joint RGB histogram
// (4x4x3 quantization, all cell pixels) followed by a 16-bin gradient
// orientation histogram (magnitude weighted, interior pixels); each
// histogram is L1-normalized within its cell. 16 cells x 64 = 1024.
SceneDescriptor base_descriptor_rgb(std::span<const std::uint8_t> rgb, int width, int height);

// Decodes the image file (any OpenCV-readable format) and computes the
// descriptor. Throws DataError for missing or undecodable images.
SceneDescriptor base_descriptor(const std::filesystem::path& image);

struct SceneModel {
    // Bottleneck: embedding = relu(w1 * descriptor + b1); w1 row-major 68x1024.
    std::vector<double> w1;
    std::vector<double> b1;
    // Head: logits = w2 * embedding + b2; w2 row-major 2x68. Class index
    // follows PrivacyClass: 0 = sensitive, 1 = non-sensitive.
    std::vector<double> w2;
    std::vector<double> b2;

    int epochs = 0;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t train_fingerprint = 0;

    static SceneModel zeros();
};

struct SceneForward {
    Embedding68 embedding{};
    std::array<double, 2> probabilities{};
};

SceneForward forward(const SceneModel& model, const SceneDescriptor& descriptor);

struct LabeledDescriptor {
    SceneDescriptor descriptor{};
    PrivacyClass label = PrivacyClass::NonSensitive;
};

// Mean cross-entropy of the model on the samples.
double cross_entropy(const SceneModel& model, std::span<const LabeledDescriptor> samples);

// Analytic gradient of the mean cross-entropy w.r.t. every parameter block;
// the same computation training descends on.
struct SceneGradients {
    std::vector<double> w1, b1, w2, b2;
};
SceneGradients cross_entropy_gradients(const SceneModel& model,
                                       std::span<const LabeledDescriptor> samples);

// Full-batch gradient descent on mean cross-entropy. Parameters start at
// seeded uniform(-0.01, 0.01); a step that would raise the loss by more than
// 1e-6 is rejected and retried with a halved learning rate, so the loss
// trajectory is non-increasing within tolerance. Deterministic for a fixed
// seed. Throws TrainingError when only one class is present.
SceneModel train_scene_model(std::span<const LabeledDescriptor> samples, int epochs,
                             double learning_rate, std::uint64_t seed);

// Score is the probability of the sensitive class; ties at 0.5 classify
// sensitive (fail toward protection).
std::pair<PrivacyClass, double> cnn_direct_classify(const SceneModel& model,
                                                    const SceneDescriptor& descriptor);

struct SegmentSamples {
    std::vector<LabeledDescriptor> samples;
    int skipped_segments = 0;  // segments containing no scene frame
};

// One uniformly chosen scene frame per maximal annotation segment, where
// consecutive segments with identical (environment, activity, level) merge
// into one segment. Labels follow label_from_level at the given cut-off.
SegmentSamples sample_segment_images(const Recording& recording, std::uint64_t seed,
                                     int cutoff = 2);

// Versioned JSON dump of all parameter blocks; loading validates shapes
// (68x1024, 68, 2x68, 2).
void save_scene_model(const SceneModel& model, const std::filesystem::path& path);
SceneModel load_scene_model(const std::filesystem::path& path);

}  // namespace gazeshutter
