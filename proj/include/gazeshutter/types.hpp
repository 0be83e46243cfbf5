#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gazeshutter {

inline constexpr std::size_t kDescriptorDim = 1024;
inline constexpr std::size_t kEmbeddingDim = 68;
inline constexpr std::size_t kEyeFeatureDim = 52;
inline constexpr std::size_t kCombinedDim = kEyeFeatureDim + kEmbeddingDim;

enum class PrivacyClass : int { Sensitive = 0, NonSensitive = 1 };

inline const char* to_string(PrivacyClass c) {
    return c == PrivacyClass::Sensitive ? "sensitive" : "non-sensitive";
}

// One eye-camera measurement. Positions are normalized to [0,1]^2 with the
// origin at the bottom-left, pupil diameter is in pixels.
struct GazeSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double pupil_diameter = 0.0;
    double confidence = 0.0;
};

// Annotated span [start, end) with a 7-point privacy level
// (1 = fully inappropriate to record ... 7 = fully appropriate).
struct AnnotationSegment {
    double start = 0.0;
    double end = 0.0;
    std::string environment;
    std::string activity;
    int privacy_level = 7;
};

using SceneDescriptor = std::array<double, kDescriptorDim>;
using Embedding68 = std::array<double, kEmbeddingDim>;
using FeatureVector52 = std::array<double, kEyeFeatureDim>;

struct SceneFrame {
    double t = 0.0;
    SceneDescriptor descriptor{};
};

struct Recording {
    std::string person_id;
    int recording_id = 0;
    std::vector<GazeSample> samples;
    std::vector<SceneFrame> scene;
    std::vector<AnnotationSegment> annotations;
};

struct Dataset {
    std::vector<Recording> recordings;
};

struct SecondLabel {
    std::int64_t second = 0;
    PrivacyClass label = PrivacyClass::NonSensitive;
};

}  // namespace gazeshutter
