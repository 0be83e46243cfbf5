#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeshutter/config.hpp"
#include "gazeshutter/features.hpp"
#include "gazeshutter/scene.hpp"
#include "gazeshutter/shutter.hpp"
#include "gazeshutter/svm.hpp"
#include "gazeshutter/types.hpp"

namespace gazeshutter {

enum class Scheme { LeaveOneRecordingOut, LeaveOnePersonOut };

// cnn-svm / svm-svm pair an open-shutter model with the eye-only SVM for
// closed-shutter seconds; svm-eye uses the eye-only SVM throughout. The
// upper-bound variants apply the open-shutter model at every second as if
// scene imagery were always available, and the majority baseline predicts
// the training set's most frequent class.
enum class Method { CnnSvm, SvmSvm, SvmEye, CnnDirectUpper, SvmCombinedUpper, Majority };

std::string to_string(Scheme scheme);
std::string to_string(Method method);
Scheme parse_scheme(const std::string& name);
// CLI spelling: base method name plus an upper-bound flag.
Method parse_method(const std::string& name, bool upper_bound);
// Inverse of to_string(Method).
Method parse_method_name(const std::string& name);

struct Fold {
    Scheme scheme = Scheme::LeaveOneRecordingOut;
    std::string id;
    std::string person;                   // held-out person
    std::vector<std::size_t> train, test;  // recording indices
};

// One fold per (person, held-out recording); every person needs >= 2
// recordings. Training data stays within the same person.
std::vector<Fold> split_leave_one_recording_out(const Dataset& dataset);

// One fold per person; needs >= 2 persons.
std::vector<Fold> split_leave_one_person_out(const Dataset& dataset);

// Feature stream and ground truth computed once per recording; folds only
// reference them.
struct PreparedRecording {
    const Recording* recording = nullptr;
    std::vector<FeatureRow> features;
    std::vector<SecondLabel> labels;
};

struct PreparedDataset {
    const Dataset* dataset = nullptr;
    std::vector<PreparedRecording> recordings;
};

PreparedDataset prepare(const Dataset& dataset, const PipelineConfig& config);

// The more frequent class; an exact tie predicts sensitive.
PrivacyClass majority_baseline(std::span<const PrivacyClass> train_labels);

struct FoldModels {
    std::optional<SvmModel> eye_svm;
    std::optional<SvmModel> combined_svm;
    std::optional<SceneModel> scene_model;
    std::optional<PrivacyClass> majority;
};

// Trains exactly the models the requested methods need, on fold-train
// recordings only. Models record a fingerprint of their training inputs; see
// expected fingerprints below.
FoldModels train_fold(const PreparedDataset& prepared, const Fold& fold,
                      const PipelineConfig& config, std::span<const Method> methods);

// Fingerprints of the inputs train_fold would assemble, for asserting that
// no test data leaked into a trained model.
std::uint64_t expected_eye_fingerprint(const PreparedDataset& prepared, const Fold& fold,
                                       const PipelineConfig& config);
std::uint64_t expected_scene_fingerprint(const PreparedDataset& prepared, const Fold& fold,
                                         const PipelineConfig& config);

// Sequential evaluation of one recording under a method: per-second
// classifier dispatch based on the shutter position, minimum closing time T.
SimResult simulate_recording(const PreparedRecording& recording, const FoldModels& models,
                             Method method, int min_close);

struct CellMetrics {
    Scheme scheme = Scheme::LeaveOneRecordingOut;
    Method method = Method::SvmEye;
    int min_close = 1;
    std::string fold_id;
    std::string person;
    int recording_id = 0;
    Metrics metrics;
};

struct SweepRequest {
    std::vector<Scheme> schemes;
    std::vector<Method> methods;
    std::vector<int> closing_times;
};

// Full cross product of (scheme, method, T): one CellMetrics row per fold
// test recording. Deterministic for fixed dataset, config and seeds.
std::vector<CellMetrics> sweep_closing_times(const PreparedDataset& prepared,
                                             const SweepRequest& request,
                                             const PipelineConfig& config);

}  // namespace gazeshutter
