#include "gazeshutter/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "gazeshutter/dataset.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/hash.hpp"
#include "gazeshutter/rng.hpp"

namespace gazeshutter {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::LeaveOneRecordingOut ? "loro" : "lopo";
}

std::string to_string(Method method) {
    switch (method) {
        case Method::CnnSvm: return "cnn-svm";
        case Method::SvmSvm: return "svm-svm";
        case Method::SvmEye: return "svm-eye";
        case Method::CnnDirectUpper: return "cnn-direct-upper";
        case Method::SvmCombinedUpper: return "svm-combined-upper";
        case Method::Majority: return "majority";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "loro") return Scheme::LeaveOneRecordingOut;
    if (name == "lopo") return Scheme::LeaveOnePersonOut;
    throw DataError("unknown scheme '" + name + "' (expected loro or lopo)");
}

Method parse_method(const std::string& name, bool upper_bound) {
    if (name == "cnn-svm") return upper_bound ? Method::CnnDirectUpper : Method::CnnSvm;
    if (name == "svm-svm") return upper_bound ? Method::SvmCombinedUpper : Method::SvmSvm;
    if (name == "svm-eye") {
        if (upper_bound) throw DataError("svm-eye has no upper-bound variant");
        return Method::SvmEye;
    }
    if (name == "majority") {
        if (upper_bound) throw DataError("majority has no upper-bound variant");
        return Method::Majority;
    }
    throw DataError("unknown method '" + name + "'");
}

Method parse_method_name(const std::string& name) {
    for (Method m : {Method::CnnSvm, Method::SvmSvm, Method::SvmEye, Method::CnnDirectUpper,
                     Method::SvmCombinedUpper, Method::Majority})
        if (to_string(m) == name) return m;
    throw DataError("unknown method '" + name + "'");
}

std::vector<Fold> split_leave_one_recording_out(const Dataset& dataset) {
    std::map<std::string, std::vector<std::size_t>> by_person;
    for (std::size_t i = 0; i < dataset.recordings.size(); ++i)
        by_person[dataset.recordings[i].person_id].push_back(i);

    std::vector<Fold> folds;
    for (const auto& [person, indices] : by_person) {
        if (indices.size() < 2)
            throw DataError("person " + person + " has fewer than 2 recordings");
        for (std::size_t held_out : indices) {
            Fold fold;
            fold.scheme = Scheme::LeaveOneRecordingOut;
            fold.person = person;
            fold.id = "loro_" + person + "_r" +
                      std::to_string(dataset.recordings[held_out].recording_id);
            fold.test = {held_out};
            for (std::size_t i : indices)
                if (i != held_out) fold.train.push_back(i);
            folds.push_back(std::move(fold));
        }
    }
    return folds;
}

std::vector<Fold> split_leave_one_person_out(const Dataset& dataset) {
    std::map<std::string, std::vector<std::size_t>> by_person;
    for (std::size_t i = 0; i < dataset.recordings.size(); ++i)
        by_person[dataset.recordings[i].person_id].push_back(i);
    if (by_person.size() < 2) throw DataError("leave-one-person-out needs at least 2 persons");

    std::vector<Fold> folds;
    for (const auto& [person, indices] : by_person) {
        Fold fold;
        fold.scheme = Scheme::LeaveOnePersonOut;
        fold.person = person;
        fold.id = "lopo_" + person;
        fold.test = indices;
        for (const auto& [other, other_indices] : by_person)
            if (other != person)
                fold.train.insert(fold.train.end(), other_indices.begin(), other_indices.end());
        folds.push_back(std::move(fold));
    }
    return folds;
}

PreparedDataset prepare(const Dataset& dataset, const PipelineConfig& config) {
    PreparedDataset prepared;
    prepared.dataset = &dataset;
    prepared.recordings.reserve(dataset.recordings.size());
    for (const auto& recording : dataset.recordings) {
        PreparedRecording p;
        p.recording = &recording;
        p.features =
            feature_stream(recording, config.events, config.window_duration, config.window_step);
        p.labels = labels_per_second(recording, config.cutoff);
        prepared.recordings.push_back(std::move(p));
    }
    return prepared;
}

PrivacyClass majority_baseline(std::span<const PrivacyClass> train_labels) {
    if (train_labels.empty()) throw DataError("majority baseline needs training labels");
    std::size_t sensitive = 0;
    for (PrivacyClass c : train_labels)
        if (c == PrivacyClass::Sensitive) ++sensitive;
    return 2 * sensitive >= train_labels.size() ? PrivacyClass::Sensitive
                                                : PrivacyClass::NonSensitive;
}

namespace {

// Latest scene frame at or before t; the frame a live system would be
// holding at that second.
const SceneFrame* frame_at(const Recording& recording, double t) {
    const SceneFrame* best = nullptr;
    for (const auto& frame : recording.scene) {
        if (frame.t > t + 1e-9) break;
        best = &frame;
    }
    return best;
}

struct TrainRows {
    Matrix eye;                        // 52-d rows
    std::vector<PrivacyClass> labels;  // aligned with rows
    std::vector<const SceneFrame*> frames;  // frame backing each row
};

// Windowed training rows across the fold's training recordings. Each row is
// the feature vector at second t with the ground truth at t; train_stride
// subsamples the heavily overlapping windows.
TrainRows collect_training_rows(const PreparedDataset& prepared, const Fold& fold,
                                const PipelineConfig& config) {
    TrainRows rows;
    rows.eye.cols = kEyeFeatureDim;
    for (std::size_t index : fold.train) {
        const PreparedRecording& rec = prepared.recordings[index];
        std::unordered_map<std::int64_t, PrivacyClass> truth;
        for (const auto& [second, label] : rec.labels) truth[second] = label;
        int counter = 0;
        for (const auto& row : rec.features) {
            const auto t = static_cast<std::int64_t>(std::llround(row.t_end));
            auto it = truth.find(t);
            if (it == truth.end()) continue;
            if (counter++ % config.train_stride != 0) continue;
            rows.eye.push_row(row.values);
            rows.labels.push_back(it->second);
            rows.frames.push_back(frame_at(*rec.recording, row.t_end));
        }
    }
    return rows;
}

std::vector<LabeledDescriptor> collect_scene_samples(const PreparedDataset& prepared,
                                                     const Fold& fold,
                                                     const PipelineConfig& config) {
    std::vector<LabeledDescriptor> samples;
    for (std::size_t index : fold.train) {
        const PreparedRecording& rec = prepared.recordings[index];
        const auto seed = Rng::derive_seed(config.scene_seed, index);
        const SegmentSamples part = sample_segment_images(*rec.recording, seed, config.cutoff);
        samples.insert(samples.end(), part.samples.begin(), part.samples.end());
    }
    return samples;
}

std::uint64_t fingerprint_scene_samples(std::span<const LabeledDescriptor> samples) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : samples) {
        h = fnv1a_doubles({s.descriptor.data(), s.descriptor.size()}, h);
        const double label = static_cast<double>(s.label);
        h = fnv1a_doubles({&label, 1}, h);
    }
    return h;
}

bool needs_eye_svm(Method m) {
    return m == Method::CnnSvm || m == Method::SvmSvm || m == Method::SvmEye;
}
bool needs_scene_model(Method m) {
    return m == Method::CnnSvm || m == Method::SvmSvm || m == Method::CnnDirectUpper ||
           m == Method::SvmCombinedUpper;
}
bool needs_combined_svm(Method m) {
    return m == Method::SvmSvm || m == Method::SvmCombinedUpper;
}

}  // namespace

FoldModels train_fold(const PreparedDataset& prepared, const Fold& fold,
                      const PipelineConfig& config, std::span<const Method> methods) {
    const bool want_eye = std::any_of(methods.begin(), methods.end(), needs_eye_svm);
    const bool want_scene = std::any_of(methods.begin(), methods.end(), needs_scene_model);
    const bool want_combined = std::any_of(methods.begin(), methods.end(), needs_combined_svm);
    const bool want_majority =
        std::any_of(methods.begin(), methods.end(), [](Method m) { return m == Method::Majority; });

    FoldModels models;
    TrainRows rows;
    if (want_eye || want_combined) rows = collect_training_rows(prepared, fold, config);

    if (want_eye) {
        SvmTrainOptions options{config.svm_c, config.svm_gamma, config.svm_tolerance,
                                config.svm_max_iterations};
        models.eye_svm = fit_svm(rows.eye, rows.labels, options);
    }

    if (want_scene) {
        const auto samples = collect_scene_samples(prepared, fold, config);
        models.scene_model = train_scene_model(samples, config.scene_epochs,
                                               config.scene_learning_rate, config.scene_seed);
    }

    if (want_combined) {
        Matrix combined(0, 0);
        combined.cols = kCombinedDim;
        for (std::size_t i = 0; i < rows.eye.rows; ++i) {
            if (!rows.frames[i])
                throw DataError("training second has no scene frame; streams misaligned");
            const Embedding68 embedding =
                forward(*models.scene_model, rows.frames[i]->descriptor).embedding;
            FeatureVector52 eye;
            auto r = rows.eye.row(i);
            std::copy(r.begin(), r.end(), eye.begin());
            combined.push_row(concat_features(eye, embedding));
        }
        SvmTrainOptions options{config.svm_c, config.svm_gamma, config.svm_tolerance,
                                config.svm_max_iterations};
        models.combined_svm = fit_svm(combined, rows.labels, options);
    }

    if (want_majority) {
        std::vector<PrivacyClass> train_labels;
        for (std::size_t index : fold.train)
            for (const auto& [second, label] : prepared.recordings[index].labels)
                train_labels.push_back(label);
        models.majority = majority_baseline(train_labels);
    }
    return models;
}

std::uint64_t expected_eye_fingerprint(const PreparedDataset& prepared, const Fold& fold,
                                       const PipelineConfig& config) {
    TrainRows rows = collect_training_rows(prepared, fold, config);
    const Standardizer s = fit_standardizer(rows.eye);
    const Matrix x = standardize(s, rows.eye);
    std::uint64_t h = fnv1a_doubles({x.data.data(), x.data.size()});
    std::vector<double> y;
    y.reserve(rows.labels.size());
    for (PrivacyClass c : rows.labels)
        y.push_back(c == PrivacyClass::Sensitive ? 1.0 : -1.0);
    return fnv1a_doubles({y.data(), y.size()}, h);
}

std::uint64_t expected_scene_fingerprint(const PreparedDataset& prepared, const Fold& fold,
                                         const PipelineConfig& config) {
    return fingerprint_scene_samples(collect_scene_samples(prepared, fold, config));
}

SimResult simulate_recording(const PreparedRecording& recording, const FoldModels& models,
                             Method method, int min_close) {
    if (recording.features.empty())
        throw DataError("recording is shorter than one analysis window");

    // Evaluated seconds: labeled seconds with a complete window behind them.
    std::unordered_map<std::int64_t, const FeatureVector52*> features;
    for (const auto& row : recording.features)
        features[static_cast<std::int64_t>(std::llround(row.t_end))] = &row.values;

    std::vector<SecondLabel> labels;
    for (const auto& entry : recording.labels)
        if (features.count(entry.second)) labels.push_back(entry);
    if (labels.empty()) throw DataError("no labeled second overlaps the feature stream");

    auto eye_vector = [&](std::int64_t t) -> const FeatureVector52& {
        auto it = features.find(t);
        if (it == features.end())
            throw DataError("feature stream misses second " + std::to_string(t));
        return *it->second;
    };

    // Scene access, memoized per frame; only consulted at seconds whose
    // classifier actually looks at the image.
    auto frame_descriptor = [&](std::int64_t t) -> const SceneDescriptor& {
        const SceneFrame* frame = frame_at(*recording.recording, static_cast<double>(t));
        if (!frame)
            throw DataError("no scene frame available at second " + std::to_string(t) +
                            "; streams misaligned");
        return frame->descriptor;
    };
    std::unordered_map<const SceneDescriptor*, Embedding68> embedding_cache;
    auto embedding_of = [&](const SceneDescriptor& d) -> const Embedding68& {
        auto it = embedding_cache.find(&d);
        if (it == embedding_cache.end())
            it = embedding_cache.emplace(&d, forward(*models.scene_model, d).embedding).first;
        return it->second;
    };

    auto require = [&](bool ok, const char* what) {
        if (!ok) throw DataError(std::string("method ") + to_string(method) + " requires " + what);
    };

    SimPredictors predictors;
    predictors.closed_name = "svm-eye";
    auto eye_prediction = [&, method](std::int64_t t) {
        return svm_predict(*models.eye_svm, eye_vector(t)).first;
    };

    switch (method) {
        case Method::CnnSvm:
            require(models.scene_model.has_value(), "a scene model");
            require(models.eye_svm.has_value(), "the eye svm");
            predictors.open_name = "cnn-direct";
            predictors.open_model = [&](std::int64_t t) {
                return cnn_direct_classify(*models.scene_model, frame_descriptor(t)).first;
            };
            predictors.closed_model = eye_prediction;
            break;
        case Method::SvmSvm:
            require(models.scene_model.has_value(), "a scene model");
            require(models.combined_svm.has_value(), "the combined svm");
            require(models.eye_svm.has_value(), "the eye svm");
            predictors.open_name = "svm-combined";
            predictors.open_model = [&](std::int64_t t) {
                const auto combined =
                    concat_features(eye_vector(t), embedding_of(frame_descriptor(t)));
                return svm_predict(*models.combined_svm, combined).first;
            };
            predictors.closed_model = eye_prediction;
            break;
        case Method::SvmEye:
            require(models.eye_svm.has_value(), "the eye svm");
            predictors.open_name = "svm-eye";
            predictors.open_model = eye_prediction;
            predictors.closed_model = eye_prediction;
            break;
        case Method::CnnDirectUpper:
            require(models.scene_model.has_value(), "a scene model");
            predictors.open_name = "cnn-direct";
            predictors.closed_name = "cnn-direct";
            predictors.open_model = [&](std::int64_t t) {
                return cnn_direct_classify(*models.scene_model, frame_descriptor(t)).first;
            };
            predictors.closed_model = predictors.open_model;
            break;
        case Method::SvmCombinedUpper: {
            require(models.scene_model.has_value(), "a scene model");
            require(models.combined_svm.has_value(), "the combined svm");
            predictors.open_name = "svm-combined";
            predictors.closed_name = "svm-combined";
            predictors.open_model = [&](std::int64_t t) {
                const auto combined =
                    concat_features(eye_vector(t), embedding_of(frame_descriptor(t)));
                return svm_predict(*models.combined_svm, combined).first;
            };
            predictors.closed_model = predictors.open_model;
            break;
        }
        case Method::Majority: {
            require(models.majority.has_value(), "the majority class");
            const PrivacyClass constant = *models.majority;
            predictors.open_name = "majority";
            predictors.closed_name = "majority";
            predictors.open_model = [constant](std::int64_t) { return constant; };
            predictors.closed_model = predictors.open_model;
            break;
        }
    }
    return run_simulation(labels, predictors, min_close);
}

std::vector<CellMetrics> sweep_closing_times(const PreparedDataset& prepared,
                                             const SweepRequest& request,
                                             const PipelineConfig& config) {
    if (request.schemes.empty() || request.methods.empty() || request.closing_times.empty())
        throw DataError("sweep needs at least one scheme, method and closing time");
    for (int t : request.closing_times)
        if (t < 1 || t > 60) throw DataError("closing times must lie in 1..60");

    std::vector<CellMetrics> cells;
    for (Scheme scheme : request.schemes) {
        const auto folds = scheme == Scheme::LeaveOneRecordingOut
                               ? split_leave_one_recording_out(*prepared.dataset)
                               : split_leave_one_person_out(*prepared.dataset);
        for (const Fold& fold : folds) {
            const FoldModels models = train_fold(prepared, fold, config, request.methods);
            for (Method method : request.methods) {
                for (int min_close : request.closing_times) {
                    for (std::size_t index : fold.test) {
                        const PreparedRecording& rec = prepared.recordings[index];
                        CellMetrics cell;
                        cell.scheme = scheme;
                        cell.method = method;
                        cell.min_close = min_close;
                        cell.fold_id = fold.id;
                        cell.person = fold.person;
                        cell.recording_id = rec.recording->recording_id;
                        cell.metrics = simulate_recording(rec, models, method, min_close).metrics;
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }
    return cells;
}

}  // namespace gazeshutter
