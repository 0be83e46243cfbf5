#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "gazeshutter/config.hpp"
#include "gazeshutter/dataset.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/eval.hpp"
#include "gazeshutter/features.hpp"
#include "gazeshutter/report.hpp"
#include "gazeshutter/scene.hpp"
#include "gazeshutter/shutter.hpp"
#include "gazeshutter/svm.hpp"
#include "gazeshutter/synth.hpp"

namespace py = pybind11;
using namespace gazeshutter;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
    if (x.ndim() != 2) throw DataError("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(x.shape(0)), static_cast<std::size_t>(x.shape(1)));
    std::memcpy(m.data.data(), x.data(), sizeof(double) * m.data.size());
    return m;
}

std::vector<PrivacyClass> labels_from_numpy(
    const py::array_t<int, py::array::c_style | py::array::forcecast>& y) {
    std::vector<PrivacyClass> labels(static_cast<std::size_t>(y.size()));
    for (py::ssize_t i = 0; i < y.size(); ++i)
        labels[static_cast<std::size_t>(i)] =
            y.data()[i] == 0 ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive;
    return labels;
}

py::array_t<double> numpy_from(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), sizeof(double) * v.size());
    return out;
}

template <std::size_t N>
py::array_t<double> numpy_from(const std::array<double, N>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(N));
    std::memcpy(out.mutable_data(), v.data(), sizeof(double) * N);
    return out;
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["accuracy"] = m.accuracy;
    d["tp"] = m.tp;
    d["fp"] = m.fp;
    d["tn"] = m.tn;
    d["fn"] = m.fn;
    d["closings"] = m.closings;
    d["mean_gap_minutes"] =
        m.mean_gap_minutes ? py::object(py::float_(*m.mean_gap_minutes)) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaze-driven privacy shutter: feature extraction, classifiers and "
              "sequential shutter evaluation";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<TrainingError>(m, "TrainingError");

    py::enum_<PrivacyClass>(m, "PrivacyClass")
        .value("SENSITIVE", PrivacyClass::Sensitive)
        .value("NON_SENSITIVE", PrivacyClass::NonSensitive);

    py::class_<Recording>(m, "Recording")
        .def_readonly("person_id", &Recording::person_id)
        .def_readonly("recording_id", &Recording::recording_id)
        .def_property_readonly("n_samples",
                               [](const Recording& r) { return r.samples.size(); })
        .def_property_readonly("n_scene_frames",
                               [](const Recording& r) { return r.scene.size(); })
        .def_property_readonly("n_segments",
                               [](const Recording& r) { return r.annotations.size(); });

    m.def("load_recording", &load_recording, py::arg("manifest"));

    m.def(
        "synthesize_dataset",
        [](const std::filesystem::path& config, const std::filesystem::path& out) {
            return write_dataset(generate_synthetic(load_synth_config(config)), out);
        },
        py::arg("config"), py::arg("out"),
        "Generate a seeded synthetic dataset and write it to a directory");

    m.def(
        "feature_stream",
        [](const Recording& recording) {
            const auto rows = feature_stream(recording, EventParams{});
            py::array_t<double> t(static_cast<py::ssize_t>(rows.size()));
            py::array_t<double> values({rows.size(), kEyeFeatureDim});
            for (std::size_t i = 0; i < rows.size(); ++i) {
                t.mutable_data()[i] = rows[i].t_end;
                std::memcpy(values.mutable_data() + i * kEyeFeatureDim, rows[i].values.data(),
                            sizeof(double) * kEyeFeatureDim);
            }
            return py::make_tuple(t, values);
        },
        py::arg("recording"),
        "Per-second 52-d eye-movement feature stream as (t_end, values)");

    m.def(
        "labels_per_second",
        [](const Recording& recording, int cutoff) {
            const auto labels = labels_per_second(recording, cutoff);
            py::array_t<std::int64_t> t(static_cast<py::ssize_t>(labels.size()));
            py::array_t<int> y(static_cast<py::ssize_t>(labels.size()));
            for (std::size_t i = 0; i < labels.size(); ++i) {
                t.mutable_data()[i] = labels[i].second;
                y.mutable_data()[i] = static_cast<int>(labels[i].label);
            }
            return py::make_tuple(t, y);
        },
        py::arg("recording"), py::arg("cutoff") = kDefaultCutoff,
        "Ground truth per integer second; 0 = sensitive, 1 = non-sensitive");

    m.def("wordbook_features",
          [](const std::string& symbols) { return numpy_from(wordbook_features(symbols)); },
          py::arg("symbols"), "24 n-gram count statistics of a saccade symbol string");

    m.def("base_descriptor",
          [](const std::filesystem::path& image) {
              const auto d = base_descriptor(image);
              return numpy_from(d);
          },
          py::arg("image"), "1024-d color/gradient grid descriptor of an image file");

    py::class_<Standardizer>(m, "Standardizer")
        .def_property_readonly("mean", [](const Standardizer& s) { return numpy_from(s.mean); })
        .def_property_readonly("std", [](const Standardizer& s) { return numpy_from(s.std); });

    py::class_<SvmModel>(m, "SvmModel")
        .def_property_readonly("n_support_vectors",
                               [](const SvmModel& m2) { return m2.alpha.size(); })
        .def_readonly("bias", &SvmModel::bias)
        .def_readonly("gamma", &SvmModel::gamma)
        .def_readonly("train_fingerprint", &SvmModel::train_fingerprint)
        .def(
            "decision",
            [](const SvmModel& model,
               const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
                const Matrix rows = matrix_from_numpy(x);
                py::array_t<double> out(static_cast<py::ssize_t>(rows.rows));
                for (std::size_t i = 0; i < rows.rows; ++i)
                    out.mutable_data()[i] = svm_decision(model, rows.row(i));
                return out;
            },
            py::arg("x"), "Decision values of raw (unstandardized) feature rows")
        .def(
            "predict",
            [](const SvmModel& model,
               const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
                const Matrix rows = matrix_from_numpy(x);
                py::array_t<int> out(static_cast<py::ssize_t>(rows.rows));
                for (std::size_t i = 0; i < rows.rows; ++i)
                    out.mutable_data()[i] = static_cast<int>(svm_predict(model, rows.row(i)).first);
                return out;
            },
            py::arg("x"), "Predicted classes; 0 = sensitive, 1 = non-sensitive")
        .def("save", [](const SvmModel& model,
                        const std::filesystem::path& path) { save_svm_model(model, path); },
             py::arg("path"))
        .def_static("load", &load_svm_model, py::arg("path"));

    m.def(
        "train_svm",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& y, double c,
           double gamma, double tolerance) {
            SvmTrainOptions options;
            options.c = c;
            options.gamma = gamma;
            options.tolerance = tolerance;
            return fit_svm(matrix_from_numpy(x), labels_from_numpy(y), options);
        },
        py::arg("x"), py::arg("y"), py::arg("c") = 1.0, py::arg("gamma") = 0.0,
        py::arg("tolerance") = 1e-3,
        "Standardize and train an RBF-SVM; y uses 0 = sensitive, 1 = non-sensitive");

    py::class_<SceneModel>(m, "SceneModel")
        .def_readonly("train_fingerprint", &SceneModel::train_fingerprint)
        .def("save", [](const SceneModel& model,
                        const std::filesystem::path& path) { save_scene_model(model, path); },
             py::arg("path"))
        .def_static("load", &load_scene_model, py::arg("path"))
        .def(
            "forward",
            [](const SceneModel& model,
               const py::array_t<double, py::array::c_style | py::array::forcecast>& d) {
                if (d.size() != static_cast<py::ssize_t>(kDescriptorDim))
                    throw DataError("descriptor must have 1024 values");
                SceneDescriptor descriptor;
                std::memcpy(descriptor.data(), d.data(), sizeof(double) * kDescriptorDim);
                const auto out = forward(model, descriptor);
                return py::make_tuple(numpy_from(out.embedding), numpy_from(out.probabilities));
            },
            py::arg("descriptor"), "Returns (embedding68, probabilities)");

    m.def(
        "train_scene_model",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& y, int epochs,
           double learning_rate, std::uint64_t seed) {
            const Matrix rows = matrix_from_numpy(x);
            if (rows.cols != kDescriptorDim) throw DataError("descriptors must have 1024 columns");
            const auto labels = labels_from_numpy(y);
            if (labels.size() != rows.rows) throw DataError("labels do not match rows");
            std::vector<LabeledDescriptor> samples(rows.rows);
            for (std::size_t i = 0; i < rows.rows; ++i) {
                std::memcpy(samples[i].descriptor.data(), rows.row(i).data(),
                            sizeof(double) * kDescriptorDim);
                samples[i].label = labels[i];
            }
            return train_scene_model(samples, epochs, learning_rate, seed);
        },
        py::arg("x"), py::arg("y"), py::arg("epochs") = 400, py::arg("learning_rate") = 0.2,
        py::arg("seed") = 7, "Train the 1024->68->softmax scene classifier");

    m.def(
        "simulate_scripted",
        [](const py::array_t<int, py::array::c_style | py::array::forcecast>& truth,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& open_predictions,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& eye_predictions,
           int closing_time) {
            const auto n = truth.size();
            if (open_predictions.size() != n || eye_predictions.size() != n)
                throw DataError("prediction arrays must match the truth length");
            std::vector<SecondLabel> labels(static_cast<std::size_t>(n));
            for (py::ssize_t i = 0; i < n; ++i)
                labels[static_cast<std::size_t>(i)] = {
                    i, truth.data()[i] == 0 ? PrivacyClass::Sensitive
                                            : PrivacyClass::NonSensitive};
            SimPredictors predictors;
            predictors.open_model = [&](std::int64_t t) {
                return open_predictions.data()[t] == 0 ? PrivacyClass::Sensitive
                                                       : PrivacyClass::NonSensitive;
            };
            predictors.closed_model = [&](std::int64_t t) {
                return eye_predictions.data()[t] == 0 ? PrivacyClass::Sensitive
                                                      : PrivacyClass::NonSensitive;
            };
            const auto result = run_simulation(labels, predictors, closing_time);
            py::array_t<int> predicted(n), status(n);
            for (py::ssize_t i = 0; i < n; ++i) {
                predicted.mutable_data()[i] = static_cast<int>(result.trace[i].predicted);
                status.mutable_data()[i] =
                    result.trace[i].status == ShutterState::Status::Closed ? 1 : 0;
            }
            py::dict out;
            out["predicted"] = predicted;
            out["closed"] = status;
            out["metrics"] = metrics_dict(result.metrics);
            return out;
        },
        py::arg("truth"), py::arg("open_predictions"), py::arg("eye_predictions"),
        py::arg("closing_time") = 1,
        "Run the shutter state machine over scripted per-second predictions");

    m.def(
        "sweep",
        [](const std::filesystem::path& data, const std::vector<std::string>& schemes,
           const std::vector<std::string>& methods, const std::vector<int>& closing_times,
           const std::string& config_path) {
            const PipelineConfig config =
                config_path.empty() ? default_config() : load_config(config_path);
            auto index = data;
            if (std::filesystem::is_directory(index)) index /= "dataset.json";
            const Dataset dataset = load_dataset(index);
            SweepRequest request;
            for (const auto& s : schemes) request.schemes.push_back(parse_scheme(s));
            for (const auto& name : methods) request.methods.push_back(parse_method_name(name));
            request.closing_times = closing_times;
            const auto prepared = prepare(dataset, config);
            const auto cells = sweep_closing_times(prepared, request, config);
            py::list rows;
            for (const auto& cell : cells) {
                py::dict row;
                row["scheme"] = to_string(cell.scheme);
                row["method"] = to_string(cell.method);
                row["closing_time"] = cell.min_close;
                row["fold"] = cell.fold_id;
                row["person"] = cell.person;
                row["recording"] = cell.recording_id;
                row["metrics"] = metrics_dict(cell.metrics);
                rows.append(row);
            }
            return rows;
        },
        py::arg("data"), py::arg("schemes"), py::arg("methods"), py::arg("closing_times"),
        py::arg("config") = std::string(),
        "Cross-validated closing-time sweep over a dataset directory");

    m.attr("EYE_FEATURE_DIM") = kEyeFeatureDim;
    m.attr("EMBEDDING_DIM") = kEmbeddingDim;
    m.attr("DESCRIPTOR_DIM") = kDescriptorDim;
    m.attr("COMBINED_DIM") = kCombinedDim;
}
