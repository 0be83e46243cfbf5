// Command-line front end: synthetic data generation, feature extraction,
// fold training, sequential shutter simulation, closing-time sweeps and
// report rendering.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gazeshutter/config.hpp"
#include "gazeshutter/csvio.hpp"
#include "gazeshutter/dataset.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/eval.hpp"
#include "gazeshutter/features.hpp"
#include "gazeshutter/report.hpp"
#include "gazeshutter/scene.hpp"
#include "gazeshutter/shutter.hpp"
#include "gazeshutter/svm.hpp"
#include "gazeshutter/synth.hpp"

namespace fs = std::filesystem;
using namespace gazeshutter;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTraining = 3;

PipelineConfig config_from(const std::string& path) {
    return path.empty() ? default_config() : load_config(path);
}

Dataset dataset_from(const std::string& data) {
    fs::path path(data);
    if (fs::is_directory(path)) path /= "dataset.json";
    return load_dataset(path);
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    for (const auto& name : names) methods.push_back(parse_method_name(name));
    return methods;
}

int run_synth(const std::string& config_path, const std::string& out) {
    const SynthConfig config = load_synth_config(config_path);
    const Dataset dataset = generate_synthetic(config);
    const auto index = write_dataset(dataset, out);
    std::cout << "wrote " << dataset.recordings.size() << " recordings to " << index << "\n";
    return kExitOk;
}

int run_extract(const std::string& manifest, const std::string& out,
                const std::string& events_out, const std::string& config_path) {
    const PipelineConfig config = config_from(config_path);
    const Recording recording = load_recording(manifest);
    const auto rows =
        feature_stream(recording, config.events, config.window_duration, config.window_step);
    write_features_csv(out, rows);
    std::cout << "wrote " << rows.size() << " feature rows to " << out << "\n";
    if (!events_out.empty()) {
        write_events_csv(events_out, segment_events(recording.samples, config.events));
        std::cout << "wrote event dump to " << events_out << "\n";
    }
    return kExitOk;
}

std::vector<Fold> folds_for(const Dataset& dataset, Scheme scheme) {
    return scheme == Scheme::LeaveOneRecordingOut ? split_leave_one_recording_out(dataset)
                                                  : split_leave_one_person_out(dataset);
}

int run_train(const std::string& data, const std::string& scheme_name,
              const std::vector<std::string>& method_names, const std::string& out,
              const std::string& config_path) {
    const PipelineConfig config = config_from(config_path);
    const Dataset dataset = dataset_from(data);
    const Scheme scheme = parse_scheme(scheme_name);
    const auto methods = parse_methods(method_names);
    const PreparedDataset prepared = prepare(dataset, config);
    const auto folds = folds_for(dataset, scheme);

    json fold_index;
    fold_index["scheme"] = to_string(scheme);
    fold_index["folds"] = json::array();
    for (const Fold& fold : folds) {
        const FoldModels models = train_fold(prepared, fold, config, methods);
        const fs::path fold_dir = fs::path(out) / fold.id;
        fs::create_directories(fold_dir);
        json entry;
        entry["id"] = fold.id;
        entry["person"] = fold.person;
        entry["train"] = fold.train;
        entry["test"] = fold.test;
        if (models.eye_svm) save_svm_model(*models.eye_svm, fold_dir / "eye_svm.json");
        if (models.combined_svm)
            save_svm_model(*models.combined_svm, fold_dir / "combined_svm.json");
        if (models.scene_model)
            save_scene_model(*models.scene_model, fold_dir / "scene_model.json");
        if (models.majority) entry["majority"] = to_string(*models.majority);
        fold_index["folds"].push_back(std::move(entry));
        std::cout << "trained fold " << fold.id << "\n";
    }
    auto out_stream = open_output(fs::path(out) / "folds.json");
    out_stream << fold_index.dump(2) << '\n';
    return kExitOk;
}

FoldModels load_fold_models(const fs::path& fold_dir, const json& fold_entry) {
    FoldModels models;
    if (fs::exists(fold_dir / "eye_svm.json"))
        models.eye_svm = load_svm_model(fold_dir / "eye_svm.json");
    if (fs::exists(fold_dir / "combined_svm.json"))
        models.combined_svm = load_svm_model(fold_dir / "combined_svm.json");
    if (fs::exists(fold_dir / "scene_model.json"))
        models.scene_model = load_scene_model(fold_dir / "scene_model.json");
    if (fold_entry.contains("majority"))
        models.majority = fold_entry["majority"] == "sensitive" ? PrivacyClass::Sensitive
                                                                : PrivacyClass::NonSensitive;
    return models;
}

int run_simulate(const std::string& data, const std::string& models_dir,
                 const std::string& method_name, bool upper_bound, int closing_time,
                 const std::string& fold_filter, const std::string& out,
                 const std::string& config_path) {
    const PipelineConfig config = config_from(config_path);
    const Dataset dataset = dataset_from(data);
    const Method method = parse_method(method_name, upper_bound);
    const PreparedDataset prepared = prepare(dataset, config);

    std::ifstream index_stream(fs::path(models_dir) / "folds.json");
    if (!index_stream) throw DataError("missing folds.json under " + models_dir);
    json fold_index;
    index_stream >> fold_index;
    const Scheme scheme = parse_scheme(fold_index.at("scheme").get<std::string>());

    std::vector<CellMetrics> cells;
    for (const auto& entry : fold_index.at("folds")) {
        const std::string id = entry.at("id").get<std::string>();
        if (!fold_filter.empty() && id != fold_filter) continue;
        const FoldModels models = load_fold_models(fs::path(models_dir) / id, entry);
        for (const auto& test_index : entry.at("test").get<std::vector<std::size_t>>()) {
            if (test_index >= prepared.recordings.size())
                throw DataError("fold index out of range; models do not match the dataset");
            const auto& rec = prepared.recordings[test_index];
            const SimResult result = simulate_recording(rec, models, method, closing_time);
            const std::string stem = id + "_r" + std::to_string(rec.recording->recording_id);
            write_trace_csv(fs::path(out) / (stem + "_trace.csv"), result);
            write_metrics_json(fs::path(out) / (stem + "_metrics.json"), result.metrics);

            CellMetrics cell;
            cell.scheme = scheme;
            cell.method = method;
            cell.min_close = closing_time;
            cell.fold_id = id;
            cell.person = entry.at("person").get<std::string>();
            cell.recording_id = rec.recording->recording_id;
            cell.metrics = result.metrics;
            cells.push_back(std::move(cell));
            std::cout << stem << ": accuracy " << result.metrics.accuracy << ", closings "
                      << result.metrics.closings << "\n";
        }
    }
    if (cells.empty()) throw DataError("no folds matched");
    write_cells_csv(fs::path(out) / "cells.csv", cells);
    return kExitOk;
}

int run_sweep(const std::string& data, const std::string& t_list,
              const std::vector<std::string>& scheme_names,
              const std::vector<std::string>& method_names, const std::string& out,
              const std::string& config_path) {
    const PipelineConfig config = config_from(config_path);
    const Dataset dataset = dataset_from(data);

    SweepRequest request;
    for (const auto& name : scheme_names) request.schemes.push_back(parse_scheme(name));
    request.methods = parse_methods(method_names);
    for (const auto& token : CLI::detail::split(t_list, ',')) {
        try {
            request.closing_times.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw DataError("bad closing time '" + token + "' in --t-list");
        }
    }

    const PreparedDataset prepared = prepare(dataset, config);
    const auto cells = sweep_closing_times(prepared, request, config);
    write_cells_csv(fs::path(out) / "cells.csv", cells);
    write_report(cells, out);
    std::cout << "wrote " << cells.size() << " result rows to " << out << "\n";
    return kExitOk;
}

int run_report(const std::string& in, const std::string& out) {
    const auto cells = read_cells_csv(fs::path(in) / "cells.csv");
    write_report(cells, out);
    std::cout << "wrote report to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Privacy-aware camera shutter control from eye movements"};
    app.require_subcommand(1);

    std::string config_path, data, out, in_dir, manifest, events_out, models_dir;
    std::string scheme = "loro", method, t_list = "1,5,10,30,60", fold_filter;
    std::vector<std::string> schemes{"loro"};
    std::vector<std::string> methods{"svm-eye", "svm-svm", "cnn-svm", "majority"};
    bool upper_bound = false;
    int closing_time = 1;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--config", config_path, "synthetic generator config")->required();
    synth->add_option("--out", out, "output dataset directory")->required();

    auto* extract = app.add_subcommand("extract", "Extract the eye-feature stream");
    extract->add_option("--recording", manifest, "recording manifest JSON")->required();
    extract->add_option("--out", out, "feature CSV path")->required();
    extract->add_option("--events-out", events_out, "optional event dump CSV");
    extract->add_option("--config", config_path, "pipeline config");

    auto* train = app.add_subcommand("train", "Train per-fold models");
    train->add_option("--data", data, "dataset directory or index JSON")->required();
    train->add_option("--scheme", scheme, "loro or lopo")->capture_default_str();
    train->add_option("--method", methods, "methods to train for")->capture_default_str();
    train->add_option("--out", out, "model output directory")->required();
    train->add_option("--config", config_path, "pipeline config");

    auto* simulate = app.add_subcommand("simulate", "Run the sequential shutter evaluation");
    simulate->add_option("--data", data, "dataset directory or index JSON")->required();
    simulate->add_option("--models", models_dir, "directory written by train")->required();
    simulate->add_option("--method", method, "cnn-svm, svm-svm, svm-eye or majority")->required();
    simulate->add_option("--closing-time", closing_time, "minimum closing time T in seconds")
        ->check(CLI::Range(1, 60))
        ->capture_default_str();
    simulate->add_flag("--upper-bound", upper_bound,
                       "apply the open-shutter classifier at every second (hypothetical best case)");
    simulate->add_option("--fold", fold_filter, "restrict to one fold id");
    simulate->add_option("--out", out, "output directory")->required();
    simulate->add_option("--config", config_path, "pipeline config");

    auto* sweep = app.add_subcommand("sweep", "Cross-validate methods across closing times");
    sweep->add_option("--data", data, "dataset directory or index JSON")->required();
    sweep->add_option("--t-list", t_list, "comma-separated closing times")->capture_default_str();
    sweep->add_option("--schemes", schemes, "cross-validation schemes (loro, lopo)")
        ->capture_default_str();
    sweep->add_option("--methods", methods,
                      "methods to evaluate (also cnn-direct-upper, svm-combined-upper)")
        ->capture_default_str();
    sweep->add_option("--out", out, "output directory")->required();
    sweep->add_option("--config", config_path, "pipeline config");

    auto* report = app.add_subcommand("report", "Aggregate results and render charts");
    report->add_option("--in", in_dir, "directory containing cells.csv")->required();
    report->add_option("--out", out, "report output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) return run_synth(config_path, out);
        if (extract->parsed()) return run_extract(manifest, out, events_out, config_path);
        if (train->parsed()) return run_train(data, scheme, methods, out, config_path);
        if (simulate->parsed())
            return run_simulate(data, models_dir, method, upper_bound, closing_time, fold_filter,
                                out, config_path);
        if (sweep->parsed()) return run_sweep(data, t_list, schemes, methods, out, config_path);
        if (report->parsed()) return run_report(in_dir, out);
    } catch (const TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return kExitTraining;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
