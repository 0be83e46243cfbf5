#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Camera shutter with a minimum closing time: once closed it stays closed
// for at least min_close seconds before the eye-only classifier may reopen
// it. The evaluation starts with the shutter open.
struct ShutterState {
    enum class Status { Open, Closed };

    Status status = Status::Open;
    std::int64_t closed_since = 0;  // meaningful only while Closed
    int min_close = 1;              // seconds, 1..60
};

// One tick at second t. While open, the open-state prediction rules; a
// sensitive call closes the shutter. While closed, the prediction is forced
// sensitive until min_close seconds have elapsed, after which the eye-only
// prediction decides between reopening and staying closed. The open-state
// prediction must be present exactly when the shutter is open: with the
// shutter closed no scene imagery exists.
//
// The returned class is what the system reports for second t, i.e. the class
// implied by the post-update shutter position.
PrivacyClass shutter_step(ShutterState& state, std::optional<PrivacyClass> open_prediction,
                          PrivacyClass eye_prediction, std::int64_t t);

enum class ClassifierUsed { OpenModel, ClosedModel, ForcedClosed };

struct TraceRecord {
    std::int64_t t = 0;
    ShutterState::Status status = ShutterState::Status::Open;  // after the update
    PrivacyClass predicted = PrivacyClass::NonSensitive;
    PrivacyClass truth = PrivacyClass::NonSensitive;
    ClassifierUsed used = ClassifierUsed::OpenModel;
};

struct Metrics {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    int closings = 0;
    std::optional<double> mean_gap_minutes;  // unset with fewer than 2 closings
};

// Predictions for one second, supplied lazily so closed-shutter seconds
// never touch scene data.
struct SimPredictors {
    std::function<PrivacyClass(std::int64_t)> open_model;
    std::function<PrivacyClass(std::int64_t)> closed_model;
    std::string open_name = "open-model";
    std::string closed_name = "svm-eye";
};

struct SimResult {
    std::vector<TraceRecord> trace;
    Metrics metrics;
    std::string open_name, closed_name;
};

// Sequential evaluation over the labeled seconds: predict, update the
// shutter, record. Sensitive counts as the positive class.
SimResult run_simulation(std::span<const SecondLabel> labels, const SimPredictors& predictors,
                         int min_close);

// Confusion counts and accuracy of a trace against labels of equal length.
Metrics accuracy(std::span<const TraceRecord> trace, std::span<const SecondLabel> labels);

// Mean minutes between consecutive shutter-closing events; empty when the
// trace holds fewer than two closings.
std::optional<double> mean_time_between_closings(std::span<const TraceRecord> trace);

// CSV dump: t,status,predicted,truth,classifier.
void write_trace_csv(const std::filesystem::path& path, const SimResult& result);

// JSON: {accuracy, tp, fp, tn, fn, closings, mean_gap_minutes}.
void write_metrics_json(const std::filesystem::path& path, const Metrics& metrics);

}  // namespace gazeshutter
