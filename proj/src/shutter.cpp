#include "gazeshutter/shutter.hpp"

#include <json.hpp>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/errors.hpp"

namespace gazeshutter {

PrivacyClass shutter_step(ShutterState& state, std::optional<PrivacyClass> open_prediction,
                          PrivacyClass eye_prediction, std::int64_t t) {
    using Status = ShutterState::Status;
    if (state.status == Status::Open) {
        if (!open_prediction)
            throw DataError("open-state prediction missing while the shutter is open");
        if (*open_prediction == PrivacyClass::Sensitive) {
            state.status = Status::Closed;
            state.closed_since = t;
            return PrivacyClass::Sensitive;
        }
        return PrivacyClass::NonSensitive;
    }

    if (open_prediction)
        throw DataError("open-state prediction supplied while the shutter is closed");
    if (t - state.closed_since < state.min_close) return PrivacyClass::Sensitive;
    if (eye_prediction == PrivacyClass::NonSensitive) {
        state.status = Status::Open;
        return PrivacyClass::NonSensitive;
    }
    return PrivacyClass::Sensitive;
}

SimResult run_simulation(std::span<const SecondLabel> labels, const SimPredictors& predictors,
                         int min_close) {
    if (min_close < 1 || min_close > 60)
        throw DataError("closing time must lie in 1..60 seconds");
    if (labels.empty()) throw DataError("simulation needs at least one labeled second");

    SimResult result;
    result.open_name = predictors.open_name;
    result.closed_name = predictors.closed_name;
    result.trace.reserve(labels.size());

    ShutterState state;
    state.min_close = min_close;
    for (const auto& [t, truth] : labels) {
        TraceRecord record;
        record.t = t;
        record.truth = truth;
        if (state.status == ShutterState::Status::Open) {
            record.used = ClassifierUsed::OpenModel;
            record.predicted = shutter_step(state, predictors.open_model(t),
                                            PrivacyClass::NonSensitive, t);
        } else if (t - state.closed_since < state.min_close) {
            record.used = ClassifierUsed::ForcedClosed;
            record.predicted = shutter_step(state, std::nullopt, PrivacyClass::Sensitive, t);
        } else {
            record.used = ClassifierUsed::ClosedModel;
            record.predicted = shutter_step(state, std::nullopt, predictors.closed_model(t), t);
        }
        record.status = state.status;
        result.trace.push_back(record);
    }
    result.metrics = accuracy(result.trace, labels);
    return result;
}

Metrics accuracy(std::span<const TraceRecord> trace, std::span<const SecondLabel> labels) {
    if (trace.size() != labels.size())
        throw DataError("trace and label sequences differ in length");

    Metrics m;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const bool predicted = trace[i].predicted == PrivacyClass::Sensitive;
        const bool actual = labels[i].label == PrivacyClass::Sensitive;
        if (predicted && actual)
            ++m.tp;
        else if (predicted && !actual)
            ++m.fp;
        else if (!predicted && !actual)
            ++m.tn;
        else
            ++m.fn;
    }
    const long total = m.tp + m.fp + m.tn + m.fn;
    m.accuracy = total > 0 ? static_cast<double>(m.tp + m.tn) / static_cast<double>(total) : 0.0;

    ShutterState::Status previous = ShutterState::Status::Open;
    std::vector<std::int64_t> closings;
    for (const auto& record : trace) {
        if (previous == ShutterState::Status::Open &&
            record.status == ShutterState::Status::Closed)
            closings.push_back(record.t);
        previous = record.status;
    }
    m.closings = static_cast<int>(closings.size());
    m.mean_gap_minutes = mean_time_between_closings(trace);
    return m;
}

std::optional<double> mean_time_between_closings(std::span<const TraceRecord> trace) {
    std::vector<std::int64_t> closings;
    ShutterState::Status previous = ShutterState::Status::Open;
    for (const auto& record : trace) {
        if (previous == ShutterState::Status::Open &&
            record.status == ShutterState::Status::Closed)
            closings.push_back(record.t);
        previous = record.status;
    }
    if (closings.size() < 2) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 1; i < closings.size(); ++i)
        sum += static_cast<double>(closings[i] - closings[i - 1]);
    return sum / static_cast<double>(closings.size() - 1) / 60.0;
}

namespace {

const char* classifier_name(const SimResult& r, ClassifierUsed used) {
    switch (used) {
        case ClassifierUsed::OpenModel:
            return r.open_name.c_str();
        case ClassifierUsed::ClosedModel:
            return r.closed_name.c_str();
        default:
            return "forced-closed";
    }
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const SimResult& result) {
    auto out = open_output(path);
    out << "t,status,predicted,truth,classifier\n";
    for (const auto& record : result.trace)
        out << record.t << ','
            << (record.status == ShutterState::Status::Open ? "open" : "closed") << ','
            << to_string(record.predicted) << ',' << to_string(record.truth) << ','
            << classifier_name(result, record.used) << '\n';
}

void write_metrics_json(const std::filesystem::path& path, const Metrics& metrics) {
    nlohmann::json j;
    j["accuracy"] = metrics.accuracy;
    j["tp"] = metrics.tp;
    j["fp"] = metrics.fp;
    j["tn"] = metrics.tn;
    j["fn"] = metrics.fn;
    j["closings"] = metrics.closings;
    if (metrics.mean_gap_minutes)
        j["mean_gap_minutes"] = *metrics.mean_gap_minutes;
    else
        j["mean_gap_minutes"] = nullptr;
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

}  // namespace gazeshutter
