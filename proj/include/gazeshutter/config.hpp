#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "gazeshutter/events.hpp"

namespace gazeshutter {

// Plain-text `key = value` file; '#' starts a comment, unknown keys are
// rejected. Consumers pull typed values and then call finish() to surface
// typos.
class KeyValueFile {
public:
    KeyValueFile() = default;
    explicit KeyValueFile(const std::filesystem::path& path);

    double get_double(const std::string& key, double fallback);
    long get_long(const std::string& key, long fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key, const std::string& fallback);

    // Throws DataError if any key was never consumed.
    void finish() const;

private:
    std::filesystem::path path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, bool> consumed_;
};

// Every detection threshold and model hyperparameter in one place.
struct PipelineConfig {
    EventParams events;
    double window_duration = 30.0;  // seconds
    double window_step = 1.0;
    int cutoff = 2;  // privacy level at or below which a second is sensitive

    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 = 1/dimension
    double svm_tolerance = 1e-3;
    long svm_max_iterations = 2'000'000;

    int scene_epochs = 400;
    double scene_learning_rate = 0.2;
    std::uint64_t scene_seed = 7;

    // Training windows are subsampled by this stride (evaluation always runs
    // at every second); consecutive windows overlap by 29/30 so a stride > 1
    // mostly removes duplicates.
    int train_stride = 1;
};

PipelineConfig default_config();
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace gazeshutter
