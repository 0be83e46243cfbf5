#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "gazeshutter/events.hpp"
#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Analysis window covering [t_end - duration, t_end) with the event
// subsequences intersecting that span. Windows are attributed to their end
// time, so a classifier evaluated at second t only sees past data.
struct EyeWindow {
    double t_end = 0.0;
    double duration = 30.0;
    std::vector<Fixation> fixations;
    std::vector<Saccade> saccades;
    std::vector<Blink> blinks;

    double span_start() const { return t_end - duration; }
};

// Windows at t_end = t_start + duration, + step, ... while t_end <= t_limit.
// A stream shorter than one window yields nothing.
std::vector<EyeWindow> sliding_windows(const EventStream& events, double t_start, double t_limit,
                                       double duration, double step);

// Feature blocks. Degenerate windows (no events) produce zeros, never NaN.
// All variances are population variances.
std::array<double, 8> fixation_features(const EyeWindow& window);
std::array<double, 12> saccade_features(const EyeWindow& window);
std::array<double, 24> wordbook_features(std::string_view symbols);
std::array<double, 3> blink_features(const EyeWindow& window);
std::array<double, 4> pupil_features(const EyeWindow& window);

// Layout: fixation(8) | saccade(12) | saccade-to-fixation ratio(1) |
// wordbook(24) | blink(3) | pupil(4).
FeatureVector52 assemble_vector(const EyeWindow& window);

struct FeatureRow {
    double t_end = 0.0;
    FeatureVector52 values{};
};

// Event segmentation plus per-second feature vectors for a whole recording.
std::vector<FeatureRow> feature_stream(const Recording& recording, const EventParams& params,
                                       double duration = 30.0, double step = 1.0);

// CSV dump: t_end,f0..f51.
void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

}  // namespace gazeshutter
