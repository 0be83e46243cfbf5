#pragma once

#include <cstdint>
#include <filesystem>

#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Class-conditional generator parameters for the simulated gaze process.
struct ClassEventParams {
    double fixation_duration_mean = 0.25;  // seconds
    double fixation_duration_sd = 0.08;
    double saccade_amplitude_mean = 0.22;  // normalized units
    double saccade_amplitude_sd = 0.05;
    double horizontal_prob = 0.85;  // probability a saccade is left/right
    double blink_rate = 0.15;       // blinks per second
    double pupil_mean = 38.0;       // pixels
};

struct SynthConfig {
    int persons = 5;
    int recordings_per_person = 3;
    double duration = 600.0;  // seconds per recording
    double sample_rate = 30.0;

    double segment_min = 60.0;  // annotated segment lengths, seconds
    double segment_max = 240.0;
    double sensitive_prior = 0.5;
    // A recording whose segments all share one class gets its last segment
    // flipped, so per-recording training always sees both classes.
    bool ensure_both_classes = true;

    ClassEventParams sensitive{0.50, 0.10, 0.07, 0.02, 0.25, 0.45, 52.0};
    ClassEventParams non_sensitive{};

    // Scene descriptors form two Gaussian clusters separated by
    // scene_separation along a random unit direction; 0 removes all scene
    // signal.
    double scene_separation = 6.0;
    double scene_noise_sd = 1.0;

    // Person-specific parameter offsets; 0 disables them. With offsets on,
    // person-independent evaluation is harder than person-specific by
    // construction.
    double person_offset_scale = 0.0;
    double scene_person_sd = 0.0;

    std::uint64_t seed = 1;
};

SynthConfig load_synth_config(const std::filesystem::path& path);

// Fully seeded generation: same config, same dataset, byte for byte.
Dataset generate_synthetic(const SynthConfig& config);

}  // namespace gazeshutter
