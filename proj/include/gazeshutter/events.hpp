#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gazeshutter/types.hpp"

namespace gazeshutter {

// Interval of stable gaze. Position statistics are over member samples,
// pupil statistics over member pupil diameters; variances are population
// variances so single-sample fixations stay finite.
struct Fixation {
    double start = 0.0;
    double end = 0.0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    double position_var_x = 0.0;
    double position_var_y = 0.0;
    double pupil_mean = 0.0;
    double pupil_var = 0.0;

    double duration() const { return end - start; }
};

// Transition between two consecutive fixations. The symbol encodes the
// dominant displacement axis and whether the amplitude reached the "large"
// threshold: {l,r,u,d} for small and {L,R,U,D} for large saccades.
struct Saccade {
    double start = 0.0;
    double end = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double amplitude = 0.0;
    double direction = 0.0;  // radians, atan2(dy, dx)
    char symbol = 'r';
};

struct Blink {
    double start = 0.0;
    double end = 0.0;

    double duration() const { return end - start; }
};

struct EventParams {
    // Samples below this confidence carry no usable gaze position.
    double confidence_threshold = 0.8;
    // I-DT dispersion: (max x - min x) + (max y - min y), normalized units.
    double dispersion_threshold = 0.05;
    double min_fixation_duration = 0.1;  // seconds
    // Low-confidence runs inside these bounds are blinks; longer runs are
    // signal dropouts and produce no event.
    double min_blink_duration = 0.05;
    double max_blink_duration = 0.5;
    // A gap in valid samples longer than this splits the stream; events never
    // span it.
    double max_gap = 0.5;
    double large_saccade_threshold = 0.1;  // normalized amplitude
};

// Dispersion-threshold (I-DT) fixation detection over the valid samples.
// Each fixation is greedily maximal: appending the next valid sample would
// exceed the dispersion threshold (or the sample lies beyond max_gap).
std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples,
                                       const EventParams& params);

// Maximal low-confidence runs with duration within the blink bounds. A run's
// duration extends to the sample at which confidence recovers; a run still
// open at the end of the stream is treated as a dropout.
std::vector<Blink> detect_blinks(std::span<const GazeSample> samples, const EventParams& params);

// One saccade per consecutive fixation pair; displacement between centroids.
std::vector<Saccade> detect_saccades(std::span<const Fixation> fixations,
                                     const EventParams& params);

// Dominant axis picks the base letter (ties go to the horizontal axis),
// uppercase when the Euclidean amplitude reaches large_threshold.
char encode_saccade_char(double dx, double dy, double large_threshold);

struct EventStream {
    std::vector<Fixation> fixations;
    std::vector<Saccade> saccades;
    std::vector<Blink> blinks;
};

// Full segmentation of one recording's samples. The stream is split at
// dropouts (invalid runs outside the blink bounds and sample gaps beyond
// max_gap); fixations and saccades are derived per split so no event bridges
// a dropout.
EventStream segment_events(std::span<const GazeSample> samples, const EventParams& params);

// Debug dump, one row per event: kind,start,end,amplitude,symbol.
void write_events_csv(const std::filesystem::path& path, const EventStream& events);

}  // namespace gazeshutter
