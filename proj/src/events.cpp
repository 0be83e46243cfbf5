#include "gazeshutter/events.hpp"

#include <algorithm>
#include <cmath>

#include "gazeshutter/csvio.hpp"

namespace gazeshutter {

namespace {

bool is_valid(const GazeSample& s, const EventParams& p) {
    return s.confidence >= p.confidence_threshold;
}

// Maximal runs of valid samples; a run ends at an invalid sample or a time
// gap exceeding max_gap. Events are detected per run so nothing bridges a
// blink or dropout.
std::vector<std::span<const GazeSample>> valid_runs(std::span<const GazeSample> samples,
                                                    const EventParams& p) {
    std::vector<std::span<const GazeSample>> runs;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!is_valid(samples[i], p)) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < samples.size() && is_valid(samples[j], p) &&
               samples[j].t - samples[j - 1].t <= p.max_gap)
            ++j;
        runs.push_back(samples.subspan(i, j - i));
        i = j;
    }
    return runs;
}

struct RunningStats {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double variance() const {  // population
        if (n == 0) return 0.0;
        const double m = mean();
        return std::max(0.0, sum_sq / static_cast<double>(n) - m * m);
    }
};

Fixation make_fixation(std::span<const GazeSample> members) {
    RunningStats xs, ys, pupil;
    for (const auto& s : members) {
        xs.add(s.x);
        ys.add(s.y);
        pupil.add(s.pupil_diameter);
    }
    Fixation f;
    f.start = members.front().t;
    f.end = members.back().t;
    f.centroid_x = xs.mean();
    f.centroid_y = ys.mean();
    f.position_var_x = xs.variance();
    f.position_var_y = ys.variance();
    f.pupil_mean = pupil.mean();
    f.pupil_var = pupil.variance();
    return f;
}

std::vector<Fixation> idt_run(std::span<const GazeSample> run, const EventParams& p) {
    std::vector<Fixation> fixations;
    std::size_t i = 0;
    while (i < run.size()) {
        double min_x = run[i].x, max_x = run[i].x;
        double min_y = run[i].y, max_y = run[i].y;
        std::size_t j = i;
        while (j + 1 < run.size()) {
            const auto& s = run[j + 1];
            const double dispersion = std::max(max_x, s.x) - std::min(min_x, s.x) +
                                      std::max(max_y, s.y) - std::min(min_y, s.y);
            if (dispersion > p.dispersion_threshold) break;
            min_x = std::min(min_x, s.x);
            max_x = std::max(max_x, s.x);
            min_y = std::min(min_y, s.y);
            max_y = std::max(max_y, s.y);
            ++j;
        }
        if (run[j].t - run[i].t >= p.min_fixation_duration) {
            fixations.push_back(make_fixation(run.subspan(i, j - i + 1)));
            i = j + 1;
        } else {
            ++i;
        }
    }
    return fixations;
}

}  // namespace

std::vector<Fixation> detect_fixations(std::span<const GazeSample> samples,
                                       const EventParams& params) {
    std::vector<Fixation> fixations;
    for (const auto& run : valid_runs(samples, params)) {
        auto part = idt_run(run, params);
        fixations.insert(fixations.end(), part.begin(), part.end());
    }
    return fixations;
}

std::vector<Blink> detect_blinks(std::span<const GazeSample> samples, const EventParams& params) {
    std::vector<Blink> blinks;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (is_valid(samples[i], params)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < samples.size() && !is_valid(samples[j], params)) ++j;
        if (j < samples.size()) {  // run at end of stream has no recovery point
            const double duration = samples[j].t - samples[i].t;
            if (duration >= params.min_blink_duration && duration <= params.max_blink_duration)
                blinks.push_back({samples[i].t, samples[j].t});
        }
        i = j;
    }
    return blinks;
}

char encode_saccade_char(double dx, double dy, double large_threshold) {
    const bool large = std::hypot(dx, dy) >= large_threshold;
    char base;
    if (std::abs(dx) >= std::abs(dy))
        base = dx >= 0.0 ? 'r' : 'l';
    else
        base = dy >= 0.0 ? 'u' : 'd';
    return large ? static_cast<char>(base - 'a' + 'A') : base;
}

std::vector<Saccade> detect_saccades(std::span<const Fixation> fixations,
                                     const EventParams& params) {
    std::vector<Saccade> saccades;
    if (fixations.size() < 2) return saccades;
    saccades.reserve(fixations.size() - 1);
    for (std::size_t i = 0; i + 1 < fixations.size(); ++i) {
        const Fixation& a = fixations[i];
        const Fixation& b = fixations[i + 1];
        Saccade s;
        s.start = a.end;
        s.end = b.start;
        s.dx = b.centroid_x - a.centroid_x;
        s.dy = b.centroid_y - a.centroid_y;
        s.amplitude = std::hypot(s.dx, s.dy);
        s.direction = std::atan2(s.dy, s.dx);
        s.symbol = encode_saccade_char(s.dx, s.dy, params.large_saccade_threshold);
        saccades.push_back(s);
    }
    return saccades;
}

EventStream segment_events(std::span<const GazeSample> samples, const EventParams& params) {
    EventStream events;
    for (const auto& run : valid_runs(samples, params)) {
        auto fixations = idt_run(run, params);
        auto saccades = detect_saccades(fixations, params);
        events.fixations.insert(events.fixations.end(), fixations.begin(), fixations.end());
        events.saccades.insert(events.saccades.end(), saccades.begin(), saccades.end());
    }
    events.blinks = detect_blinks(samples, params);
    return events;
}

void write_events_csv(const std::filesystem::path& path, const EventStream& events) {
    struct Row {
        double start;
        std::string line;
    };
    std::vector<Row> rows;
    for (const auto& f : events.fixations)
        rows.push_back({f.start, "fixation," + format_double(f.start) + "," +
                                     format_double(f.end) + ",,"});
    for (const auto& s : events.saccades)
        rows.push_back({s.start, "saccade," + format_double(s.start) + "," + format_double(s.end) +
                                     "," + format_double(s.amplitude) + "," + s.symbol});
    for (const auto& b : events.blinks)
        rows.push_back({b.start, "blink," + format_double(b.start) + "," + format_double(b.end) +
                                     ",,"});
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.start < b.start; });

    auto out = open_output(path);
    out << "kind,start,end,amplitude,symbol\n";
    for (const auto& row : rows) out << row.line << '\n';
}

}  // namespace gazeshutter
