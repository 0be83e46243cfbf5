#include "gazeshutter/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gazeshutter/config.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/rng.hpp"

namespace gazeshutter {

namespace {

constexpr double kPi = 3.141592653589793;

struct PersonOffsets {
    double fixation_duration = 0.0;
    double saccade_amplitude = 0.0;
    double horizontal_prob = 0.0;
    double blink_rate = 0.0;
    double pupil = 0.0;
    std::vector<double> scene;  // per-coordinate descriptor shift
};

PersonOffsets draw_person_offsets(const SynthConfig& cfg, Rng& rng) {
    PersonOffsets o;
    o.scene.assign(kDescriptorDim, 0.0);
    if (cfg.person_offset_scale > 0.0) {
        o.fixation_duration = cfg.person_offset_scale * rng.normal(0.0, 0.08);
        o.saccade_amplitude = cfg.person_offset_scale * rng.normal(0.0, 0.04);
        o.horizontal_prob = cfg.person_offset_scale * rng.normal(0.0, 0.18);
        o.blink_rate = cfg.person_offset_scale * rng.normal(0.0, 0.12);
        o.pupil = cfg.person_offset_scale * rng.normal(0.0, 6.0);
    }
    if (cfg.scene_person_sd > 0.0)
        for (double& v : o.scene) v = rng.normal(0.0, cfg.scene_person_sd);
    return o;
}

ClassEventParams offset_params(const ClassEventParams& base, const PersonOffsets& o) {
    ClassEventParams p = base;
    p.fixation_duration_mean = std::max(0.15, p.fixation_duration_mean + o.fixation_duration);
    p.saccade_amplitude_mean = std::max(0.06, p.saccade_amplitude_mean + o.saccade_amplitude);
    p.horizontal_prob = std::clamp(p.horizontal_prob + o.horizontal_prob, 0.05, 0.95);
    p.blink_rate = std::max(0.02, p.blink_rate + o.blink_rate);
    p.pupil_mean = std::max(8.0, p.pupil_mean + o.pupil);
    return p;
}

const char* kSensitiveEnvironments[] = {"office", "atm_lobby", "home_desk"};
const char* kSensitiveActivities[] = {"password_entry", "banking", "private_messaging"};
const char* kNonSensitiveEnvironments[] = {"street", "cafe", "campus"};
const char* kNonSensitiveActivities[] = {"walking", "eating", "chatting"};

struct Segment {
    double start, end;
    int level;
    bool sensitive;
};

std::vector<Segment> draw_segments(const SynthConfig& cfg, Rng& rng) {
    std::vector<Segment> segments;
    double cursor = 0.0;
    while (cursor < cfg.duration) {
        double length = rng.uniform(cfg.segment_min, cfg.segment_max);
        if (cfg.duration - (cursor + length) < cfg.segment_min) length = cfg.duration - cursor;
        Segment seg;
        seg.start = cursor;
        seg.end = cursor + length;
        seg.sensitive = rng.bernoulli(cfg.sensitive_prior);
        seg.level = seg.sensitive ? 1 + static_cast<int>(rng.uniform_below(2))
                                  : 3 + static_cast<int>(rng.uniform_below(5));
        segments.push_back(seg);
        cursor = seg.end;
    }
    if (cfg.ensure_both_classes && segments.size() > 1) {
        const bool first = segments.front().sensitive;
        const bool uniform_class = std::all_of(segments.begin(), segments.end(),
                                               [&](const Segment& s) { return s.sensitive == first; });
        if (uniform_class) {
            Segment& last = segments.back();
            last.sensitive = !first;
            last.level = last.sensitive ? 1 + static_cast<int>(rng.uniform_below(2))
                                        : 3 + static_cast<int>(rng.uniform_below(5));
        }
    }
    return segments;
}

// Piecewise gaze schedule: fixation dwells interleaved with short transit
// jumps and blink gaps.
struct Interval {
    enum class Kind { Fixation, Transit, Blink };
    Kind kind;
    double start, end;
    double x0, y0, x1, y1;  // transit interpolates, others hold (x0, y0)
    double pupil = 40.0;
};

const Segment& segment_at(const std::vector<Segment>& segments, double t) {
    for (const auto& s : segments)
        if (t >= s.start && t < s.end) return s;
    return segments.back();
}

std::vector<Interval> build_schedule(const SynthConfig& cfg, const std::vector<Segment>& segments,
                                     const ClassEventParams& sens, const ClassEventParams& non,
                                     Rng& rng) {
    std::vector<Interval> schedule;
    double t = 0.0;
    double x = 0.5, y = 0.5;
    const double transit = 2.0 / cfg.sample_rate;

    auto params_at = [&](double at) -> const ClassEventParams& {
        return segment_at(segments, at).sensitive ? sens : non;
    };

    double next_blink = rng.exponential(std::max(1e-6, params_at(0.0).blink_rate));
    while (t < cfg.duration) {
        const ClassEventParams& p = params_at(t);
        const double dwell =
            std::clamp(rng.normal(p.fixation_duration_mean, p.fixation_duration_sd), 0.15, 1.6);
        const double pupil = rng.normal(p.pupil_mean, 1.5);
        double fixation_end = std::min(t + dwell, cfg.duration);

        if (next_blink > t && next_blink < fixation_end - 0.05) {
            // blink interrupts this dwell
            schedule.push_back({Interval::Kind::Fixation, t, next_blink, x, y, x, y, pupil});
            const double blink_len = rng.uniform(0.12, 0.4);
            schedule.push_back({Interval::Kind::Blink, next_blink,
                                std::min(next_blink + blink_len, cfg.duration), x, y, x, y, pupil});
            t = std::min(next_blink + blink_len, cfg.duration);
            next_blink = t + rng.exponential(std::max(1e-6, p.blink_rate));
            continue;
        }

        schedule.push_back({Interval::Kind::Fixation, t, fixation_end, x, y, x, y, pupil});
        t = fixation_end;
        if (t >= cfg.duration) break;

        // saccade to the next dwell position
        const double amplitude =
            std::clamp(rng.normal(p.saccade_amplitude_mean, p.saccade_amplitude_sd), 0.06, 0.45);
        const bool horizontal = rng.bernoulli(p.horizontal_prob);
        double angle;
        if (horizontal) {
            const bool rightward = x < 0.2 ? true : (x > 0.8 ? false : rng.bernoulli(0.5));
            angle = (rightward ? 0.0 : kPi) + rng.normal(0.0, 0.15);
        } else {
            const bool upward = y < 0.2 ? true : (y > 0.8 ? false : rng.bernoulli(0.5));
            angle = (upward ? 0.5 : -0.5) * kPi + rng.normal(0.0, 0.15);
        }
        double nx = std::clamp(x + amplitude * std::cos(angle), 0.05, 0.95);
        double ny = std::clamp(y + amplitude * std::sin(angle), 0.05, 0.95);
        schedule.push_back({Interval::Kind::Transit, t, std::min(t + transit, cfg.duration), x, y,
                            nx, ny, pupil});
        t = std::min(t + transit, cfg.duration);
        x = nx;
        y = ny;
        if (next_blink <= t) next_blink = t + rng.exponential(std::max(1e-6, p.blink_rate));
    }
    return schedule;
}

std::vector<GazeSample> rasterize(const SynthConfig& cfg, const std::vector<Interval>& schedule,
                                  Rng& rng) {
    const auto frames = static_cast<std::size_t>(std::llround(cfg.duration * cfg.sample_rate));
    std::vector<GazeSample> samples;
    samples.reserve(frames);
    std::size_t active = 0;
    for (std::size_t k = 0; k < frames; ++k) {
        const double t = static_cast<double>(k) / cfg.sample_rate;
        while (active + 1 < schedule.size() && schedule[active].end <= t) ++active;
        const Interval& iv = schedule[active];

        GazeSample s;
        s.t = t;
        if (iv.kind == Interval::Kind::Blink) {
            s.x = iv.x0;
            s.y = iv.y0;
            s.pupil_diameter = iv.pupil;
            s.confidence = rng.uniform(0.0, 0.2);
        } else {
            double x = iv.x0, y = iv.y0;
            if (iv.kind == Interval::Kind::Transit && iv.end > iv.start) {
                const double u = (t - iv.start) / (iv.end - iv.start);
                x = iv.x0 + u * (iv.x1 - iv.x0);
                y = iv.y0 + u * (iv.y1 - iv.y0);
            }
            s.x = std::clamp(x + rng.uniform(-0.008, 0.008), 0.0, 1.0);
            s.y = std::clamp(y + rng.uniform(-0.008, 0.008), 0.0, 1.0);
            s.pupil_diameter = std::max(1.0, iv.pupil + rng.normal(0.0, 0.4));
            s.confidence = 0.97 + rng.uniform(0.0, 0.03);
        }
        samples.push_back(s);
    }
    return samples;
}

std::vector<SceneFrame> draw_scene(const SynthConfig& cfg, const std::vector<Segment>& segments,
                                   const std::vector<double>& direction,
                                   const PersonOffsets& offsets, Rng& rng) {
    std::vector<SceneFrame> frames;
    const auto seconds = static_cast<std::size_t>(std::llround(std::floor(cfg.duration)));
    frames.reserve(seconds);
    for (std::size_t s = 0; s < seconds; ++s) {
        const auto t = static_cast<double>(s);
        const double sign = segment_at(segments, t).sensitive ? 1.0 : -1.0;
        SceneFrame frame;
        frame.t = t;
        for (std::size_t i = 0; i < kDescriptorDim; ++i)
            frame.descriptor[i] = sign * 0.5 * cfg.scene_separation * direction[i] +
                                  offsets.scene[i] + rng.normal(0.0, cfg.scene_noise_sd);
        frames.push_back(frame);
    }
    return frames;
}

std::vector<AnnotationSegment> make_annotations(const std::vector<Segment>& segments, Rng& rng) {
    std::vector<AnnotationSegment> out;
    out.reserve(segments.size());
    for (const auto& seg : segments) {
        AnnotationSegment a;
        a.start = seg.start;
        a.end = seg.end;
        a.privacy_level = seg.level;
        if (seg.sensitive) {
            a.environment = kSensitiveEnvironments[rng.uniform_below(3)];
            a.activity = kSensitiveActivities[rng.uniform_below(3)];
        } else {
            a.environment = kNonSensitiveEnvironments[rng.uniform_below(3)];
            a.activity = kNonSensitiveActivities[rng.uniform_below(3)];
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace

Dataset generate_synthetic(const SynthConfig& cfg) {
    if (cfg.persons < 1 || cfg.recordings_per_person < 1)
        throw DataError("synthetic dataset needs at least one person and recording");
    if (cfg.duration <= cfg.segment_min || cfg.segment_min <= 0 ||
        cfg.segment_max < cfg.segment_min)
        throw DataError("invalid segment length configuration");
    if (cfg.sensitive_prior <= 0.0 || cfg.sensitive_prior >= 1.0)
        throw DataError("sensitive_prior must lie strictly between 0 and 1");
    if (cfg.sample_rate <= 0.0) throw DataError("sample_rate must be > 0");

    // Dataset-level cluster direction, shared by every recording.
    Rng dataset_rng(Rng::derive_seed(cfg.seed, 0));
    std::vector<double> direction(kDescriptorDim);
    double norm = 0.0;
    for (double& v : direction) {
        v = dataset_rng.normal();
        norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : direction) v /= norm;

    Dataset dataset;
    for (int person = 0; person < cfg.persons; ++person) {
        Rng person_rng(Rng::derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(person)));
        const PersonOffsets offsets = draw_person_offsets(cfg, person_rng);
        const ClassEventParams sens = offset_params(cfg.sensitive, offsets);
        const ClassEventParams non = offset_params(cfg.non_sensitive, offsets);

        for (int rec = 0; rec < cfg.recordings_per_person; ++rec) {
            Rng rng(Rng::derive_seed(cfg.seed, 1'000'000 +
                                                  static_cast<std::uint64_t>(person) * 100 +
                                                  static_cast<std::uint64_t>(rec)));
            Recording recording;
            char person_id[16];
            std::snprintf(person_id, sizeof(person_id), "p%02d", person + 1);
            recording.person_id = person_id;
            recording.recording_id = rec + 1;

            const std::vector<Segment> segments = draw_segments(cfg, rng);
            recording.annotations = make_annotations(segments, rng);
            const auto schedule = build_schedule(cfg, segments, sens, non, rng);
            recording.samples = rasterize(cfg, schedule, rng);
            recording.scene = draw_scene(cfg, segments, direction, offsets, rng);
            dataset.recordings.push_back(std::move(recording));
        }
    }
    return dataset;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    SynthConfig c;
    KeyValueFile f(path);
    c.persons = static_cast<int>(f.get_long("persons", c.persons));
    c.recordings_per_person =
        static_cast<int>(f.get_long("recordings_per_person", c.recordings_per_person));
    c.duration = f.get_double("duration", c.duration);
    c.sample_rate = f.get_double("sample_rate", c.sample_rate);
    c.segment_min = f.get_double("segment_min", c.segment_min);
    c.segment_max = f.get_double("segment_max", c.segment_max);
    c.sensitive_prior = f.get_double("sensitive_prior", c.sensitive_prior);
    c.ensure_both_classes = f.get_bool("ensure_both_classes", c.ensure_both_classes);

    auto load_class = [&](const std::string& prefix, ClassEventParams& p) {
        p.fixation_duration_mean =
            f.get_double(prefix + ".fixation_duration_mean", p.fixation_duration_mean);
        p.fixation_duration_sd =
            f.get_double(prefix + ".fixation_duration_sd", p.fixation_duration_sd);
        p.saccade_amplitude_mean =
            f.get_double(prefix + ".saccade_amplitude_mean", p.saccade_amplitude_mean);
        p.saccade_amplitude_sd =
            f.get_double(prefix + ".saccade_amplitude_sd", p.saccade_amplitude_sd);
        p.horizontal_prob = f.get_double(prefix + ".horizontal_prob", p.horizontal_prob);
        p.blink_rate = f.get_double(prefix + ".blink_rate", p.blink_rate);
        p.pupil_mean = f.get_double(prefix + ".pupil_mean", p.pupil_mean);
    };
    load_class("sensitive", c.sensitive);
    load_class("non_sensitive", c.non_sensitive);

    c.scene_separation = f.get_double("scene_separation", c.scene_separation);
    c.scene_noise_sd = f.get_double("scene_noise_sd", c.scene_noise_sd);
    c.person_offset_scale = f.get_double("person_offset_scale", c.person_offset_scale);
    c.scene_person_sd = f.get_double("scene_person_sd", c.scene_person_sd);
    c.seed = f.get_u64("seed", c.seed);
    f.finish();
    return c;
}

}  // namespace gazeshutter
