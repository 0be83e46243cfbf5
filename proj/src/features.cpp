#include "gazeshutter/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <unordered_map>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/errors.hpp"

namespace gazeshutter {

namespace {

double mean_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double pop_var_of(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double max_of(std::span<const double> v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// Events intersecting [a, b); both interval kinds are half-open at b, an
// event ending exactly at a does not intersect.
template <typename Event>
std::vector<Event> events_in_span(const std::vector<Event>& events, double a, double b) {
    std::vector<Event> out;
    for (const auto& e : events)
        if (e.start < b && e.end > a) out.push_back(e);
    return out;
}

}  // namespace

std::vector<EyeWindow> sliding_windows(const EventStream& events, double t_start, double t_limit,
                                       double duration, double step) {
    std::vector<EyeWindow> windows;
    if (duration <= 0.0 || step <= 0.0) throw DataError("window duration and step must be > 0");
    const double first = t_start + duration;
    if (t_limit + 1e-9 < first) return windows;

    const auto count = static_cast<std::size_t>(std::floor((t_limit - first) / step + 1e-9)) + 1;
    windows.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        EyeWindow w;
        w.t_end = first + static_cast<double>(k) * step;
        w.duration = duration;
        const double a = w.span_start();
        const double b = w.t_end;
        w.fixations = events_in_span(events.fixations, a, b);
        w.saccades = events_in_span(events.saccades, a, b);
        w.blinks = events_in_span(events.blinks, a, b);
        windows.push_back(std::move(w));
    }
    return windows;
}

std::array<double, 8> fixation_features(const EyeWindow& window) {
    std::array<double, 8> out{};
    const auto& fx = window.fixations;
    if (fx.empty()) return out;

    std::vector<double> durations, pos_means, pos_vars;
    durations.reserve(fx.size());
    pos_means.reserve(fx.size());
    pos_vars.reserve(fx.size());
    for (const auto& f : fx) {
        durations.push_back(f.duration());
        pos_means.push_back(0.5 * (f.centroid_x + f.centroid_y));
        pos_vars.push_back(0.5 * (f.position_var_x + f.position_var_y));
    }
    out[0] = static_cast<double>(fx.size()) / window.duration;
    out[1] = mean_of(durations);
    out[2] = max_of(durations);
    out[3] = pop_var_of(durations);
    out[4] = mean_of(pos_means);
    out[5] = pop_var_of(pos_means);
    out[6] = mean_of(pos_vars);
    out[7] = pop_var_of(pos_vars);
    return out;
}

std::array<double, 12> saccade_features(const EyeWindow& window) {
    std::array<double, 12> out{};
    const auto& sc = window.saccades;
    if (sc.empty()) return out;

    std::vector<double> amplitudes;
    amplitudes.reserve(sc.size());
    double n_small = 0, n_large = 0, n_right = 0, n_left = 0;
    for (const auto& s : sc) {
        amplitudes.push_back(s.amplitude);
        (std::isupper(static_cast<unsigned char>(s.symbol)) ? n_large : n_small) += 1.0;
        const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(s.symbol)));
        if (base == 'r') n_right += 1.0;
        if (base == 'l') n_left += 1.0;
    }
    const auto n = static_cast<double>(sc.size());
    out[0] = n / window.duration;
    out[1] = n_small / window.duration;
    out[2] = n_large / window.duration;
    out[3] = n_right / window.duration;
    out[4] = n_left / window.duration;
    out[5] = n_small / n;
    out[6] = n_large / n;
    out[7] = n_right / n;
    out[8] = n_left / n;
    out[9] = mean_of(amplitudes);
    out[10] = max_of(amplitudes);
    out[11] = pop_var_of(amplitudes);
    return out;
}

std::array<double, 24> wordbook_features(std::string_view symbols) {
    std::array<double, 24> out{};
    for (std::size_t n = 1; n <= 4; ++n) {
        const std::size_t base = (n - 1) * 6;
        if (symbols.size() < n) continue;
        std::unordered_map<std::string, std::size_t> counts;
        for (std::size_t i = 0; i + n <= symbols.size(); ++i)
            ++counts[std::string(symbols.substr(i, n))];

        std::vector<double> nonzero;
        nonzero.reserve(counts.size());
        for (const auto& [gram, c] : counts) nonzero.push_back(static_cast<double>(c));
        const double mx = max_of(nonzero);
        const double mn = *std::min_element(nonzero.begin(), nonzero.end());
        out[base + 0] = static_cast<double>(nonzero.size());
        out[base + 1] = mx;
        out[base + 2] = mn;
        out[base + 3] = mx - mn;
        out[base + 4] = mean_of(nonzero);
        out[base + 5] = pop_var_of(nonzero);
    }
    return out;
}

std::array<double, 3> blink_features(const EyeWindow& window) {
    std::array<double, 3> out{};
    if (window.blinks.empty()) return out;
    std::vector<double> durations;
    durations.reserve(window.blinks.size());
    for (const auto& b : window.blinks) durations.push_back(b.duration());
    out[0] = static_cast<double>(window.blinks.size()) / window.duration;
    out[1] = mean_of(durations);
    out[2] = pop_var_of(durations);
    return out;
}

std::array<double, 4> pupil_features(const EyeWindow& window) {
    std::array<double, 4> out{};
    if (window.fixations.empty()) return out;
    std::vector<double> means, vars;
    means.reserve(window.fixations.size());
    vars.reserve(window.fixations.size());
    for (const auto& f : window.fixations) {
        means.push_back(f.pupil_mean);
        vars.push_back(f.pupil_var);
    }
    out[0] = mean_of(means);
    out[1] = pop_var_of(means);
    out[2] = mean_of(vars);
    out[3] = pop_var_of(vars);
    return out;
}

FeatureVector52 assemble_vector(const EyeWindow& window) {
    FeatureVector52 v{};
    std::size_t at = 0;
    for (double x : fixation_features(window)) v[at++] = x;
    for (double x : saccade_features(window)) v[at++] = x;
    v[at++] = window.fixations.empty()
                  ? 0.0
                  : static_cast<double>(window.saccades.size()) /
                        static_cast<double>(window.fixations.size());

    std::string symbols;
    symbols.reserve(window.saccades.size());
    for (const auto& s : window.saccades) symbols.push_back(s.symbol);
    for (double x : wordbook_features(symbols)) v[at++] = x;
    for (double x : blink_features(window)) v[at++] = x;
    for (double x : pupil_features(window)) v[at++] = x;

    for (double x : v)
        if (!std::isfinite(x)) throw DataError("non-finite feature value");
    return v;
}

std::vector<FeatureRow> feature_stream(const Recording& recording, const EventParams& params,
                                       double duration, double step) {
    std::vector<FeatureRow> rows;
    if (recording.samples.empty()) return rows;
    const EventStream events = segment_events(recording.samples, params);
    const double t0 = recording.samples.front().t;
    const double t1 = recording.samples.back().t;
    for (const auto& window : sliding_windows(events, t0, t1, duration, step))
        rows.push_back({window.t_end, assemble_vector(window)});
    return rows;
}

void write_features_csv(const std::filesystem::path& path, std::span<const FeatureRow> rows) {
    auto out = open_output(path);
    out << "t_end";
    for (std::size_t i = 0; i < kEyeFeatureDim; ++i) out << ",f" << i;
    out << '\n';
    for (const auto& row : rows) {
        out << format_double(row.t_end);
        for (double v : row.values) out << ',' << format_double(v);
        out << '\n';
    }
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    std::vector<std::string> header{"t_end"};
    for (std::size_t i = 0; i < kEyeFeatureDim; ++i) header.push_back("f" + std::to_string(i));
    expect_header(reader, header);

    std::vector<FeatureRow> rows;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 1 + kEyeFeatureDim)
            throw DataError(path.string() + ": expected " + std::to_string(1 + kEyeFeatureDim) +
                            " columns, line " + std::to_string(reader.line_no));
        FeatureRow row;
        row.t_end = parse_double_field(fields[0], path, reader.line_no, "t_end");
        for (std::size_t i = 0; i < kEyeFeatureDim; ++i)
            row.values[i] =
                parse_double_field(fields[1 + i], path, reader.line_no, "f" + std::to_string(i));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace gazeshutter
