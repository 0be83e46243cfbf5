#include <doctest.h>

#include <cmath>

#include "gazeshutter/events.hpp"
#include "gazeshutter/rng.hpp"

using namespace gazeshutter;

namespace {

std::vector<GazeSample> constant_stream(std::size_t n, double x, double y, double t0 = 0.0,
                                        double dt = 1.0 / 30, double confidence = 0.99) {
    std::vector<GazeSample> samples;
    for (std::size_t i = 0; i < n; ++i)
        samples.push_back({t0 + static_cast<double>(i) * dt, x, y, 40.0, confidence});
    return samples;
}

}  // namespace

TEST_CASE("dwell with zero dispersion becomes exactly one fixation") {
    EventParams p;
    p.dispersion_threshold = 0.02;
    p.min_fixation_duration = 0.1;
    const auto samples = constant_stream(40, 0.5, 0.5);
    const auto fixations = detect_fixations(samples, p);
    REQUIRE(fixations.size() == 1);
    CHECK(fixations[0].start == samples.front().t);
    CHECK(fixations[0].end == samples.back().t);
    CHECK(fixations[0].centroid_x == doctest::Approx(0.5));
    CHECK(fixations[0].position_var_x == doctest::Approx(0.0));
}

TEST_CASE("alternating far positions produce no fixation") {
    EventParams p;
    std::vector<GazeSample> samples;
    for (int i = 0; i < 60; ++i) {
        const double v = (i % 2 == 0) ? 0.1 : 0.9;
        samples.push_back({i / 30.0, v, v, 40.0, 0.99});
    }
    CHECK(detect_fixations(samples, p).empty());
}

TEST_CASE("two dwell clusters separated by a jump give two fixations") {
    // Hand-traced dispersion walk: six samples near (0.2, 0.2), a jump, six
    // samples near (0.7, 0.7). Dispersion inside each cluster is 0.02, the
    // joined window would be ~1.0.
    EventParams p;
    p.dispersion_threshold = 0.05;
    p.min_fixation_duration = 0.1;
    std::vector<GazeSample> samples;
    const double coords[12][2] = {{0.20, 0.20}, {0.21, 0.20}, {0.20, 0.21}, {0.22, 0.20},
                                  {0.21, 0.21}, {0.20, 0.22}, {0.70, 0.70}, {0.71, 0.70},
                                  {0.70, 0.71}, {0.72, 0.70}, {0.71, 0.71}, {0.70, 0.72}};
    for (int i = 0; i < 12; ++i)
        samples.push_back({i / 30.0, coords[i][0], coords[i][1], 40.0, 0.99});

    const auto fixations = detect_fixations(samples, p);
    REQUIRE(fixations.size() == 2);
    CHECK(fixations[0].start == samples[0].t);
    CHECK(fixations[0].end == samples[5].t);
    CHECK(fixations[1].start == samples[6].t);
    CHECK(fixations[1].end == samples[11].t);
    CHECK(fixations[0].centroid_x == doctest::Approx((0.20 + 0.21 + 0.20 + 0.22 + 0.21 + 0.20) / 6));
}

TEST_CASE("fixation detection of empty input is empty") {
    EventParams p;
    CHECK(detect_fixations({}, p).empty());
    CHECK(detect_blinks({}, p).empty());
}

TEST_CASE("a bounded low-confidence run is one blink") {
    EventParams p;
    p.min_blink_duration = 0.05;
    p.max_blink_duration = 0.5;
    auto samples = constant_stream(30, 0.5, 0.5);
    for (int i = 10; i < 16; ++i) samples[i].confidence = 0.1;  // 6 frames = 0.2 s
    const auto blinks = detect_blinks(samples, p);
    REQUIRE(blinks.size() == 1);
    CHECK(blinks[0].start == samples[10].t);
    CHECK(blinks[0].end == samples[16].t);
    CHECK(blinks[0].duration() == doctest::Approx(0.2));
}

TEST_CASE("a long low-confidence run is a dropout, not a blink") {
    EventParams p;
    p.max_blink_duration = 0.5;
    auto samples = constant_stream(150, 0.5, 0.5);  // 5 s
    for (int i = 30; i < 120; ++i) samples[i].confidence = 0.1;  // 3 s
    CHECK(detect_blinks(samples, p).empty());
}

TEST_CASE("injected blinks are recovered with matching intervals") {
    EventParams p;
    Rng rng(17);
    auto samples = constant_stream(30 * 120, 0.5, 0.5);  // 2 minutes
    std::vector<std::pair<std::size_t, std::size_t>> injected;
    std::size_t at = 200;
    for (int k = 0; k < 7; ++k) {
        const auto frames = 2 + rng.uniform_below(13);  // 0.067 .. 0.47 s
        injected.push_back({at, at + frames});
        for (std::size_t i = at; i < at + frames; ++i) samples[i].confidence = 0.2;
        at += frames + 300 + rng.uniform_below(100);
    }
    const auto blinks = detect_blinks(samples, p);
    REQUIRE(blinks.size() == 7);
    for (std::size_t k = 0; k < 7; ++k) {
        CHECK(blinks[k].start == samples[injected[k].first].t);
        CHECK(blinks[k].end == samples[injected[k].second].t);
    }
}

TEST_CASE("saccades connect consecutive fixation centroids") {
    EventParams p;
    Fixation a;
    a.start = 0.0;
    a.end = 0.3;
    a.centroid_x = 0.2;
    a.centroid_y = 0.5;
    Fixation b = a;
    b.start = 0.35;
    b.end = 0.7;
    b.centroid_x = 0.6;
    const std::vector<Fixation> fixations{a, b};
    const auto saccades = detect_saccades(fixations, p);
    REQUIRE(saccades.size() == 1);
    CHECK(saccades[0].amplitude == doctest::Approx(0.4));
    CHECK(saccades[0].direction == doctest::Approx(0.0));
    CHECK(saccades[0].start == 0.3);
    CHECK(saccades[0].end == 0.35);
    CHECK(saccades[0].symbol == 'R');

    CHECK(detect_saccades({fixations.data(), 1}, p).empty());
    CHECK(detect_saccades({}, p).empty());
}

TEST_CASE("collinear fixations give equal-amplitude saccades") {
    EventParams p;
    std::vector<Fixation> fixations;
    for (int i = 0; i < 5; ++i) {
        Fixation f;
        f.start = i * 0.4;
        f.end = i * 0.4 + 0.3;
        f.centroid_x = 0.2 + 0.1 * i;
        f.centroid_y = 0.5;
        fixations.push_back(f);
    }
    const auto saccades = detect_saccades(fixations, p);
    REQUIRE(saccades.size() == 4);
    for (const auto& s : saccades) CHECK(s.amplitude == doctest::Approx(0.1));
}

TEST_CASE("saccade characters follow the dominant-axis rule") {
    CHECK(encode_saccade_char(0.3, 0.0, 0.2) == 'R');
    CHECK(encode_saccade_char(-0.05, 0.01, 0.2) == 'l');
    CHECK(encode_saccade_char(0.0, 0.15, 0.1) == 'U');
    CHECK(encode_saccade_char(0.0, -0.05, 0.1) == 'd');
    CHECK(encode_saccade_char(0.05, 0.05, 0.2) == 'r');  // tie goes horizontal

    // independent rule table over random displacements
    Rng rng(23);
    for (int i = 0; i < 500; ++i) {
        const double dx = rng.uniform(-0.4, 0.4);
        const double dy = rng.uniform(-0.4, 0.4);
        const double threshold = rng.uniform(0.05, 0.3);
        char expected;
        if (std::abs(dx) >= std::abs(dy))
            expected = dx >= 0 ? 'r' : 'l';
        else
            expected = dy >= 0 ? 'u' : 'd';
        if (std::sqrt(dx * dx + dy * dy) >= threshold)
            expected = static_cast<char>(expected - 'a' + 'A');
        CHECK(encode_saccade_char(dx, dy, threshold) == expected);
    }
}

TEST_CASE("event streams are ordered and non-overlapping") {
    EventParams p;
    Rng rng(31);
    std::vector<GazeSample> samples;
    double x = 0.5, y = 0.5;
    for (int i = 0; i < 30 * 60; ++i) {
        if (i % 40 == 0) {
            x = rng.uniform(0.1, 0.9);
            y = rng.uniform(0.1, 0.9);
        }
        const double confidence = (i % 173) < 4 ? 0.1 : 0.99;
        samples.push_back({i / 30.0, x + rng.uniform(-0.005, 0.005),
                           y + rng.uniform(-0.005, 0.005), 40.0, confidence});
    }
    const auto events = segment_events(samples, p);
    REQUIRE(!events.fixations.empty());
    REQUIRE(!events.blinks.empty());
    for (std::size_t i = 1; i < events.fixations.size(); ++i)
        CHECK(events.fixations[i].start >= events.fixations[i - 1].end);
    for (std::size_t i = 1; i < events.blinks.size(); ++i)
        CHECK(events.blinks[i].start >= events.blinks[i - 1].end);
    for (const auto& f : events.fixations)
        for (const auto& b : events.blinks) {
            const bool disjoint = f.end <= b.start || b.end <= f.start;
            CHECK(disjoint);
        }
}

TEST_CASE("scaling coordinates and thresholds together preserves segmentation") {
    EventParams p;
    Rng rng(41);
    std::vector<GazeSample> samples;
    double x = 0.4, y = 0.4;
    for (int i = 0; i < 600; ++i) {
        if (i % 35 == 0) {
            x = rng.uniform(0.2, 0.8);
            y = rng.uniform(0.2, 0.8);
        }
        samples.push_back(
            {i / 30.0, x + rng.uniform(-0.004, 0.004), y + rng.uniform(-0.004, 0.004), 40.0, 0.99});
    }
    const auto base = segment_events(samples, p);

    const double scale = 0.37;
    auto scaled = samples;
    for (auto& s : scaled) {
        s.x *= scale;
        s.y *= scale;
    }
    EventParams scaled_params = p;
    scaled_params.dispersion_threshold *= scale;
    scaled_params.large_saccade_threshold *= scale;
    const auto scaled_events = segment_events(scaled, scaled_params);

    REQUIRE(scaled_events.fixations.size() == base.fixations.size());
    REQUIRE(scaled_events.saccades.size() == base.saccades.size());
    for (std::size_t i = 0; i < base.fixations.size(); ++i) {
        CHECK(scaled_events.fixations[i].start == base.fixations[i].start);
        CHECK(scaled_events.fixations[i].end == base.fixations[i].end);
    }
    for (std::size_t i = 0; i < base.saccades.size(); ++i)
        CHECK(scaled_events.saccades[i].symbol == base.saccades[i].symbol);
}

TEST_CASE("streams separated by a long dropout segment independently") {
    EventParams p;
    auto part_a = constant_stream(30, 0.3, 0.3, 0.0);
    auto part_b = constant_stream(30, 0.8, 0.8, 10.0);

    auto events_a = segment_events(part_a, p);
    auto events_b = segment_events(part_b, p);

    std::vector<GazeSample> joined = part_a;
    joined.insert(joined.end(), part_b.begin(), part_b.end());
    const auto events = segment_events(joined, p);

    CHECK(events.fixations.size() == events_a.fixations.size() + events_b.fixations.size());
    CHECK(events.saccades.size() == events_a.saccades.size() + events_b.saccades.size());
    CHECK(events.blinks.size() == events_a.blinks.size() + events_b.blinks.size());
}

TEST_CASE("saccade count is fixation count minus one per contiguous stream") {
    EventParams p;
    Rng rng(57);
    std::vector<GazeSample> samples;
    double x = 0.5, y = 0.5;
    for (int i = 0; i < 900; ++i) {
        if (i % 25 == 0) {
            x = std::clamp(x + rng.uniform(-0.3, 0.3), 0.1, 0.9);
            y = std::clamp(y + rng.uniform(-0.3, 0.3), 0.1, 0.9);
        }
        samples.push_back({i / 30.0, x, y, 40.0, 0.99});
    }
    const auto fixations = detect_fixations(samples, p);
    const auto saccades = detect_saccades(fixations, p);
    CHECK(saccades.size() ==
          (fixations.empty() ? 0 : fixations.size() - 1));
}
