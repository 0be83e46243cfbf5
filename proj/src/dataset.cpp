#include "gazeshutter/dataset.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/errors.hpp"
#include "gazeshutter/scene.hpp"

namespace gazeshutter {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<GazeSample> parse_gaze_csv(const fs::path& path) {
    CsvReader reader(path);
    expect_header(reader, {"t", "x", "y", "pupil_diameter", "confidence"});

    std::vector<GazeSample> samples;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 5)
            throw DataError(path.string() + ": expected 5 columns, got " +
                            std::to_string(fields.size()) + ", line " +
                            std::to_string(reader.line_no));
        GazeSample s;
        s.t = parse_double_field(fields[0], path, reader.line_no, "t");
        s.x = parse_double_field(fields[1], path, reader.line_no, "x");
        s.y = parse_double_field(fields[2], path, reader.line_no, "y");
        s.pupil_diameter = parse_double_field(fields[3], path, reader.line_no, "pupil_diameter");
        s.confidence = parse_double_field(fields[4], path, reader.line_no, "confidence");
        if (!(s.confidence >= 0.0 && s.confidence <= 1.0))
            throw DataError(path.string() + ": confidence out of range, line " +
                            std::to_string(reader.line_no));
        if (!samples.empty() && !(s.t > samples.back().t))
            throw DataError(path.string() + ": non-monotone timestamp " + format_double(s.t) +
                            ", line " + std::to_string(reader.line_no));
        samples.push_back(s);
    }
    return samples;
}

std::vector<AnnotationSegment> parse_annotations(const fs::path& path) {
    CsvReader reader(path);
    expect_header(reader, {"start", "end", "environment", "activity", "privacy_level"});

    std::vector<AnnotationSegment> segments;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 5)
            throw DataError(path.string() + ": expected 5 columns, got " +
                            std::to_string(fields.size()) + ", line " +
                            std::to_string(reader.line_no));
        AnnotationSegment seg;
        seg.start = parse_double_field(fields[0], path, reader.line_no, "start");
        seg.end = parse_double_field(fields[1], path, reader.line_no, "end");
        seg.environment = fields[2];
        seg.activity = fields[3];
        seg.privacy_level =
            static_cast<int>(parse_int_field(fields[4], path, reader.line_no, "privacy_level"));
        if (!(seg.start < seg.end))
            throw DataError(path.string() + ": segment start must precede end, line " +
                            std::to_string(reader.line_no));
        if (seg.privacy_level < 1 || seg.privacy_level > 7)
            throw DataError(path.string() + ": privacy_level outside 1..7, line " +
                            std::to_string(reader.line_no));
        if (!segments.empty()) {
            const double prev_end = segments.back().end;
            if (seg.start < prev_end)
                throw DataError(path.string() + ": overlap at t=" + format_double(seg.start) +
                                ", line " + std::to_string(reader.line_no));
            if (seg.start > prev_end)
                throw DataError(path.string() + ": gap between t=" + format_double(prev_end) +
                                " and t=" + format_double(seg.start) + ", line " +
                                std::to_string(reader.line_no));
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

namespace {

std::vector<std::string> scene_header() {
    std::vector<std::string> header;
    header.reserve(1 + kDescriptorDim);
    header.emplace_back("t");
    for (std::size_t i = 0; i < kDescriptorDim; ++i) header.push_back("d" + std::to_string(i));
    return header;
}

}  // namespace

std::vector<SceneFrame> parse_scene_csv(const fs::path& path) {
    CsvReader reader(path);
    expect_header(reader, scene_header());

    std::vector<SceneFrame> frames;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 1 + kDescriptorDim)
            throw DataError(path.string() + ": expected " + std::to_string(1 + kDescriptorDim) +
                            " columns, got " + std::to_string(fields.size()) + ", line " +
                            std::to_string(reader.line_no));
        SceneFrame frame;
        frame.t = parse_double_field(fields[0], path, reader.line_no, "t");
        for (std::size_t i = 0; i < kDescriptorDim; ++i) {
            frame.descriptor[i] =
                parse_double_field(fields[1 + i], path, reader.line_no, "d" + std::to_string(i));
            if (!std::isfinite(frame.descriptor[i]))
                throw DataError(path.string() + ": non-finite descriptor value, line " +
                                std::to_string(reader.line_no));
        }
        if (!frames.empty() && !(frame.t > frames.back().t))
            throw DataError(path.string() + ": non-monotone timestamp, line " +
                            std::to_string(reader.line_no));
        frames.push_back(frame);
    }
    return frames;
}

std::vector<SceneFrame> parse_scene_images(const fs::path& manifest) {
    CsvReader reader(manifest);
    expect_header(reader, {"t", "relative_path"});

    const fs::path base = manifest.parent_path();
    std::vector<SceneFrame> frames;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 2)
            throw DataError(manifest.string() + ": expected 2 columns, line " +
                            std::to_string(reader.line_no));
        SceneFrame frame;
        frame.t = parse_double_field(fields[0], manifest, reader.line_no, "t");
        frame.descriptor = base_descriptor(base / fields[1]);
        if (!frames.empty() && !(frame.t > frames.back().t))
            throw DataError(manifest.string() + ": non-monotone timestamp, line " +
                            std::to_string(reader.line_no));
        frames.push_back(frame);
    }
    return frames;
}

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return j;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path candidate(p);
    return candidate.is_absolute() ? candidate : base / candidate;
}

}  // namespace

Recording load_recording(const fs::path& manifest) {
    const json j = read_json(manifest);
    for (const char* key : {"person_id", "recording_id", "gaze", "annotations", "scene"})
        if (!j.contains(key))
            throw DataError(manifest.string() + ": manifest missing key '" + std::string(key) + "'");

    const fs::path base = manifest.parent_path();
    Recording rec;
    rec.person_id = j.at("person_id").get<std::string>();
    rec.recording_id = j.at("recording_id").get<int>();
    rec.samples = parse_gaze_csv(resolve(base, j.at("gaze").get<std::string>()));
    rec.annotations = parse_annotations(resolve(base, j.at("annotations").get<std::string>()));

    const fs::path scene_path = resolve(base, j.at("scene").get<std::string>());
    rec.scene = scene_path.extension() == ".csv" ? parse_scene_csv(scene_path)
                                                 : parse_scene_images(scene_path);

    if (rec.samples.empty()) throw DataError(manifest.string() + ": recording has no gaze samples");
    if (!rec.annotations.empty()) {
        const double t0 = rec.samples.front().t;
        const double t1 = rec.samples.back().t;
        if (rec.annotations.front().start < t0 - 0.5 || rec.annotations.back().end > t1 + 1.5)
            throw DataError(manifest.string() + ": annotations extend outside the sampled range");
    }
    return rec;
}

Dataset load_dataset(const fs::path& index) {
    const json j = read_json(index);
    if (!j.contains("recordings") || !j.at("recordings").is_array())
        throw DataError(index.string() + ": expected {\"recordings\": [...]}");

    Dataset dataset;
    const fs::path base = index.parent_path();
    for (const auto& entry : j.at("recordings"))
        dataset.recordings.push_back(load_recording(resolve(base, entry.get<std::string>())));
    return dataset;
}

void write_gaze_csv(const fs::path& path, std::span<const GazeSample> samples) {
    auto out = open_output(path);
    out << "t,x,y,pupil_diameter,confidence\n";
    for (const auto& s : samples)
        out << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
            << format_double(s.pupil_diameter) << ',' << format_double(s.confidence) << '\n';
}

void write_annotations_csv(const fs::path& path, std::span<const AnnotationSegment> segments) {
    auto out = open_output(path);
    out << "start,end,environment,activity,privacy_level\n";
    for (const auto& seg : segments)
        out << format_double(seg.start) << ',' << format_double(seg.end) << ',' << seg.environment
            << ',' << seg.activity << ',' << seg.privacy_level << '\n';
}

void write_scene_csv(const fs::path& path, std::span<const SceneFrame> frames) {
    auto out = open_output(path);
    out << "t";
    for (std::size_t i = 0; i < kDescriptorDim; ++i) out << ",d" << i;
    out << '\n';
    for (const auto& frame : frames) {
        out << format_double(frame.t);
        for (double v : frame.descriptor) out << ',' << format_double(v);
        out << '\n';
    }
}

fs::path write_recording(const Recording& recording, const fs::path& dir) {
    fs::create_directories(dir);
    write_gaze_csv(dir / "gaze.csv", recording.samples);
    write_annotations_csv(dir / "annotations.csv", recording.annotations);
    write_scene_csv(dir / "scene.csv", recording.scene);

    json j;
    j["person_id"] = recording.person_id;
    j["recording_id"] = recording.recording_id;
    j["gaze"] = "gaze.csv";
    j["annotations"] = "annotations.csv";
    j["scene"] = "scene.csv";
    const fs::path manifest = dir / "manifest.json";
    auto out = open_output(manifest);
    out << j.dump(2) << '\n';
    return manifest;
}

fs::path write_dataset(const Dataset& dataset, const fs::path& dir) {
    fs::create_directories(dir);
    json index;
    index["recordings"] = json::array();
    for (const auto& rec : dataset.recordings) {
        const std::string name = rec.person_id + "_r" + std::to_string(rec.recording_id);
        write_recording(rec, dir / name);
        index["recordings"].push_back(name + "/manifest.json");
    }
    const fs::path index_path = dir / "dataset.json";
    auto out = open_output(index_path);
    out << index.dump(2) << '\n';
    return index_path;
}

PrivacyClass label_from_level(int level, int cutoff) {
    if (level < 1 || level > 7)
        throw DataError("privacy level " + std::to_string(level) + " outside 1..7");
    if (cutoff < 1 || cutoff > 7)
        throw DataError("cut-off " + std::to_string(cutoff) + " outside 1..7");
    return level <= cutoff ? PrivacyClass::Sensitive : PrivacyClass::NonSensitive;
}

std::vector<SecondLabel> labels_per_second(const Recording& recording, int cutoff) {
    if (recording.annotations.empty()) throw DataError("recording has no annotations");

    const double start = recording.annotations.front().start;
    const double end = recording.annotations.back().end;
    std::vector<SecondLabel> labels;
    std::size_t idx = 0;
    for (auto s = static_cast<std::int64_t>(std::ceil(start));
         static_cast<double>(s) < end; ++s) {
        const auto ts = static_cast<double>(s);
        while (idx < recording.annotations.size() && recording.annotations[idx].end <= ts) ++idx;
        if (idx >= recording.annotations.size() || recording.annotations[idx].start > ts)
            throw DataError("second " + std::to_string(s) + " not covered by any annotation");
        labels.push_back({s, label_from_level(recording.annotations[idx].privacy_level, cutoff)});
    }
    return labels;
}

}  // namespace gazeshutter
