#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gazeshutter/types.hpp"

namespace gazeshutter {

// -- parsing ---------------------------------------------------------------

// Header: t,x,y,pupil_diameter,confidence. Timestamps must be strictly
// increasing and confidence in [0,1]; violations report the line number.
std::vector<GazeSample> parse_gaze_csv(const std::filesystem::path& path);

// Header: start,end,environment,activity,privacy_level. Segments must be
// ordered, non-overlapping and contiguous (no gaps); levels in 1..7.
std::vector<AnnotationSegment> parse_annotations(const std::filesystem::path& path);

// Header: t,d0,...,d1023.
std::vector<SceneFrame> parse_scene_csv(const std::filesystem::path& path);

// Image manifest (header: t,relative_path); each referenced image is decoded
// and reduced to its 1024-d descriptor at load time.
std::vector<SceneFrame> parse_scene_images(const std::filesystem::path& manifest);

// Per-recording manifest JSON: {person_id, recording_id, gaze, annotations,
// scene}. Relative paths resolve against the manifest's directory. A scene
// path ending in .csv is read as descriptors, otherwise as an image manifest.
Recording load_recording(const std::filesystem::path& manifest);

// Dataset index JSON: {"recordings": [manifest paths]}.
Dataset load_dataset(const std::filesystem::path& index);

// -- serialization ---------------------------------------------------------
// Floats are written with shortest round-trip precision, so write + re-parse
// reproduces every value bit for bit.

void write_gaze_csv(const std::filesystem::path& path, std::span<const GazeSample> samples);
void write_annotations_csv(const std::filesystem::path& path,
                           std::span<const AnnotationSegment> segments);
void write_scene_csv(const std::filesystem::path& path, std::span<const SceneFrame> frames);

// Writes gaze/annotations/scene CSVs plus the manifest into `dir`, returns
// the manifest path.
std::filesystem::path write_recording(const Recording& recording,
                                      const std::filesystem::path& dir);

// Writes every recording under dir/<person>_<recording>/ plus dataset.json,
// returns the index path.
std::filesystem::path write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

// -- labels ----------------------------------------------------------------

inline constexpr int kDefaultCutoff = 2;

// Levels at or below the cut-off are privacy-sensitive.
PrivacyClass label_from_level(int level, int cutoff = kDefaultCutoff);

// Ground truth at every covered integer second; second s takes the class of
// the segment containing instant s (segments own [start, end)).
std::vector<SecondLabel> labels_per_second(const Recording& recording,
                                           int cutoff = kDefaultCutoff);

}  // namespace gazeshutter
