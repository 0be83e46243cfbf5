#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gazeshutter/eval.hpp"

namespace gazeshutter {

// Per-recording result rows:
// scheme,method,closing_time,fold,person,recording,accuracy,tp,fp,tn,fn,closings,mean_gap_minutes
void write_cells_csv(const std::filesystem::path& path, std::span<const CellMetrics> cells);
std::vector<CellMetrics> read_cells_csv(const std::filesystem::path& path);

struct AggregateRow {
    Scheme scheme = Scheme::LeaveOneRecordingOut;
    Method method = Method::SvmEye;
    int min_close = 1;
    // Two-level mean: per-person mean of that person's folds, then mean over
    // persons. The flat mean over all rows is reported alongside.
    double accuracy_mean = 0.0;
    double accuracy_sd = 0.0;  // across persons
    double accuracy_mean_flat = 0.0;
    double gap_mean_minutes = 0.0;  // over rows with >= 2 closings
    std::size_t gap_count = 0;
    double closings_mean = 0.0;
};

std::vector<AggregateRow> aggregate_cells(std::span<const CellMetrics> cells);
void write_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows);

// Minimal SVG line chart. The data-to-pixel mapping is linear within the
// plot box; Geometry makes it invertible for downstream checks.
struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct ChartGeometry {
    double width = 640, height = 420;
    double margin_left = 60, margin_right = 150, margin_top = 30, margin_bottom = 45;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    double x_to_px(double x) const {
        return margin_left + (x - x_min) / (x_max - x_min) * (width - margin_left - margin_right);
    }
    double y_to_px(double y) const {
        return height - margin_bottom -
               (y - y_min) / (y_max - y_min) * (height - margin_top - margin_bottom);
    }
    double px_to_x(double px) const {
        return x_min + (px - margin_left) / (width - margin_left - margin_right) * (x_max - x_min);
    }
    double px_to_y(double py) const {
        return y_min +
               (height - margin_bottom - py) / (height - margin_top - margin_bottom) *
                   (y_max - y_min);
    }
};

ChartGeometry write_svg_chart(const std::filesystem::path& path, const std::string& title,
                              const std::string& x_label, const std::string& y_label,
                              std::span<const ChartSeries> series);

// aggregate.csv plus accuracy/gap vs closing-time charts per scheme.
void write_report(std::span<const CellMetrics> cells, const std::filesystem::path& out_dir);

}  // namespace gazeshutter
