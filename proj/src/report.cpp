#include "gazeshutter/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gazeshutter/csvio.hpp"
#include "gazeshutter/errors.hpp"

namespace gazeshutter {

void write_cells_csv(const std::filesystem::path& path, std::span<const CellMetrics> cells) {
    auto out = open_output(path);
    out << "scheme,method,closing_time,fold,person,recording,accuracy,tp,fp,tn,fn,closings,"
           "mean_gap_minutes\n";
    for (const auto& c : cells) {
        out << to_string(c.scheme) << ',' << to_string(c.method) << ',' << c.min_close << ','
            << c.fold_id << ',' << c.person << ',' << c.recording_id << ','
            << format_double(c.metrics.accuracy) << ',' << c.metrics.tp << ',' << c.metrics.fp
            << ',' << c.metrics.tn << ',' << c.metrics.fn << ',' << c.metrics.closings << ',';
        if (c.metrics.mean_gap_minutes) out << format_double(*c.metrics.mean_gap_minutes);
        out << '\n';
    }
}

std::vector<CellMetrics> read_cells_csv(const std::filesystem::path& path) {
    CsvReader reader(path);
    expect_header(reader, {"scheme", "method", "closing_time", "fold", "person", "recording",
                           "accuracy", "tp", "fp", "tn", "fn", "closings", "mean_gap_minutes"});
    std::vector<CellMetrics> cells;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != 13)
            throw DataError(path.string() + ": expected 13 columns, line " +
                            std::to_string(reader.line_no));
        CellMetrics c;
        c.scheme = parse_scheme(fields[0]);
        c.method = parse_method_name(fields[1]);
        c.min_close = static_cast<int>(parse_int_field(fields[2], path, reader.line_no,
                                                       "closing_time"));
        c.fold_id = fields[3];
        c.person = fields[4];
        c.recording_id =
            static_cast<int>(parse_int_field(fields[5], path, reader.line_no, "recording"));
        c.metrics.accuracy = parse_double_field(fields[6], path, reader.line_no, "accuracy");
        c.metrics.tp = parse_int_field(fields[7], path, reader.line_no, "tp");
        c.metrics.fp = parse_int_field(fields[8], path, reader.line_no, "fp");
        c.metrics.tn = parse_int_field(fields[9], path, reader.line_no, "tn");
        c.metrics.fn = parse_int_field(fields[10], path, reader.line_no, "fn");
        c.metrics.closings =
            static_cast<int>(parse_int_field(fields[11], path, reader.line_no, "closings"));
        if (!fields[12].empty())
            c.metrics.mean_gap_minutes =
                parse_double_field(fields[12], path, reader.line_no, "mean_gap_minutes");
        cells.push_back(std::move(c));
    }
    return cells;
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

std::vector<AggregateRow> aggregate_cells(std::span<const CellMetrics> cells) {
    using Key = std::tuple<Scheme, Method, int>;
    std::map<Key, std::vector<const CellMetrics*>> groups;
    for (const auto& c : cells) groups[{c.scheme, c.method, c.min_close}].push_back(&c);

    std::vector<AggregateRow> rows;
    for (const auto& [key, group] : groups) {
        AggregateRow row;
        row.scheme = std::get<0>(key);
        row.method = std::get<1>(key);
        row.min_close = std::get<2>(key);

        // person -> fold -> accuracies of the fold's test recordings
        std::map<std::string, std::map<std::string, std::vector<double>>> by_person;
        std::vector<double> flat, gaps, closings;
        for (const CellMetrics* c : group) {
            by_person[c->person][c->fold_id].push_back(c->metrics.accuracy);
            flat.push_back(c->metrics.accuracy);
            closings.push_back(static_cast<double>(c->metrics.closings));
            if (c->metrics.mean_gap_minutes) gaps.push_back(*c->metrics.mean_gap_minutes);
        }
        std::vector<double> person_means;
        for (const auto& [person, folds] : by_person) {
            std::vector<double> fold_means;
            for (const auto& [fold, values] : folds) fold_means.push_back(mean_of(values));
            person_means.push_back(mean_of(fold_means));
        }
        row.accuracy_mean = mean_of(person_means);
        row.accuracy_sd = sd_of(person_means);
        row.accuracy_mean_flat = mean_of(flat);
        row.gap_mean_minutes = mean_of(gaps);
        row.gap_count = gaps.size();
        row.closings_mean = mean_of(closings);
        rows.push_back(row);
    }
    return rows;
}

void write_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows) {
    auto out = open_output(path);
    out << "scheme,method,closing_time,accuracy_mean,accuracy_sd,accuracy_mean_flat,"
           "gap_mean_minutes,gap_count,closings_mean\n";
    for (const auto& r : rows)
        out << to_string(r.scheme) << ',' << to_string(r.method) << ',' << r.min_close << ','
            << format_double(r.accuracy_mean) << ',' << format_double(r.accuracy_sd) << ','
            << format_double(r.accuracy_mean_flat) << ',' << format_double(r.gap_mean_minutes)
            << ',' << r.gap_count << ',' << format_double(r.closings_mean) << '\n';
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

ChartGeometry write_svg_chart(const std::filesystem::path& path, const std::string& title,
                              const std::string& x_label, const std::string& y_label,
                              std::span<const ChartSeries> series) {
    ChartGeometry g;
    g.x_min = 1e300;
    g.x_max = -1e300;
    g.y_min = 1e300;
    g.y_max = -1e300;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            g.x_min = std::min(g.x_min, x);
            g.x_max = std::max(g.x_max, x);
            g.y_min = std::min(g.y_min, y);
            g.y_max = std::max(g.y_max, y);
        }
    }
    if (g.x_min > g.x_max) {
        g.x_min = 0;
        g.x_max = 1;
    }
    if (g.x_min == g.x_max) {
        g.x_min -= 0.5;
        g.x_max += 0.5;
    }
    if (g.y_min > g.y_max) {
        g.y_min = 0;
        g.y_max = 1;
    }
    const double pad = (g.y_max - g.y_min) * 0.08 + 1e-6;
    g.y_min -= pad;
    g.y_max += pad;

    auto out = open_output(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << g.width << "\" height=\""
        << g.height << "\">\n";
    out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "  <text x=\"" << g.width / 2 << "\" y=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // axes
    const double x0 = g.margin_left, x1 = g.width - g.margin_right;
    const double y0 = g.height - g.margin_bottom, y1 = g.margin_top;
    out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << (x0 + x1) / 2 << "\" y=\"" << g.height - 8
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
        << "</text>\n";
    out << "  <text x=\"14\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << (y0 + y1) / 2 << ")\">" << y_label << "</text>\n";

    // tick labels at the extremes
    for (double tx : {g.x_min, g.x_max})
        out << "  <text x=\"" << g.x_to_px(tx) << "\" y=\"" << y0 + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << format_double(tx) << "</text>\n";
    for (double ty : {g.y_min, g.y_max})
        out << "  <text x=\"" << x0 - 6 << "\" y=\"" << g.y_to_px(ty) + 3
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << format_double(ty) << "</text>\n";

    std::size_t color = 0;
    for (const auto& s : series) {
        out << "  <polyline fill=\"none\" stroke=\"" << kSeriesColors[color % 6]
            << "\" stroke-width=\"1.5\" data-series=\"" << s.name << "\" points=\"";
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            if (i) out << ' ';
            out << format_double(g.x_to_px(s.points[i].first)) << ','
                << format_double(g.y_to_px(s.points[i].second));
        }
        out << "\"/>\n";
        out << "  <text x=\"" << x1 + 8 << "\" y=\"" << y1 + 14 + 16 * static_cast<double>(color)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << kSeriesColors[color % 6]
            << "\">" << s.name << "</text>\n";
        ++color;
    }
    // embed the mapping so readers can invert pixel coordinates exactly
    out << "  <!-- map x:[" << format_double(g.x_min) << "," << format_double(g.x_max) << "] y:["
        << format_double(g.y_min) << "," << format_double(g.y_max) << "] box:["
        << format_double(x0) << "," << format_double(y1) << "," << format_double(x1) << ","
        << format_double(y0) << "] -->\n";
    out << "</svg>\n";
    return g;
}

void write_report(std::span<const CellMetrics> cells, const std::filesystem::path& out_dir) {
    if (cells.empty()) throw DataError("no result rows to report");
    std::filesystem::create_directories(out_dir);
    const auto rows = aggregate_cells(cells);
    write_aggregate_csv(out_dir / "aggregate.csv", rows);

    std::vector<Scheme> schemes;
    for (const auto& r : rows)
        if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end())
            schemes.push_back(r.scheme);

    for (Scheme scheme : schemes) {
        std::map<Method, ChartSeries> accuracy_series, gap_series;
        for (const auto& r : rows) {
            if (r.scheme != scheme) continue;
            auto& acc = accuracy_series[r.method];
            acc.name = to_string(r.method);
            acc.points.emplace_back(r.min_close, r.accuracy_mean);
            if (r.gap_count > 0) {
                auto& gap = gap_series[r.method];
                gap.name = to_string(r.method);
                gap.points.emplace_back(r.min_close, r.gap_mean_minutes);
            }
        }
        auto flatten = [](const std::map<Method, ChartSeries>& m) {
            std::vector<ChartSeries> v;
            for (const auto& [method, series] : m) v.push_back(series);
            return v;
        };
        const auto acc = flatten(accuracy_series);
        write_svg_chart(out_dir / ("accuracy_vs_closing_time_" + to_string(scheme) + ".svg"),
                        "Accuracy vs closing time (" + to_string(scheme) + ")",
                        "closing time [s]", "accuracy", acc);
        const auto gaps = flatten(gap_series);
        if (!gaps.empty())
            write_svg_chart(out_dir / ("gap_vs_closing_time_" + to_string(scheme) + ".svg"),
                            "Time between closings (" + to_string(scheme) + ")",
                            "closing time [s]", "minutes between closings", gaps);
    }
}

}  // namespace gazeshutter
