#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stobb/engine.hpp"
#include "stobb/svg.hpp"

namespace stobb {

inline std::string diagnostics_csv(const std::vector<DiagnosticsPoint>& series) {
    std::string out = "samples,feature_sets,boxes,singletons,updates,k,compression,success_rate\n";
    for (const DiagnosticsPoint& p : series) {
        out += std::to_string(p.samples) + "," + std::to_string(p.feature_sets) + "," +
               std::to_string(p.boxes) + "," + std::to_string(p.singletons) + "," +
               std::to_string(p.updates) + "," + std::to_string(p.k) + "," +
               format_double(p.compression) + "," + format_double(p.success_rate) + "\n";
    }
    return out;
}

inline std::vector<DiagnosticsPoint> parse_diagnostics_csv(const std::string& csv) {
    std::vector<DiagnosticsPoint> series;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 8) throw IoError("malformed diagnostics CSV row");
        DiagnosticsPoint p;
        p.samples = std::stoull(cells[0]);
        p.feature_sets = std::stoull(cells[1]);
        p.boxes = std::stoull(cells[2]);
        p.singletons = std::stoull(cells[3]);
        p.updates = std::stoull(cells[4]);
        p.k = std::stoull(cells[5]);
        p.compression = parse_double(cells[6]);
        p.success_rate = parse_double(cells[7]);
        series.push_back(p);
    }
    return series;
}

// CSV of the series plus an SVG line chart: ratios (compression, success
// rate) against the left axis, counts against the right axis.
inline void export_diagnostics(const std::vector<DiagnosticsPoint>& series,
                               const std::string& csv_path, const std::string& svg_path) {
    {
        std::ofstream out(csv_path);
        if (!out) throw IoError("cannot write " + csv_path);
        out << diagnostics_csv(series);
    }

    svg::Document doc(720, 420);
    if (!series.empty()) {
        double max_count = 1;
        for (const DiagnosticsPoint& p : series)
            max_count = std::max({max_count, double(p.boxes), double(p.feature_sets),
                                  double(p.singletons)});
        auto sx = [&](std::size_t i) {
            return 50.0 + double(i) / double(std::max<std::size_t>(series.size() - 1, 1)) * 620.0;
        };
        auto sy_ratio = [&](double r) { return 380.0 - r * 340.0; };
        auto sy_count = [&](double c) { return 380.0 - c / max_count * 340.0; };

        std::vector<std::pair<double, double>> compression, success, boxes, fsets, singles;
        for (std::size_t i = 0; i < series.size(); ++i) {
            compression.push_back({sx(i), sy_ratio(std::max(series[i].compression, 0.0))});
            success.push_back({sx(i), sy_ratio(series[i].success_rate)});
            boxes.push_back({sx(i), sy_count(double(series[i].boxes))});
            fsets.push_back({sx(i), sy_count(double(series[i].feature_sets))});
            singles.push_back({sx(i), sy_count(double(series[i].singletons))});
        }
        doc.polyline(compression, "#1f77b4");
        doc.polyline(success, "#2ca02c");
        doc.polyline(boxes, "#d62728");
        doc.polyline(fsets, "#ff7f0e");
        doc.polyline(singles, "#9467bd");
        doc.text(55, 16, "compression (blue), success rate (green) | boxes (red), "
                         "feature sets (orange), singletons (purple)");
        doc.text(10, 395, "0");
        doc.text(10, 45, "1");
    } else {
        doc.text(55, 20, "no diagnostics recorded");
    }
    std::ofstream out(svg_path);
    if (!out) throw IoError("cannot write " + svg_path);
    out << doc.str();
}

}  // namespace stobb
