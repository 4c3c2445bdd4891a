#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sohkan {

/// One polyline on a chart. Leave color empty to pick from the built-in
/// palette by series index.
struct PlotSeries {
    std::string label;
    std::string color;
    bool dashed = false;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line chart: axes with tick labels, polylines, legend. Covers the
/// plots this tool emits without pulling in a plotting dependency.
struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width_px = 860;
    int height_px = 520;
    /// Decade ticks; nonpositive values are clamped to the smallest positive
    /// sample. Falls back to a linear axis when no sample is positive.
    bool log_y = false;
    /// Dashed horizontal marker, e.g. a threshold line.
    std::optional<double> rule_y;
    std::vector<PlotSeries> series;
};

/// Writes the chart as a standalone SVG file. Output is deterministic: fixed
/// float formatting, series drawn in order, no timestamps.
void write_line_chart_svg(const LineChart& chart, const std::string& path);

}  // namespace sohkan
