#include "sohkan/svg.hpp"

#include "sohkan/log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sohkan {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 18;
constexpr int kMarginTop = 38;
constexpr int kMarginBottom = 50;

std::string fmt_px(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> ticks;
};

/// Round tick spacing to 1, 2 or 5 times a power of ten.
Axis linear_axis(double lo, double hi, int target_ticks) {
    if (!(hi > lo)) {
        const double pad = std::max(0.5, std::abs(lo) * 0.05);
        lo -= pad;
        hi += pad;
    }
    const double raw = (hi - lo) / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double mult : {1.0, 2.0, 5.0}) {
        if (mult * mag >= raw) {
            step = mult * mag;
            break;
        }
    }
    Axis axis;
    axis.lo = lo;
    axis.hi = hi;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
        axis.ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    }
    return axis;
}

Axis decade_axis(double lo_log, double hi_log) {
    Axis axis;
    axis.lo = lo_log;
    axis.hi = hi_log;
    int first = static_cast<int>(std::ceil(lo_log - 1e-9));
    int last = static_cast<int>(std::floor(hi_log + 1e-9));
    if (last < first) {
        first = static_cast<int>(std::floor(lo_log));
        last = first + 1;
        axis.lo = first;
        axis.hi = last;
    }
    for (int e = first; e <= last; ++e) axis.ticks.push_back(e);
    return axis;
}

}  // namespace

void write_line_chart_svg(const LineChart& chart, const std::string& path) {
    if (chart.series.empty()) throw std::invalid_argument("chart has no series");
    for (const PlotSeries& s : chart.series) {
        if (s.x.size() != s.y.size() || s.x.empty()) {
            throw std::invalid_argument("series '" + s.label + "' is empty or mismatched");
        }
    }
    if (chart.width_px < 200 || chart.height_px < 150) {
        throw std::invalid_argument("chart canvas is too small");
    }

    bool log_y = chart.log_y;
    double min_pos = std::numeric_limits<double>::infinity();
    if (log_y) {
        for (const PlotSeries& s : chart.series) {
            for (double v : s.y) {
                if (v > 0.0) min_pos = std::min(min_pos, v);
            }
        }
        if (!std::isfinite(min_pos)) {
            logging::warn("log axis requested but no positive samples; plotting linearly");
            log_y = false;
        }
    }
    const auto y_value = [&](double v) {
        if (!log_y) return v;
        return std::log10(v > 0.0 ? v : min_pos);
    };

    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const PlotSeries& s : chart.series) {
        for (double v : s.x) {
            x_lo = std::min(x_lo, v);
            x_hi = std::max(x_hi, v);
        }
        for (double v : s.y) {
            const double t = y_value(v);
            y_lo = std::min(y_lo, t);
            y_hi = std::max(y_hi, t);
        }
    }
    if (chart.rule_y && (!log_y || *chart.rule_y > 0.0)) {
        y_lo = std::min(y_lo, y_value(*chart.rule_y));
        y_hi = std::max(y_hi, y_value(*chart.rule_y));
    }
    const double y_pad = log_y ? 0.05 * std::max(1e-12, y_hi - y_lo)
                               : 0.05 * std::max(1e-12, y_hi - y_lo);
    const Axis xa = linear_axis(x_lo, x_hi, 6);
    const Axis ya = log_y ? decade_axis(y_lo - y_pad, y_hi + y_pad)
                          : linear_axis(y_lo - y_pad, y_hi + y_pad, 6);

    const double plot_w = chart.width_px - kMarginLeft - kMarginRight;
    const double plot_h = chart.height_px - kMarginTop - kMarginBottom;
    const auto px = [&](double x) { return kMarginLeft + (x - xa.lo) / (xa.hi - xa.lo) * plot_w; };
    const auto py = [&](double y) {
        return kMarginTop + (1.0 - (y - ya.lo) / (ya.hi - ya.lo)) * plot_h;
    };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(chart.width_px) + "\" height=\"" + std::to_string(chart.height_px) +
           "\" viewBox=\"0 0 " + std::to_string(chart.width_px) + " " +
           std::to_string(chart.height_px) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + fmt_px(chart.width_px / 2.0) +
           "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\" "
           "fill=\"#222\">" +
           xml_escape(chart.title) + "</text>\n";

    for (double t : xa.ticks) {
        const std::string x = fmt_px(px(t));
        svg += "<line x1=\"" + x + "\" y1=\"" + fmt_px(kMarginTop) + "\" x2=\"" + x + "\" y2=\"" +
               fmt_px(kMarginTop + plot_h) + "\" stroke=\"#e3e3e3\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + fmt_px(kMarginTop + plot_h + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#444\">" +
               fmt_tick(t) + "</text>\n";
    }
    for (double t : ya.ticks) {
        const std::string y = fmt_px(py(t));
        svg += "<line x1=\"" + fmt_px(kMarginLeft) + "\" y1=\"" + y + "\" x2=\"" +
               fmt_px(kMarginLeft + plot_w) + "\" y2=\"" + y +
               "\" stroke=\"#e3e3e3\" stroke-width=\"1\"/>\n";
        const double label = log_y ? std::pow(10.0, t) : t;
        svg += "<text x=\"" + fmt_px(kMarginLeft - 7) + "\" y=\"" + fmt_px(py(t) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
               "fill=\"#444\">" +
               fmt_tick(label) + "</text>\n";
    }
    svg += "<rect x=\"" + fmt_px(kMarginLeft) + "\" y=\"" + fmt_px(kMarginTop) + "\" width=\"" +
           fmt_px(plot_w) + "\" height=\"" + fmt_px(plot_h) +
           "\" fill=\"none\" stroke=\"#555\" stroke-width=\"1\"/>\n";

    if (chart.rule_y && (!log_y || *chart.rule_y > 0.0)) {
        const std::string y = fmt_px(py(y_value(*chart.rule_y)));
        svg += "<line x1=\"" + fmt_px(kMarginLeft) + "\" y1=\"" + y + "\" x2=\"" +
               fmt_px(kMarginLeft + plot_w) + "\" y2=\"" + y +
               "\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const PlotSeries& s = chart.series[i];
        const std::string color =
            s.color.empty() ? kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        std::string points;
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            if (!points.empty()) points += ' ';
            points += fmt_px(px(s.x[j]));
            points += ',';
            points += fmt_px(py(y_value(s.y[j])));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.6\"";
        if (s.dashed) svg += " stroke-dasharray=\"5 3\"";
        svg += " points=\"" + points + "\"/>\n";
    }

    svg += "<text x=\"" + fmt_px(kMarginLeft + plot_w / 2.0) + "\" y=\"" +
           fmt_px(chart.height_px - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "fill=\"#222\">" +
           xml_escape(chart.x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt_px(kMarginTop + plot_h / 2.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\" "
           "transform=\"rotate(-90 16 " +
           fmt_px(kMarginTop + plot_h / 2.0) + ")\">" +
           xml_escape(chart.y_label) + "</text>\n";

    const double legend_x = kMarginLeft + plot_w - 190;
    double legend_y = kMarginTop + 14;
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const PlotSeries& s = chart.series[i];
        if (s.label.empty()) continue;
        const std::string color =
            s.color.empty() ? kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        svg += "<line x1=\"" + fmt_px(legend_x) + "\" y1=\"" + fmt_px(legend_y - 4) + "\" x2=\"" +
               fmt_px(legend_x + 26) + "\" y2=\"" + fmt_px(legend_y - 4) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"";
        if (s.dashed) svg += " stroke-dasharray=\"5 3\"";
        svg += "/>\n";
        svg += "<text x=\"" + fmt_px(legend_x + 32) + "\" y=\"" + fmt_px(legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">" +
               xml_escape(s.label) + "</text>\n";
        legend_y += 16;
    }

    svg += "</svg>\n";

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace sohkan
