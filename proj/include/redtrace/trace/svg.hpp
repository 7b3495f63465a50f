#pragma once

// Self-contained SVG charts: single line, multi-series with mean +/- sigma
// bands, and per-action bars with the dominant bar marked. No plotting
// framework; coordinates are emitted with fixed precision so regeneration
// is byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "redtrace/core.hpp"

namespace redtrace::trace {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Several aligned samples of the same curve (e.g. seeds); rendered as a
// mean line inside a +/- sigma band.
struct SeriesBundle {
    std::string label;
    std::vector<double> x;
    std::vector<std::vector<double>> ys;
};

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return colors;
}

struct Frame {
    double width = 640, height = 400;
    double left = 62, right = 18, top = 34, bottom = 46;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    double px(double x) const {
        const double span = x_max > x_min ? x_max - x_min : 1.0;
        return left + (x - x_min) / span * (width - left - right);
    }
    double py(double y) const {
        const double span = y_max > y_min ? y_max - y_min : 1.0;
        return height - bottom - (y - y_min) / span * (height - top - bottom);
    }
};

inline void expand_range(double& lo, double& hi) {
    if (hi <= lo) {
        hi = lo + 1.0;
        lo -= 1.0;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

inline void open_svg(std::string& out, const Frame& f, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel) {
    out += "<svg xmlns='http://www.w3.org/2000/svg' width='" + num(f.width) + "' height='" +
           num(f.height) + "' viewBox='0 0 " + num(f.width) + " " + num(f.height) + "'>\n";
    out += "<rect width='100%' height='100%' fill='white'/>\n";
    out += "<text x='" + num(f.width / 2) + "' y='20' text-anchor='middle' font-size='14' "
           "font-family='sans-serif'>" + escape(title) + "</text>\n";
    out += "<text x='" + num(f.width / 2) + "' y='" + num(f.height - 8) +
           "' text-anchor='middle' font-size='11' font-family='sans-serif'>" + escape(xlabel) +
           "</text>\n";
    out += "<text x='14' y='" + num(f.height / 2) +
           "' text-anchor='middle' font-size='11' font-family='sans-serif' transform='rotate(-90 "
           "14 " + num(f.height / 2) + ")'>" + escape(ylabel) + "</text>\n";
}

inline void axes(std::string& out, const Frame& f) {
    const double x0 = f.left, x1 = f.width - f.right;
    const double y0 = f.height - f.bottom, y1 = f.top;
    out += "<line x1='" + num(x0) + "' y1='" + num(y0) + "' x2='" + num(x1) + "' y2='" + num(y0) +
           "' stroke='black' stroke-width='1'/>\n";
    out += "<line x1='" + num(x0) + "' y1='" + num(y0) + "' x2='" + num(x0) + "' y2='" + num(y1) +
           "' stroke='black' stroke-width='1'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = f.x_min + (f.x_max - f.x_min) * i / 4.0;
        const double fy = f.y_min + (f.y_max - f.y_min) * i / 4.0;
        char label[32];
        out += "<line x1='" + num(f.px(fx)) + "' y1='" + num(y0) + "' x2='" + num(f.px(fx)) +
               "' y2='" + num(y0 + 4) + "' stroke='black'/>\n";
        std::snprintf(label, sizeof(label), "%.4g", fx);
        out += "<text x='" + num(f.px(fx)) + "' y='" + num(y0 + 16) +
               "' text-anchor='middle' font-size='10' font-family='sans-serif'>" + label +
               "</text>\n";
        out += "<line x1='" + num(x0 - 4) + "' y1='" + num(f.py(fy)) + "' x2='" + num(x0) +
               "' y2='" + num(f.py(fy)) + "' stroke='black'/>\n";
        std::snprintf(label, sizeof(label), "%.4g", fy);
        out += "<text x='" + num(x0 - 6) + "' y='" + num(f.py(fy) + 3) +
               "' text-anchor='end' font-size='10' font-family='sans-serif'>" + label +
               "</text>\n";
    }
}

inline void polyline(std::string& out, const Frame& f, const std::vector<double>& x,
                     const std::vector<double>& y, const std::string& color) {
    if (x.empty()) return;
    out += "<polyline fill='none' stroke='" + color + "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < x.size(); ++i)
        out += num(f.px(x[i])) + "," + num(f.py(y[i])) + " ";
    out += "'/>\n";
}

inline void legend(std::string& out, const Frame& f,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
    double y = f.top + 8;
    for (const auto& [label, color] : entries) {
        const double x = f.width - f.right - 130;
        out += "<rect x='" + num(x) + "' y='" + num(y - 8) +
               "' width='10' height='10' fill='" + color + "'/>\n";
        out += "<text x='" + num(x + 14) + "' y='" + num(y) +
               "' font-size='11' font-family='sans-serif'>" + escape(label) + "</text>\n";
        y += 16;
    }
}

}  // namespace svg_detail

inline std::string render_line_plot(const std::vector<Series>& series, const std::string& title,
                                    const std::string& xlabel, const std::string& ylabel) {
    using namespace svg_detail;
    if (series.empty() || series.front().x.empty())
        throw InvalidArgument("render_line_plot: empty series");
    Frame f;
    f.x_min = 1e300;
    f.x_max = -1e300;
    f.y_min = 1e300;
    f.y_max = -1e300;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw InvalidArgument("render_line_plot: ragged series");
        for (double v : s.x) {
            f.x_min = std::min(f.x_min, v);
            f.x_max = std::max(f.x_max, v);
        }
        for (double v : s.y) {
            f.y_min = std::min(f.y_min, v);
            f.y_max = std::max(f.y_max, v);
        }
    }
    expand_range(f.y_min, f.y_max);
    if (f.x_max <= f.x_min) f.x_max = f.x_min + 1.0;

    std::string out;
    open_svg(out, f, title, xlabel, ylabel);
    axes(out, f);
    std::vector<std::pair<std::string, std::string>> entries;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& color = palette()[i % palette().size()];
        polyline(out, f, series[i].x, series[i].y, color);
        if (!series[i].label.empty()) entries.emplace_back(series[i].label, color);
    }
    if (entries.size() > 1) legend(out, f, entries);
    out += "</svg>\n";
    return out;
}

// Mean curve with a +/- one-standard-deviation band per bundle.
inline std::string render_band_plot(const std::vector<SeriesBundle>& bundles,
                                    const std::string& title, const std::string& xlabel,
                                    const std::string& ylabel) {
    using namespace svg_detail;
    if (bundles.empty()) throw InvalidArgument("render_band_plot: empty input");
    struct Stats {
        std::vector<double> x, mean, lo, hi;
    };
    std::vector<Stats> stats;
    Frame f;
    f.x_min = 1e300;
    f.x_max = -1e300;
    f.y_min = 1e300;
    f.y_max = -1e300;
    for (const auto& b : bundles) {
        if (b.ys.empty() || b.x.empty()) throw InvalidArgument("render_band_plot: empty bundle");
        std::size_t n = b.x.size();
        for (const auto& y : b.ys) n = std::min(n, y.size());
        Stats st;
        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (const auto& y : b.ys) m += y[i] / static_cast<double>(b.ys.size());
            double var = 0.0;
            for (const auto& y : b.ys)
                var += (y[i] - m) * (y[i] - m) / static_cast<double>(b.ys.size());
            const double sd = std::sqrt(var);
            st.x.push_back(b.x[i]);
            st.mean.push_back(m);
            st.lo.push_back(m - sd);
            st.hi.push_back(m + sd);
            f.x_min = std::min(f.x_min, b.x[i]);
            f.x_max = std::max(f.x_max, b.x[i]);
            f.y_min = std::min(f.y_min, m - sd);
            f.y_max = std::max(f.y_max, m + sd);
        }
        stats.push_back(std::move(st));
    }
    expand_range(f.y_min, f.y_max);
    if (f.x_max <= f.x_min) f.x_max = f.x_min + 1.0;

    std::string out;
    open_svg(out, f, title, xlabel, ylabel);
    axes(out, f);
    std::vector<std::pair<std::string, std::string>> entries;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& color = palette()[i % palette().size()];
        const auto& st = stats[i];
        std::string poly = "<polygon fill='" + color + "' fill-opacity='0.18' stroke='none' points='";
        for (std::size_t k = 0; k < st.x.size(); ++k)
            poly += num(f.px(st.x[k])) + "," + num(f.py(st.hi[k])) + " ";
        for (std::size_t k = st.x.size(); k-- > 0;)
            poly += num(f.px(st.x[k])) + "," + num(f.py(st.lo[k])) + " ";
        poly += "'/>\n";
        out += poly;
        polyline(out, f, st.x, st.mean, color);
        entries.emplace_back(bundles[i].label, color);
    }
    legend(out, f, entries);
    out += "</svg>\n";
    return out;
}

// One bar per action (1-based labels); the dominant bar is drawn in the
// highlight color.
inline std::string render_bar_plot(const std::vector<double>& values, int dominant_pos,
                                   const std::string& title, const std::string& xlabel,
                                   const std::string& ylabel) {
    using namespace svg_detail;
    if (values.empty()) throw InvalidArgument("render_bar_plot: empty values");
    Frame f;
    f.x_min = 0.0;
    f.x_max = static_cast<double>(values.size());
    f.y_min = std::min(0.0, *std::min_element(values.begin(), values.end()));
    f.y_max = std::max(0.0, *std::max_element(values.begin(), values.end()));
    expand_range(f.y_min, f.y_max);

    std::string out;
    open_svg(out, f, title, xlabel, ylabel);
    axes(out, f);
    const double slot = (f.width - f.left - f.right) / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = f.left + slot * static_cast<double>(i) + slot * 0.15;
        const double w = slot * 0.7;
        const double y_base = f.py(0.0);
        const double y_val = f.py(values[i]);
        const double y = std::min(y_base, y_val);
        const double h = std::abs(y_base - y_val);
        const std::string color = static_cast<int>(i) == dominant_pos ? "#d62728" : "#1f77b4";
        out += "<rect x='" + num(x) + "' y='" + num(y) + "' width='" + num(w) + "' height='" +
               num(h) + "' fill='" + color + "'/>\n";
        out += "<text x='" + num(x + w / 2) + "' y='" + num(f.height - f.bottom + 16) +
               "' text-anchor='middle' font-size='9' font-family='sans-serif'>" +
               std::to_string(i + 1) + "</text>\n";
    }
    legend(out, f, {{"dominant", "#d62728"}});
    out += "</svg>\n";
    return out;
}

inline void save_svg(const std::string& svg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write svg: " + path);
    out << svg;
}

}  // namespace redtrace::trace
