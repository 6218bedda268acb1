#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../util/text.hpp"

namespace aave::report {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

struct BarSeries {
    std::string name;
    /// One value per category; nullopt draws nothing (undefined ratio, absent cell).
    std::vector<std::optional<double>> values;
};

struct BarChart {
    std::string title;
    std::string y_label;
    std::vector<std::string> categories;
    std::vector<BarSeries> series;
    /// Horizontal guide (e.g. parity at 1.0).
    std::optional<double> reference;
};

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                                   "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
    return colors[i % 10];
}

inline std::string num(double v) { return text::fmt_fixed(v, 2); }

} // namespace detail

/// Grouped bar chart: one group per category, one bar per series.
inline std::string grouped_bar_svg(const BarChart& chart) {
    const double width = 120.0 + 90.0 * std::max<std::size_t>(chart.categories.size(), 1) *
                                     std::max(1.0, chart.series.size() / 3.0);
    const double height = 360.0;
    const double left = 60.0;
    const double right = 160.0;
    const double top = 40.0;
    const double bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double lo = 0.0;
    double hi = chart.reference.value_or(0.0);
    for (const auto& s : chart.series)
        for (const auto& v : s.values)
            if (v) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    const auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::num(width) << "\" height=\""
        << detail::num(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << detail::num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(chart.title) << "</text>\n";
    out << "<text x=\"14\" y=\"" << detail::num(top + plot_h / 2) << "\" transform=\"rotate(-90 14 "
        << detail::num(top + plot_h / 2) << ")\" text-anchor=\"middle\">" << xml_escape(chart.y_label) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        const double y = y_of(v);
        out << "<line x1=\"" << detail::num(left) << "\" x2=\"" << detail::num(left + plot_w) << "\" y1=\""
            << detail::num(y) << "\" y2=\"" << detail::num(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << detail::num(left - 6) << "\" y=\"" << detail::num(y + 4) << "\" text-anchor=\"end\">"
            << detail::num(v) << "</text>\n";
    }
    const double group_w = plot_w / std::max<std::size_t>(chart.categories.size(), 1);
    const double bar_w = group_w * 0.8 / std::max<std::size_t>(chart.series.size(), 1);
    for (std::size_t c = 0; c < chart.categories.size(); ++c) {
        const double gx = left + group_w * c + group_w * 0.1;
        for (std::size_t s = 0; s < chart.series.size(); ++s) {
            const auto& v = c < chart.series[s].values.size() ? chart.series[s].values[c] : std::nullopt;
            if (!v) continue;
            const double y0 = y_of(std::max(*v, 0.0));
            const double y1 = y_of(std::min(*v, 0.0));
            out << "<rect x=\"" << detail::num(gx + bar_w * s) << "\" y=\"" << detail::num(y0) << "\" width=\""
                << detail::num(bar_w) << "\" height=\"" << detail::num(y1 - y0) << "\" fill=\"" << detail::palette(s)
                << "\"><title>" << xml_escape(chart.series[s].name + " / " + chart.categories[c] + ": " + text::fmt_fixed(*v, 3))
                << "</title></rect>\n";
        }
        out << "<text x=\"" << detail::num(gx + group_w * 0.4) << "\" y=\"" << detail::num(top + plot_h + 16)
            << "\" text-anchor=\"middle\">" << xml_escape(chart.categories[c]) << "</text>\n";
    }
    if (chart.reference) {
        const double y = y_of(*chart.reference);
        out << "<line x1=\"" << detail::num(left) << "\" x2=\"" << detail::num(left + plot_w) << "\" y1=\""
            << detail::num(y) << "\" y2=\"" << detail::num(y) << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }
    out << "<line x1=\"" << detail::num(left) << "\" x2=\"" << detail::num(left) << "\" y1=\"" << detail::num(top)
        << "\" y2=\"" << detail::num(top + plot_h) << "\" stroke=\"black\"/>\n";
    for (std::size_t s = 0; s < chart.series.size(); ++s) {
        const double ly = top + 14.0 * s;
        out << "<rect x=\"" << detail::num(width - right + 10) << "\" y=\"" << detail::num(ly) << "\" width=\"10\" height=\"10\" fill=\""
            << detail::palette(s) << "\"/>\n";
        out << "<text x=\"" << detail::num(width - right + 24) << "\" y=\"" << detail::num(ly + 9) << "\">"
            << xml_escape(chart.series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace aave::report
