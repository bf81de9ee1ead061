// Minimal self-contained SVG line plots: axis box, ticks, polylines, legend.
// Log axes transform the data to log10 space and label ticks with the
// original values. Nothing here depends on external assets or fonts beyond
// the generic sans-serif family.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mems/output.hpp"

namespace mems {

struct svg_series {
    std::vector<double> x, y;
    std::string color = "#1f6fb2";
    std::string label;
};

struct svg_axes {
    std::string title, xlabel, ylabel;
    bool logx = false;
    bool logy = false;
};

namespace detail {

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace detail

inline std::string svg_line_plot(const std::vector<svg_series>& series, const svg_axes& ax,
                                 int width = 720, int height = 480) {
    const double ml = 70.0, mr = 24.0, mt = 40.0, mb = 56.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    auto tx = [&](double v) { return ax.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return ax.logy ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (ax.logx && !(s.x[i] > 0.0)) continue;
            if (ax.logy && !(s.y[i] > 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + (ymax - ty(v)) / (ymax - ymin) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

    o << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        const double gx = ml + pw * k / 4.0;
        const double gy = mt + ph - ph * k / 4.0;
        o << "<line x1=\"" << gx << "\" y1=\"" << mt + ph << "\" x2=\"" << gx << "\" y2=\""
          << mt + ph + 5 << "\" stroke=\"#333\"/>\n"
          << "<text x=\"" << gx << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\">"
          << detail::tick_label(ax.logx ? std::pow(10.0, fx) : fx) << "</text>\n"
          << "<line x1=\"" << ml - 5 << "\" y1=\"" << gy << "\" x2=\"" << ml << "\" y2=\"" << gy
          << "\" stroke=\"#333\"/>\n"
          << "<text x=\"" << ml - 8 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
          << detail::tick_label(ax.logy ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\">" << ax.xlabel << "</text>\n"
      << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << ax.ylabel << "</text>\n"
      << "<text x=\"" << ml + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << ax.title << "</text>\n</g>\n";

    for (const auto& s : series) {
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (ax.logx && !(s.x[i] > 0.0)) continue;
            if (ax.logy && !(s.y[i] > 0.0)) continue;
            o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        o << "\"/>\n";
    }

    double ly = mt + 16.0;
    o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        o << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\""
          << ml + pw - 126 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\"/>\n"
          << "<text x=\"" << ml + pw - 120 << "\" y=\"" << ly << "\" fill=\"#333\">" << s.label
          << "</text>\n";
        ly += 18.0;
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

} // namespace mems
