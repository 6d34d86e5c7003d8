#pragma once

// SVG rendering of one or more spectra over the bisectrix y = x.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfk/estimator.hpp"
#include "mfk/geometry.hpp"

namespace mfk::plot {

struct Series {
    std::string label;
    Spectrum spectrum;
};

struct PlotOptions {
    std::optional<double> gap_threshold; // default per series: default_gap_threshold
    int width = 480;
    int height = 480;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
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

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

} // namespace detail

/**
 * Axes alpha (x) and f (y), one <g class="series"> per input and one
 * <g class="fragment"> per connected piece; no line is drawn across a gap.
 */
inline std::string render_svg(const std::vector<Series>& series, const PlotOptions& opts = {}) {
    double lo = 0.0, hi = 1.0;
    for (const auto& s : series)
        for (const auto& p : s.spectrum.points) {
            lo = std::min({lo, p.alpha, p.f});
            hi = std::max({hi, p.alpha, p.f});
        }
    hi = std::ceil(hi * 10.0) / 10.0;

    const double margin = 50.0;
    const double w = opts.width, h = opts.height;
    auto sx = [&](double a) { return margin + (a - lo) / (hi - lo) * (w - 2 * margin); };
    auto sy = [&](double f) { return h - margin - (f - lo) / (hi - lo) * (h - 2 * margin); };
    using detail::num;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opts.width) + "\" height=\"" +
           std::to_string(opts.height) + "\" viewBox=\"0 0 " + std::to_string(opts.width) + " " +
           std::to_string(opts.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<g class=\"axes\" stroke=\"black\">\n";
    svg += "<line x1=\"" + num(sx(lo)) + "\" y1=\"" + num(sy(lo)) + "\" x2=\"" + num(sx(hi)) + "\" y2=\"" +
           num(sy(lo)) + "\"/>\n";
    svg += "<line x1=\"" + num(sx(lo)) + "\" y1=\"" + num(sy(lo)) + "\" x2=\"" + num(sx(lo)) + "\" y2=\"" +
           num(sy(hi)) + "\"/>\n";
    svg += "</g>\n";
    svg += "<text x=\"" + num(w / 2) + "\" y=\"" + num(h - 12) + "\" text-anchor=\"middle\">alpha</text>\n";
    svg += "<text x=\"14\" y=\"" + num(h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           num(h / 2) + ")\">f(alpha)</text>\n";
    for (double t = std::ceil(lo * 5.0) / 5.0; t <= hi + 1e-9; t += 0.2) {
        svg += "<text class=\"tick\" x=\"" + num(sx(t)) + "\" y=\"" + num(sy(lo) + 16) +
               "\" font-size=\"10\" text-anchor=\"middle\">" + num(t) + "</text>\n";
        svg += "<text class=\"tick\" x=\"" + num(sx(lo) - 6) + "\" y=\"" + num(sy(t) + 3) +
               "\" font-size=\"10\" text-anchor=\"end\">" + num(t) + "</text>\n";
    }
    svg += "<line class=\"bisectrix\" x1=\"" + num(sx(lo)) + "\" y1=\"" + num(sy(lo)) + "\" x2=\"" + num(sx(hi)) +
           "\" y2=\"" + num(sy(hi)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = detail::kPalette[k % std::size(detail::kPalette)];
        svg += "<g class=\"series\" data-label=\"" + detail::escape(s.label) + "\" stroke=\"" + color +
               "\" fill=\"" + color + "\">\n";
        if (!s.spectrum.points.empty()) {
            const std::span<const SpectrumPoint> pts(s.spectrum.points);
            const auto threshold = opts.gap_threshold.value_or(default_gap_threshold(pts));
            const auto frag = detect_fragments(pts, threshold);
            for (const auto& fr : frag.fragments) {
                svg += "<g class=\"fragment\">\n";
                if (fr.size() > 1) {
                    svg += "<polyline fill=\"none\" points=\"";
                    for (auto i = fr.first; i <= fr.last; ++i)
                        svg += (i == fr.first ? "" : " ") + num(sx(pts[i].alpha)) + "," + num(sy(pts[i].f));
                    svg += "\"/>\n";
                }
                for (auto i = fr.first; i <= fr.last; ++i)
                    svg += "<circle cx=\"" + num(sx(pts[i].alpha)) + "\" cy=\"" + num(sy(pts[i].f)) +
                           "\" r=\"3\"/>\n";
                svg += "</g>\n";
            }
        }
        svg += "</g>\n";
        const double ly = margin + 16.0 * static_cast<double>(k);
        svg += "<text class=\"legend\" x=\"" + num(w - margin) + "\" y=\"" + num(ly) +
               "\" text-anchor=\"end\" fill=\"" + color + "\">" + detail::escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace mfk::plot
