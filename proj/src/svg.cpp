#include "gibbs_lines/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "gibbs_lines/numeric.hpp"

namespace gibbs_lines {

namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log_scale = false;
    double transform(double v) const { return log_scale ? std::log10(v) : v; }
    double frac(double v) const {
        const double t = transform(v);
        return (t - lo) / (hi - lo);
    }
};

std::vector<double> nice_ticks(double lo, double hi, bool log_scale) {
    std::vector<double> ticks;
    if (log_scale) {
        for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e)
            if (e >= lo - 1e-9 && e <= hi + 1e-9) ticks.push_back(std::pow(10.0, e));
        if (ticks.size() >= 2) return ticks;
    }
    const double span = hi - lo;
    const double raw_step = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw_step <= m * mag) {
            step = m * mag;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(log_scale ? std::pow(10.0, t) : t);
    return ticks;
}

} // namespace

std::string emit_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series");

    Axis ax{kInf, kNegInf, spec.log_x}, ay{kInf, kNegInf, spec.log_y};
    std::vector<long> dropped(series.size(), 0);
    bool any_point = false;
    for (size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        if (sr.x.size() != sr.y.size())
            throw std::invalid_argument("emit_plot: x/y length mismatch");
        for (size_t i = 0; i < sr.x.size(); ++i) {
            const bool ok = std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]) &&
                            (!spec.log_x || sr.x[i] > 0.0) && (!spec.log_y || sr.y[i] > 0.0);
            if (!ok) {
                ++dropped[s];
                continue;
            }
            any_point = true;
            ax.lo = std::min(ax.lo, ax.transform(sr.x[i]));
            ax.hi = std::max(ax.hi, ax.transform(sr.x[i]));
            ay.lo = std::min(ay.lo, ay.transform(sr.y[i]));
            ay.hi = std::max(ay.hi, ay.transform(sr.y[i]));
        }
    }
    if (!any_point) throw std::invalid_argument("emit_plot: no finite points");
    if (ax.hi - ax.lo < 1e-12) {
        ax.lo -= 0.5;
        ax.hi += 0.5;
    }
    if (ay.hi - ay.lo < 1e-12) {
        ay.lo -= 0.5;
        ay.hi += 0.5;
    }
    const double xpad = 0.05 * (ax.hi - ax.lo), ypad = 0.05 * (ay.hi - ay.lo);
    ax.lo -= xpad;
    ax.hi += xpad;
    ay.lo -= ypad;
    ay.hi += ypad;

    const auto px = [&](double v) { return kLeft + ax.frac(v) * (kWidth - kLeft - kRight); };
    const auto py = [&](double v) {
        return kHeight - kBottom - ay.frac(v) * (kHeight - kTop - kBottom);
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
           "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
           fmt(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">" + spec.title + "</text>\n";

    // axes
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" +
           fmt(kWidth - kRight) + "\" y2=\"" + fmt(kHeight - kBottom) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
           "\" y2=\"" + fmt(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(ax.lo, ax.hi, spec.log_x)) {
        const double x = px(t);
        out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(kHeight - kBottom) + "\" x2=\"" +
               fmt(x) + "\" y2=\"" + fmt(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(kHeight - kBottom + 20) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(t) + "</text>\n";
    }
    for (double t : nice_ticks(ay.lo, ay.hi, spec.log_y)) {
        const double y = py(t);
        out += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kLeft) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(t) +
               "</text>\n";
    }
    out += "<text x=\"" + fmt((kLeft + kWidth - kRight) / 2) + "\" y=\"" + fmt(kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           spec.x_label + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt((kTop + kHeight - kBottom) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " + fmt((kTop + kHeight - kBottom) / 2) + ")\">" +
           spec.y_label + "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        const std::string color = kPalette[s % 8];
        if (!sr.band_lo.empty()) {
            if (sr.band_lo.size() != sr.x.size() || sr.band_hi.size() != sr.x.size())
                throw std::invalid_argument("emit_plot: band length mismatch");
            std::string pts;
            for (size_t i = 0; i < sr.x.size(); ++i) {
                if (!std::isfinite(sr.band_hi[i]) || !std::isfinite(sr.x[i])) continue;
                pts += fmt(px(sr.x[i])) + "," + fmt(py(sr.band_hi[i])) + " ";
            }
            for (size_t i = sr.x.size(); i-- > 0;) {
                if (!std::isfinite(sr.band_lo[i]) || !std::isfinite(sr.x[i])) continue;
                pts += fmt(px(sr.x[i])) + "," + fmt(py(sr.band_lo[i])) + " ";
            }
            if (!pts.empty())
                out += "<polygon points=\"" + pts + "\" fill=\"" + color +
                       "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
        }
        std::string pts;
        for (size_t i = 0; i < sr.x.size(); ++i) {
            const bool ok = std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]) &&
                            (!spec.log_x || sr.x[i] > 0.0) && (!spec.log_y || sr.y[i] > 0.0);
            if (!ok) continue;
            pts += fmt(px(sr.x[i])) + "," + fmt(py(sr.y[i])) + " ";
            out += "<circle cx=\"" + fmt(px(sr.x[i])) + "\" cy=\"" + fmt(py(sr.y[i])) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        // legend
        const double ly = kTop + 8 + 18 * static_cast<double>(s);
        out += "<rect x=\"" + fmt(kWidth - kRight - 170) + "\" y=\"" + fmt(ly - 9) +
               "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
        std::string label = sr.label;
        if (dropped[s] > 0) label += " (" + std::to_string(dropped[s]) + " dropped)";
        out += "<text x=\"" + fmt(kWidth - kRight - 152) + "\" y=\"" + fmt(ly + 2) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace gibbs_lines
