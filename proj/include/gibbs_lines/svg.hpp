#ifndef GIBBS_LINES_SVG_HPP
#define GIBBS_LINES_SVG_HPP

#include <optional>
#include <string>
#include <vector>

namespace gibbs_lines {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    // Optional band [y_lo, y_hi] per point, drawn as a translucent ribbon.
    std::vector<double> band_lo;
    std::vector<double> band_hi;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

// Deterministic self-contained SVG; non-finite points are dropped and the
// drop count appears in the legend entry.
std::string emit_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec);

} // namespace gibbs_lines

#endif
