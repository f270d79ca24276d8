#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace aniso {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // same length as x
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;  // positive y values only
    int width = 900;
    int height = 560;
};

// Minimal self-contained line renderer: axes with tick labels, one polyline
// per series, legend. Returns the SVG document text.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt);

// render_svg + atomic write-then-rename.
void write_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
               const PlotOptions& opt);

}  // namespace aniso
