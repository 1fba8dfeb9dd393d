#pragma once

#include <string>
#include <vector>

#include "phaselab/assignment.hpp" // Matrix

namespace phaselab {

struct LineSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Standalone SVG line chart / heatmap writers; no external renderer.
void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<LineSeries>& series);

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const Matrix& values,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels);

} // namespace phaselab
