#include "phaselab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace phaselab {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<LineSeries>& series) {
    const double width = 720, height = 440;
    const double ml = 70, mr = 160, mt = 50, mb = 55;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"16\">" << escape(title) << "</text>\n";

    // axes + ticks
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        double fx = xmin + (xmax - xmin) * t / 5.0;
        double fy = ymin + (ymax - ymin) * t / 5.0;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << mt + ph << "\" x2=\""
            << px(fx) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx)
            << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ml
            << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(fy)
            << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label)
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << mt + ph / 2 << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i)
            out << fmt(px(series[s].x[i])) << ',' << fmt(py(series[s].y[i])) << ' ';
        out << "\"/>\n";
        double ly = mt + 16 + 18 * static_cast<double>(s);
        out << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly << "\" x2=\""
            << ml + pw + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << ml + pw + 35 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\">" << escape(series[s].name) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_heatmap_svg(const std::string& path, const std::string& title,
                       const Matrix& values,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels) {
    if (values.empty()) throw std::invalid_argument("heatmap: empty matrix");
    const std::size_t rows = values.size(), cols = values[0].size();
    const double cell = std::min(28.0, 560.0 / static_cast<double>(std::max(rows, cols)));
    const double ml = 90, mt = 60;
    const double width = ml + cell * static_cast<double>(cols) + 120;
    const double height = mt + cell * static_cast<double>(rows) + 40;

    double vmin = values[0][0], vmax = values[0][0];
    for (const auto& r : values)
        for (double v : r) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (vmax == vmin) vmax = vmin + 1;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"15\">" << escape(title) << "</text>\n";

    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double t = (values[i][j] - vmin) / (vmax - vmin);
            int red = static_cast<int>(255 * t);
            int blue = static_cast<int>(255 * (1.0 - t));
            out << "<rect x=\"" << ml + cell * static_cast<double>(j) << "\" y=\""
                << mt + cell * static_cast<double>(i) << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"rgb(" << red << ",60,"
                << blue << ")\"/>\n";
        }
        if (i < row_labels.size())
            out << "<text x=\"" << ml - 6 << "\" y=\""
                << mt + cell * (static_cast<double>(i) + 0.7)
                << "\" text-anchor=\"end\" font-size=\"10\">"
                << escape(row_labels[i]) << "</text>\n";
    }
    for (std::size_t j = 0; j < cols && j < col_labels.size(); ++j)
        out << "<text x=\"" << ml + cell * (static_cast<double>(j) + 0.5)
            << "\" y=\"" << mt - 8 << "\" text-anchor=\"middle\" font-size=\"10\">"
            << escape(col_labels[j]) << "</text>\n";

    out << "<text x=\"" << ml << "\" y=\"" << height - 12
        << "\" font-size=\"11\">min " << fmt(vmin) << ", max " << fmt(vmax)
        << "</text>\n";
    out << "</svg>\n";
}

} // namespace phaselab
