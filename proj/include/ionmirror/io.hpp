// io.hpp - output writers: CSV (round-trip-exact doubles, LF line ends),
// pretty-printed JSON, and a dependency-free SVG line plot.
#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ionmirror::io {

/// Shortest round-trip decimal form of a double ("%.17g" is exact; trailing
/// digits are not trimmed so files diff cleanly between runs).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write a rectangular table as CSV: one header row, then one row per record,
/// every cell a round-trip-exact double. Rows must all match the header width.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF on every platform
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write_json: write failed for " + path.string());
}

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

/// Minimal multi-series line plot; axes are scaled to the joint data range.
inline void write_svg(const std::filesystem::path& path, const std::vector<SvgSeries>& series,
                      const std::string& x_label, const std::string& y_label) {
    static const char* palette[] = {"#1f6fb2", "#c23b22", "#2d8a4e", "#8450a8", "#b8860b"};
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw std::runtime_error("write_svg: series size mismatch: " + s.label);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) { xmin = xmax = s.x[i]; ymin = ymax = s.y[i]; any = true; }
            xmin = std::min(xmin, s.x[i]); xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]); ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!any) throw std::runtime_error("write_svg: no data");
    if (xmax == xmin) { xmax = xmin + 1; }
    if (ymax == ymin) { ymax = ymin + 1; }

    const double w = 720, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    const auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg: cannot open " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h
        << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (w - ml - mr)
        << "\" height=\"" << (h - mt - mb)
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4.0;
        const double fy = ymin + (ymax - ymin) * k / 4.0;
        out << "<text x=\"" << px(fx) << "\" y=\"" << (h - mb + 18)
            << "\" text-anchor=\"middle\">" << format_double(fx).substr(0, 8) << "</text>\n";
        out << "<text x=\"" << (ml - 8) << "\" y=\"" << (py(fy) + 4)
            << "\" text-anchor=\"end\">" << format_double(fy).substr(0, 8) << "</text>\n";
    }
    out << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 8)
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + (h - mt - mb) / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + (h - mt - mb) / 2) << ")\">" << y_label << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % (sizeof palette / sizeof *palette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
        out << "\"/>\n";
        out << "<text x=\"" << (w - mr - 8) << "\" y=\"" << (mt + 18 + 16 * double(si))
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write_svg: write failed for " + path.string());
}

} // namespace ionmirror::io
