#include "schemaforge/plot.hpp"

#include "schemaforge/csv.hpp"
#include "schemaforge/rational.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace schemaforge::harness {

namespace {

// CSV cells hold either decimal numbers or exact rationals (num/den).
double cell_value(const std::string& text) {
    if (text.find('/') != std::string::npos) return to_double(parse_rational(text));
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("plot: non-numeric cell '" + text + "'");
    }
}

std::string svg_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

constexpr const char* kSeriesColors[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad",
                                         "#b26700", "#34495e"};

}  // namespace

void emit_plot(const std::string& csv_path, const PlotSpec& spec, const std::string& out_path) {
    if (spec.y_columns.empty()) throw std::invalid_argument("plot: no y columns given");
    const CsvTable table = read_csv(csv_path);
    const std::size_t xi = table.column_index(spec.x_column);
    std::vector<std::size_t> yis;
    for (const auto& name : spec.y_columns) yis.push_back(table.column_index(name));
    if (table.rows.empty()) throw std::runtime_error("plot: no data rows in '" + csv_path + "'");

    std::vector<double> xs;
    std::vector<std::vector<double>> series(yis.size());
    for (const auto& row : table.rows) {
        xs.push_back(cell_value(row.at(xi)));
        for (std::size_t s = 0; s < yis.size(); ++s) series[s].push_back(cell_value(row.at(yis[s])));
    }

    double xmin = xs[0], xmax = xs[0], ymin = series[0][0], ymax = series[0][0];
    for (double v : xs) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (const auto& s : series)
        for (double v : s) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
    if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }

    const double width = 640, height = 480, left = 70, right = 20, top = 40, bottom = 50;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto sy = [&](double y) {
        return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
            << spec.title << "</text>\n";
    // Axes with end labels.
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_column << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
        << "\" font-size=\"12\" transform=\"rotate(-90 16 " << (top + height - bottom) / 2 << ")\""
        << " text-anchor=\"middle\">" << (spec.y_columns.size() == 1 ? spec.y_columns[0] : "value")
        << "</text>\n";
    svg << "<text x=\"" << left << "\" y=\"" << height - bottom + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">" << svg_num(xmin) << "</text>\n";
    svg << "<text x=\"" << width - right << "\" y=\"" << height - bottom + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">" << svg_num(xmax) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << height - bottom + 4
        << "\" font-size=\"10\" text-anchor=\"end\">" << svg_num(ymin) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
        << "\" font-size=\"10\" text-anchor=\"end\">" << svg_num(ymax) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kSeriesColors[s % (sizeof(kSeriesColors) / sizeof(kSeriesColors[0]))];
        if (spec.scatter) {
            for (std::size_t i = 0; i < xs.size(); ++i)
                svg << "<circle cx=\"" << svg_num(sx(xs[i])) << "\" cy=\"" << svg_num(sy(series[s][i]))
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        } else {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (i) svg << " ";
                svg << svg_num(sx(xs[i])) << "," << svg_num(sy(series[s][i]));
            }
            svg << "\"/>\n";
        }
        // Legend swatch.
        const double ly = top + 14.0 * static_cast<double>(s);
        svg << "<rect x=\"" << width - right - 150 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
            << color << "\"/>\n";
        svg << "<text x=\"" << width - right - 136 << "\" y=\"" << ly + 9 << "\" font-size=\"11\">"
            << spec.y_columns[s] << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("plot: cannot open '" + out_path + "'");
    out << svg.str();
}

}  // namespace schemaforge::harness
