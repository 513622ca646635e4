#pragma once

// Deterministic SVG line/scatter plots straight from CSV columns.

#include <string>
#include <vector>

namespace schemaforge::harness {

struct PlotSpec {
    std::string x_column;
    std::vector<std::string> y_columns;
    std::string title;
    bool scatter = false;  // points only instead of polylines
};

/// Renders the named columns of a schema-forge CSV to an SVG file. Throws
/// std::invalid_argument for unknown columns and std::runtime_error when
/// there are no data rows; nothing is written on error.
void emit_plot(const std::string& csv_path, const PlotSpec& spec, const std::string& out_path);

}  // namespace schemaforge::harness
