#pragma once

// Versioned CSV files. Every file starts with the comment line
// "# schema-forge v1"; fields never contain commas, rationals are written
// exactly as num/den, and doubles with a fixed %.12g so identical runs
// produce identical bytes.

#include "schemaforge/rational.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace schemaforge::harness {

inline constexpr const char* kCsvVersionLine = "# schema-forge v1";

std::string format_double(double value);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& fields);
    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::ofstream out_;
    std::vector<std::string> columns_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;  // throws on unknown column
};

CsvTable read_csv(const std::string& path);

}  // namespace schemaforge::harness
