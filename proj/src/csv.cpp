#include "schemaforge/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace schemaforge::harness {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), columns_(columns) {
    if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    out_ << kCsvVersionLine << "\n";
    row(columns_);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_.size())
        throw std::invalid_argument("csv row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ",";
        out_ << fields[i];
    }
    out_ << "\n";
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("unknown CSV column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (!header_seen) {
            table.columns = std::move(fields);
            header_seen = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

}  // namespace schemaforge::harness
