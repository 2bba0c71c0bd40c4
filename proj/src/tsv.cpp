#include "tsv.hpp"

#include <cstdio>

#include "errors.hpp"

namespace cspec {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

TsvTable& TsvTable::begin_row() {
    rows_.emplace_back();
    return *this;
}

TsvTable& TsvTable::cell(const std::string& value) {
    require(!rows_.empty(), "TsvTable: begin_row first");
    rows_.back().push_back(value);
    return *this;
}

TsvTable& TsvTable::cell(long long value) { return cell(std::to_string(value)); }
TsvTable& TsvTable::cell(int value) { return cell(std::to_string(value)); }
TsvTable& TsvTable::cell(double value) { return cell(format_double(value)); }

std::string TsvTable::render() const {
    std::string out = "#";
    for (size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += '\t';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        require(row.size() == columns_.size(), "TsvTable: row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += '\t';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

}  // namespace cspec
