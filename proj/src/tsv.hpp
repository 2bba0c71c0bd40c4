#pragma once

#include <string>
#include <vector>

namespace cspec {

// Tab-separated table with a '#'-prefixed header row.  All numeric
// formatting is centralized here so identical runs render byte-identically.
class TsvTable {
public:
    explicit TsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    TsvTable& begin_row();
    TsvTable& cell(const std::string& value);
    TsvTable& cell(long long value);
    TsvTable& cell(int value);
    TsvTable& cell(double value);

    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double value);

}  // namespace cspec
