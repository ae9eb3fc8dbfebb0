#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace qsc::cli {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Rectangular table written as CSV with `#` metadata lines first. Doubles
/// are printed with 17 significant digits via std::to_chars, so the output
/// does not depend on the C locale.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row);
    void add_comment(std::string line) { comments_.push_back(std::move(line)); }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::string>& comments() const { return comments_; }

    void write(std::ostream& out) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::string> comments_;
};

std::string format_double(double v);
std::string format_cell(const Cell& c);

}  // namespace qsc::cli
