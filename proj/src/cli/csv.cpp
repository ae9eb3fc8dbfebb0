#include "qsc/cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace qsc::cli {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string format_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, std::int64_t>)
                return std::to_string(v);
            else
                return v;
        },
        c);
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size())
        throw std::invalid_argument("CSV row width " + std::to_string(row.size()) +
                               " differs from header width " + std::to_string(header_.size()));
    rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
    for (const auto& c : comments_) out << "# " << c << '\n';
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    std::string line;
    for (const auto& row : rows_) {
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ',';
            line += format_cell(row[i]);
        }
        line += '\n';
        out << line;
    }
}

}  // namespace qsc::cli
