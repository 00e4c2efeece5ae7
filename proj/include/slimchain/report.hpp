#ifndef SLIMCHAIN_REPORT_HPP
#define SLIMCHAIN_REPORT_HPP

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace slimchain {

enum class ReportFormat { csv, ldjson };

ReportFormat parse_report_format(std::string_view s);

/** One table cell, carrying both its JSON value and its CSV text. */
struct Cell {
    nlohmann::ordered_json value;
    std::string text;

    Cell(std::string s);
    Cell(const char* s) : Cell(std::string(s)) {}
    Cell(std::uint64_t v);
    Cell(std::int64_t v);
    Cell(std::uint32_t v) : Cell(std::uint64_t{v}) {}
    Cell(int v) : Cell(std::int64_t{v}) {}
    /** Floating value rounded to @p digits decimals in both renderings. */
    static Cell fixed(double v, int digits);
    static Cell null();
};

/**
 * Flat table written either as CSV (header + rows) or as line-delimited JSON
 * (one object per row). Output is byte-stable for equal contents.
 */
class RecordTable {
public:
    explicit RecordTable(std::vector<std::string> columns) : m_columns(std::move(columns)) {}

    void add_row(std::vector<Cell> row);
    const std::vector<std::string>& columns() const noexcept { return m_columns; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return m_rows; }

    void write(std::ostream& out, ReportFormat format) const;
    std::string str(ReportFormat format) const;

private:
    std::vector<std::string> m_columns;
    std::vector<std::vector<Cell>> m_rows;
};

std::string csv_escape(std::string_view s);

} // namespace slimchain

#endif // SLIMCHAIN_REPORT_HPP
