#include <slimchain/report.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace slimchain {

ReportFormat parse_report_format(std::string_view s)
{
    if (s == "csv") return ReportFormat::csv;
    if (s == "ldjson" || s == "jsonl") return ReportFormat::ldjson;
    throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

Cell::Cell(std::string s) : value(s), text(std::move(s)) {}
Cell::Cell(std::uint64_t v) : value(v), text(std::to_string(v)) {}
Cell::Cell(std::int64_t v) : value(v), text(std::to_string(v)) {}

Cell Cell::fixed(double v, int digits)
{
    const double scale = std::pow(10.0, digits);
    const double rounded = std::round(v * scale) / scale;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    Cell c{std::string(buf)};
    c.value = rounded;
    return c;
}

Cell Cell::null()
{
    Cell c{std::string()};
    c.value = nullptr;
    return c;
}

void RecordTable::add_row(std::vector<Cell> row)
{
    if (row.size() != m_columns.size()) throw std::invalid_argument("row width does not match column count");
    m_rows.push_back(std::move(row));
}

std::string csv_escape(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void RecordTable::write(std::ostream& out, ReportFormat format) const
{
    if (format == ReportFormat::csv) {
        for (std::size_t i = 0; i < m_columns.size(); ++i) out << (i ? "," : "") << csv_escape(m_columns[i]);
        out << '\n';
        for (const auto& row : m_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i].text);
            out << '\n';
        }
        return;
    }
    for (const auto& row : m_rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[m_columns[i]] = row[i].value;
        out << obj.dump() << '\n';
    }
}

std::string RecordTable::str(ReportFormat format) const
{
    std::ostringstream ss;
    write(ss, format);
    return ss.str();
}

} // namespace slimchain
