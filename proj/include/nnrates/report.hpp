#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace nnrates {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

using Summary = std::vector<std::pair<std::string, Cell>>;

// Decimal text with 12 significant digits.
std::string format_number(double v);
std::string format_cell(const Cell& c);

void write_csv(std::ostream& out, const Table& table);
// key=value pairs separated by spaces.
std::string summary_line(const Summary& summary);

// Columns as arrays, plus the summary as an object. Numbers are the 12-digit
// values written to CSV.
nlohmann::json report_json(const Table& table, const Summary& summary);
nlohmann::json summary_json(const Summary& summary);

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(const std::string& name);
std::string extension(ReportFormat format);

// Writes <path> in the given format. Throws ArgumentError on an empty table
// and IoError when the file cannot be written.
void emit_report(const Table& table, const Summary& summary, ReportFormat format,
                 const std::filesystem::path& path);

}  // namespace nnrates
