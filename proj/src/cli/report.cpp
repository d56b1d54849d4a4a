#include "nnrates/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "nnrates/errors.hpp"

namespace nnrates {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
}

std::string summary_line(const Summary& summary) {
  std::string s;
  for (const auto& [key, value] : summary) {
    if (!s.empty()) s += ' ';
    s += key + "=" + format_cell(value);
  }
  return s;
}

namespace {

nlohmann::json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return std::stod(format_number(*d));
  }
  return std::get<std::string>(c);
}

}  // namespace

nlohmann::json summary_json(const Summary& summary) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : summary) j[key] = cell_json(value);
  return j;
}

nlohmann::json report_json(const Table& table, const Summary& summary) {
  nlohmann::json cols = nlohmann::json::object();
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : table.rows) arr.push_back(cell_json(row.at(c)));
    cols[table.columns[c]] = std::move(arr);
  }
  return {{"columns", table.columns}, {"data", std::move(cols)}, {"summary", summary_json(summary)}};
}

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw ArgumentError("format must be csv or json, got '" + name + "'");
}

std::string extension(ReportFormat format) { return format == ReportFormat::Csv ? ".csv" : ".json"; }

void emit_report(const Table& table, const Summary& summary, ReportFormat format,
                 const std::filesystem::path& path) {
  if (table.rows.empty()) throw ArgumentError("refusing to emit an empty report");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  if (format == ReportFormat::Csv) {
    write_csv(out, table);
  } else {
    out << report_json(table, summary).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace nnrates
