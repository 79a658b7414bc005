#include "ovm/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "ovm/error.hpp"

namespace ovm {

std::string format_double(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string join_list(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(values[i]);
  }
  return out;
}

std::vector<std::size_t> parse_list(std::string_view field) {
  std::vector<std::size_t> out;
  if (field.empty()) return out;
  for (const std::string& part : split(field, ';')) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      fail(ErrorKind::SchemaMismatch, "bad list element '" + part + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string join(const std::vector<std::string>& fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += sep;
    out += fields[i];
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::SchemaMismatch, "missing column '" + std::string(name) + "'");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::SchemaMismatch, path.string() + " has no header");
  table.header = split(line, ',');
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != table.header.size()) {
      fail(ErrorKind::SchemaMismatch, path.string() + ": row has " + std::to_string(fields.size()) +
                                          " fields, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void require_header(const CsvTable& table, const std::vector<std::string>& expected, std::string_view what) {
  if (table.header != expected) {
    fail(ErrorKind::SchemaMismatch, std::string(what) + " header is '" + join(table.header, ',') + "', expected '" +
                                        join(expected, ',') + "'");
  }
}

}  // namespace ovm
