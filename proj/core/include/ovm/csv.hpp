#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ovm {

/// 17 significant digits ("%.17g"): round-trips every double and is the
/// pinned serialization for all CSV outputs.
std::string format_double(double value);

/// Joins integers with ';' for list-valued CSV fields.
std::string join_list(const std::vector<std::size_t>& values);
std::vector<std::size_t> parse_list(std::string_view field);

/// Minimal reader for the comma-separated, unquoted, LF-terminated files this
/// project writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws SchemaMismatch if missing.
  std::size_t column(std::string_view name) const;
};

/// Throws IoError when unreadable, SchemaMismatch on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);
/// Throws SchemaMismatch unless the header equals `expected` exactly.
void require_header(const CsvTable& table, const std::vector<std::string>& expected, std::string_view what);

std::vector<std::string> split(std::string_view line, char sep);
std::string join(const std::vector<std::string>& fields, char sep);

}  // namespace ovm
