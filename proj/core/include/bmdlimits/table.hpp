#pragma once

// Small result table with CSV, markdown and JSON-lines writers. Numbers are
// printed with std::to_chars so output is stable across platforms.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace bmdlimits {

using Cell = std::variant<std::monostate, std::string, std::int64_t, std::uint64_t, double, bool>;

enum class Format { kCsv, kMarkdown, kJsonl };

// "csv", "markdown" (or "md"), "jsonl" (or "json-lines"); throws DomainError otherwise.
Format parse_format(const std::string& name);
std::string to_string(Format f);

// Shortest round-trip representation; "inf", "-inf", "nan" for non-finite.
std::string format_number(double x);
// Fixed notation with `digits` decimals.
std::string format_fixed(double x, int digits);

std::string cell_text(const Cell& c);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Throws DomainError when the row width does not match the columns.
  void add_row(std::vector<Cell> row);
};

void write_csv(std::ostream& out, const Table& t);
void write_markdown(std::ostream& out, const Table& t);
void write_jsonl(std::ostream& out, const Table& t);
void write_table(std::ostream& out, const Table& t, Format f);

}  // namespace bmdlimits
