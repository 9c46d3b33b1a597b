#include "bmdlimits/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "bmdlimits/errors.hpp"
#include "json.hpp"

namespace bmdlimits {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string markdown_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::kCsv;
  if (name == "markdown" || name == "md") return Format::kMarkdown;
  if (name == "jsonl" || name == "json-lines") return Format::kJsonl;
  throw DomainError("unknown output format '" + name + "' (csv, markdown, jsonl)");
}

std::string to_string(Format f) {
  switch (f) {
    case Format::kCsv:
      return "csv";
    case Format::kMarkdown:
      return "markdown";
    case Format::kJsonl:
      return "jsonl";
  }
  return "csv";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::string format_fixed(double x, int digits) {
  if (!std::isfinite(x)) return format_number(x);
  char buf[400];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, digits);
  return {buf, res.ptr};
}

std::string cell_text(const Cell& c) {
  return std::visit(Overloaded{
                        [](std::monostate) { return std::string{}; },
                        [](const std::string& s) { return s; },
                        [](std::int64_t v) { return std::to_string(v); },
                        [](std::uint64_t v) { return std::to_string(v); },
                        [](double v) { return format_number(v); },
                        [](bool b) { return std::string(b ? "true" : "false"); },
                    },
                    c);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw DomainError("row has " + std::to_string(row.size()) + " cells, table has " +
                      std::to_string(columns.size()) + " columns");
  }
  rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << '\n';
  }
}

void write_markdown(std::ostream& out, const Table& t) {
  out << '|';
  for (const auto& c : t.columns) out << ' ' << markdown_field(c) << " |";
  out << "\n|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& row : t.rows) {
    out << '|';
    for (const auto& c : row) out << ' ' << markdown_field(cell_text(c)) << " |";
    out << '\n';
  }
}

void write_jsonl(std::ostream& out, const Table& t) {
  for (const auto& row : t.rows) {
    // ordered_json keeps the column order.
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      auto& slot = j[t.columns[i]];
      std::visit(Overloaded{
                     [&](std::monostate) { slot = nullptr; },
                     [&](const std::string& s) { slot = s; },
                     [&](std::int64_t v) { slot = v; },
                     [&](std::uint64_t v) { slot = v; },
                     [&](double v) {
                       if (std::isfinite(v)) {
                         slot = v;
                       } else {
                         slot = format_number(v);
                       }
                     },
                     [&](bool b) { slot = b; },
                 },
                 row[i]);
    }
    out << j.dump() << '\n';
  }
}

void write_table(std::ostream& out, const Table& t, Format f) {
  switch (f) {
    case Format::kCsv:
      write_csv(out, t);
      break;
    case Format::kMarkdown:
      write_markdown(out, t);
      break;
    case Format::kJsonl:
      write_jsonl(out, t);
      break;
  }
}

}  // namespace bmdlimits
