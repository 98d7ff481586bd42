#pragma once

// Tabular output shared by the command-line tool: one table type rendered as
// aligned text, CSV or JSON. Rendering is deterministic: numbers are printed
// with 17 significant digits in CSV/JSON and keys keep insertion order.

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dipolegate/feasibility.hpp"
#include "dipolegate/reproduce.hpp"

namespace dipolegate::report {

// Empty cells render as "" (CSV/text) and null (JSON).
using Cell = std::variant<std::monostate, double, std::int64_t, std::string, bool>;

struct Column {
  std::string name;
  std::string unit;  // empty for plain text columns
};

struct Table {
  std::string command;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  // Free-form key/value context (inputs, seed, ...), kept in order.
  std::vector<std::pair<std::string, std::string>> meta;

  // Throws InvalidArgument when the row width differs from the column count.
  void add_row(std::vector<Cell> row);
};

enum class Format { table, csv, json };

// Accepts "table", "csv", "json".
Format format_from_name(const std::string& name);

std::string to_text(const Table& t);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);
std::string render(const Table& t, Format format);

// Several tables under one JSON document / separated text blocks.
std::string render(const std::vector<Table>& tables, Format format);

Table report_table(const feasibility::FeasibilityReport& report);
Table checks_table(const std::vector<reproduce::Check>& checks);

}  // namespace dipolegate::report
