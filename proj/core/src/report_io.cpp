#include "dipolegate/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "dipolegate/errors.hpp"

namespace dipolegate::report {

namespace {

std::string number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string cell_text(const Cell& c, int digits) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return number(v, digits);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string header(const Column& c) { return c.unit.empty() ? c.name : c.name + " [" + c.unit + "]"; }

nlohmann::ordered_json table_json(const Table& t) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command"] = t.command;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  j["meta"] = meta;
  ordered_json cols = ordered_json::array();
  for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  j["columns"] = cols;
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json row = ordered_json::object();
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) row[t.columns[i].name] = nullptr;
            else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) row[t.columns[i].name] = v;
              else row[t.columns[i].name] = number(v, 17);
            } else row[t.columns[i].name] = v;
          },
          r[i]);
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw InvalidArgument("row width does not match the columns");
  rows.push_back(std::move(row));
}

Format format_from_name(const std::string& name) {
  if (name == "table") return Format::table;
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw InvalidArgument("unknown format '" + name + "'; expected table, csv or json");
}

std::string to_text(const Table& t) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head;
  for (const auto& c : t.columns) head.push_back(header(c));
  cells.push_back(head);
  for (const auto& r : t.rows) {
    std::vector<std::string> line;
    for (const auto& c : r) line.push_back(cell_text(c, 6));
    cells.push_back(line);
  }
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream out;
  for (const auto& [k, v] : t.meta) out << "# " << k << ": " << v << "\n";
  for (std::size_t l = 0; l < cells.size(); ++l) {
    std::string text;
    for (std::size_t i = 0; i < cells[l].size(); ++i) {
      if (i) text += "  ";
      text += cells[l][i];
      if (i + 1 < cells[l].size()) text.append(width[i] - cells[l][i].size(), ' ');
    }
    out << text << "\n";
    if (l == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w;
      out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << "\n";
    }
  }
  return out.str();
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(header(t.columns[i]));
  }
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(cell_text(r[i], 17));
    }
    out << "\n";
  }
  return out.str();
}

std::string to_json(const Table& t) { return table_json(t).dump(2) + "\n"; }

std::string render(const Table& t, Format format) {
  switch (format) {
    case Format::table: return to_text(t);
    case Format::csv: return to_csv(t);
    case Format::json: return to_json(t);
  }
  return {};
}

std::string render(const std::vector<Table>& tables, Format format) {
  if (tables.size() == 1) return render(tables.front(), format);
  if (format == Format::json) {
    nlohmann::ordered_json j;
    j["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : tables) j["tables"].push_back(table_json(t));
    return j.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (i) out += "\n";
    out += render(tables[i], format);
  }
  return out;
}

Table report_table(const feasibility::FeasibilityReport& report) {
  Table t;
  t.command = "feasibility";
  t.meta = {{"molecule", report.molecule},
            {"scenario", std::string(feasibility::name(report.scenario))}};
  t.columns = {{"id", ""},          {"quantity", ""}, {"value", ""},     {"unit", ""},
               {"expected", ""},    {"tolerance", ""}, {"deviation", ""}, {"status", ""},
               {"formula", ""}};
  for (const auto& e : report.entries) {
    std::string tol;
    if (e.tolerance) {
      tol = std::string(feasibility::name(e.tolerance->kind));
      if (e.tolerance->kind == feasibility::ToleranceKind::relative) {
        tol += " " + number(e.tolerance->value * 100.0, 6) + "%";
      } else if (e.tolerance->kind == feasibility::ToleranceKind::significant_figures) {
        tol += " " + number(e.tolerance->value, 6);
      }
    }
    std::string status;
    if (e.within) status = *e.within ? "within" : "outside";
    t.add_row({e.id, e.label, e.value, e.unit, opt(e.expected), tol, opt(e.relative_deviation),
               status, e.formula});
  }
  return t;
}

Table checks_table(const std::vector<reproduce::Check>& checks) {
  Table t;
  t.command = "reproduce";
  t.columns = {{"id", ""},       {"molecule", ""},  {"computed", ""}, {"expected", ""},
               {"unit", ""},     {"tolerance", ""}, {"status", ""},   {"note", ""}};
  std::size_t passed = 0;
  for (const auto& c : checks) {
    std::string tol = std::string(feasibility::name(c.tolerance.kind));
    if (c.tolerance.kind == feasibility::ToleranceKind::relative) {
      tol += " " + number(c.tolerance.value * 100.0, 6) + "%";
    } else if (c.tolerance.kind == feasibility::ToleranceKind::significant_figures) {
      tol += " " + number(c.tolerance.value, 6);
    }
    if (c.passed) ++passed;
    t.add_row({c.id, c.molecule, c.error ? Cell() : Cell(c.computed), c.expected, c.unit, tol,
               std::string(c.error ? "ERROR" : (c.passed ? "PASS" : "FAIL")),
               c.error ? *c.error : c.note});
  }
  t.meta = {{"passed", std::to_string(passed) + "/" + std::to_string(checks.size())}};
  return t;
}

}  // namespace dipolegate::report
