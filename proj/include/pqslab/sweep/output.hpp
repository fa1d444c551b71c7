#pragma once

// Tables serialized as CSV or JSON, and minimal SVG line plots.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pqslab::sweep {

using Json = nlohmann::ordered_json;

/// Empty cells are undefined quantities (CSV: empty, JSON: null).
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

Cell optional_cell(const std::optional<double>& v);

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

std::string to_csv(const Table& table);
Json to_json(const Table& table);
/// Deterministic text form (2-space indent, trailing newline).
std::string dump(const Json& j);

/// Splits CSV text produced by to_csv back into fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct RefLine {
  double value = 0.0;
  std::string label;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
  std::vector<RefLine> h_lines;
  std::vector<RefLine> v_lines;
};

/// Polyline plot; non-finite samples split a series into segments.
std::string render_svg(const PlotSpec& plot);

/// Writes text to dir/name, creating dir. Returns the path.
std::string write_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace pqslab::sweep
