#include "pqslab/sweep/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pqslab::sweep {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match table columns");
  rows.push_back(std::move(row));
}

Cell optional_cell(const std::optional<double>& v) {
  if (!v) return std::monostate{};
  return *v;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, c);
}

Json json_value(const Cell& c) {
  struct Visitor {
    Json operator()(std::monostate) const { return nullptr; }
    Json operator()(double v) const {
      if (std::isfinite(v)) return v;
      return format_double(v);
    }
    Json operator()(long long v) const { return v; }
    Json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_value(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      row.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(row));
      row.clear();
    } else {
      field += ch;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0;
  double pixel_hi = 1.0;

  double map(double v) const {
    const double t = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo)) : (v - lo) / (hi - lo);
    return pixel_lo + t * (pixel_hi - pixel_lo);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

Axis make_axis(std::vector<double> values, bool log, double pixel_lo, double pixel_hi) {
  Axis a;
  a.log = log;
  a.pixel_lo = pixel_lo;
  a.pixel_hi = pixel_hi;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0.0)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  if (hi <= lo) {
    if (log) {
      lo /= 2.0;
      hi *= 2.0;
    } else {
      const double pad = lo == 0.0 ? 1.0 : 0.1 * std::fabs(lo);
      lo -= pad;
      hi += pad;
    }
  } else if (!log) {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  a.lo = lo;
  a.hi = hi;
  return a;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  for (const auto& h : plot.h_lines) ys.push_back(h.value);
  for (const auto& v : plot.v_lines) xs.push_back(v.value);
  const double plot_right = kWidth - kRight;
  const double plot_bottom = kHeight - kBottom;
  const Axis ax = make_axis(xs, plot.log_x, kLeft, plot_right);
  const Axis ay = make_axis(ys, plot.log_y, plot_bottom, kTop);

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kLeft) + "\" y=\"22\" font-size=\"14\">" + escape(plot.title) + "</text>\n";
  svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(plot_right - kLeft) + "\" height=\"" +
         fmt(plot_bottom - kTop) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks at both ends and the middle of each axis.
  for (int i = 0; i <= 2; ++i) {
    const double t = 0.5 * i;
    const double xv = ax.log ? std::pow(10.0, std::log10(ax.lo) + t * (std::log10(ax.hi) - std::log10(ax.lo)))
                             : ax.lo + t * (ax.hi - ax.lo);
    const double yv = ay.log ? std::pow(10.0, std::log10(ay.lo) + t * (std::log10(ay.hi) - std::log10(ay.lo)))
                             : ay.lo + t * (ay.hi - ay.lo);
    svg += "<text x=\"" + fmt(ax.map(xv)) + "\" y=\"" + fmt(plot_bottom + 16) + "\" text-anchor=\"middle\">" +
           tick_label(xv) + "</text>\n";
    svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(ay.map(yv) + 4) + "\" text-anchor=\"end\">" +
           tick_label(yv) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(0.5 * (kLeft + plot_right)) + "\" y=\"" + fmt(kHeight - 14) + "\" text-anchor=\"middle\">" +
         escape(plot.x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(0.5 * (kTop + plot_bottom)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt(0.5 * (kTop + plot_bottom)) + ")\">" + escape(plot.y_label) + "</text>\n";

  for (const auto& h : plot.h_lines) {
    if (!ay.usable(h.value)) continue;
    const std::string y = fmt(ay.map(h.value));
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + y + "\" x2=\"" + fmt(plot_right) + "\" y2=\"" + y +
           "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    svg += "<text x=\"" + fmt(plot_right + 4) + "\" y=\"" + y + "\" fill=\"gray\">" + escape(h.label) + "</text>\n";
  }
  for (const auto& v : plot.v_lines) {
    if (!ax.usable(v.value)) continue;
    const std::string x = fmt(ax.map(v.value));
    svg += "<line x1=\"" + x + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + x + "\" y2=\"" + fmt(plot_bottom) +
           "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + fmt(kTop - 4) + "\" fill=\"gray\" text-anchor=\"middle\">" + escape(v.label) +
           "</text>\n";
  }

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const Series& s = plot.series[si];
    const char* color = kColors[si % (sizeof kColors / sizeof kColors[0])];
    const std::string style = std::string("fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\"" +
                              (s.dashed ? " stroke-dasharray=\"6,4\"" : "");
    std::string points;
    auto flush = [&] {
      if (!points.empty()) svg += "<polyline " + style + " points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
        flush();
        continue;
      }
      // Clamp to the frame so far-out values stay visible at the edge.
      const double px = ax.map(s.x[i]);
      const double py = std::clamp(ay.map(s.y[i]), kTop, plot_bottom);
      if (!points.empty()) points += ' ';
      points += fmt(px) + "," + fmt(py);
    }
    flush();
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt(plot_right + 8) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(plot_right + 28) +
           "\" y2=\"" + fmt(ly - 4) + "\" " + style + "/>\n";
    svg += "<text x=\"" + fmt(plot_right + 32) + "\" y=\"" + fmt(ly) + "\">" + escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path.string();
}

}  // namespace pqslab::sweep
