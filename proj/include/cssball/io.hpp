#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cssball/errors.hpp"
#include "cssball/radial.hpp"

namespace cssball::io {

using json = nlohmann::json;

/// Shortest text that always round-trips: 17 significant digits, '.' decimal.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void add_numbers(const std::vector<double>& row) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double x : row) cells.push_back(format_double(x));
    rows.push_back(std::move(cells));
  }
};

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline std::string to_json_text(const json& j) { return j.dump(2) + "\n"; }

/// NaN and infinities have no JSON literal; they become null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

/// Writes bytes verbatim (binary mode, so LF stays LF).
inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// `path` with its extension replaced; used for companion artifacts.
inline std::filesystem::path companion(const std::filesystem::path& path, const std::string& ext) {
  std::filesystem::path out = path;
  out.replace_extension(ext);
  if (out == path) out += ext;
  return out;
}

// ---- radial fields ---------------------------------------------------------

inline Table field_table(const radial::RadialField& field) {
  Table t{{"r", "u", "H", "Tail"}, {}};
  const auto& g = field.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    t.add_numbers({g.r(i), field.u()[i], field.H()[i], field.Tail()[i]});
  }
  return t;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw IoError(where + ": not a number: '" + s + "'");
  }
  return x;
}

}  // namespace detail

/// Rebuilds a field from its CSV. The grid is recovered from the node
/// column, which must match r_i = i R/(n+1) exactly.
inline radial::RadialField field_from_csv(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::split(line, ',').at(0) != "r") {
    throw IoError(where + ": missing field header");
  }
  std::vector<double> r;
  std::vector<double> u;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() < 2) throw IoError(where + ":" + std::to_string(lineno) + ": short row");
    const std::string loc = where + ":" + std::to_string(lineno);
    r.push_back(detail::parse_double(cells[0], loc));
    u.push_back(detail::parse_double(cells[1], loc));
  }
  if (r.size() < radial::Grid::kMinNodes + 2) throw IoError(where + ": too few rows");
  const radial::Grid grid(r.back(), r.size() - 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != grid.r(i)) throw IoError(where + ": node column is not a uniform grid");
  }
  return {grid, std::move(u)};
}

inline radial::RadialField read_field_csv(const std::filesystem::path& path) {
  return field_from_csv(read_file(path), path.string());
}

// ---- minimal SVG line plots ------------------------------------------------

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

inline std::string svg_plot(const std::string& title, const std::string& xlabel,
                            const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, left = 70, right = 150, top = 40, bottom = 50;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmin < xmax)) xmax = xmin + 1.0;
  if (!(ymin < ymax)) ymax = ymin + 1.0;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  auto X = [&](double x) { return left + pw * (x - xmin) / (xmax - xmin); };
  auto Y = [&](double y) { return top + ph * (1.0 - (y - ymin) / (ymax - ymin)); };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.6g", v);
    return std::string(b);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o += "<text x=\"" + num(left) + "\" y=\"24\" font-size=\"14\">" + title + "</text>\n";
  o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 4.0;
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    o += "<text x=\"" + num(X(xv)) + "\" y=\"" + num(top + ph + 16) +
         "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(Y(yv) + 4) +
         "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  o += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(H - 10) +
       "\" text-anchor=\"middle\">" + xlabel + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 5];
    o += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
    }
    o += "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(k + 1);
    o += "<line x1=\"" + num(W - right + 10) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
         num(W - right + 30) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + c + "\"/>\n";
    o += "<text x=\"" + num(W - right + 36) + "\" y=\"" + num(ly) + "\">" + s.name + "</text>\n";
  }
  o += "</svg>\n";
  return o;
}

}  // namespace cssball::io
