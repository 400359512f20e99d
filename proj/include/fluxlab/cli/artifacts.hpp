// Copyright 2026 The fluxlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fluxlab/errors.hpp"

// Deterministic artifact emission: CSV tables (12 significant digits for
// floating-point fields), minimal SVG charts derived from the same tables,
// and the run manifest.

namespace fluxlab::cli {

/// One tabular artifact held in memory before being written out; the SVG
/// emitters draw from the identical rows the CSV writer serializes.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::variant<double, std::string>>> rows;

  void add_row(std::vector<std::variant<double, std::string>> r) {
    if (r.size() != columns.size()) {
      throw Error("Table: row width does not match header");
    }
    rows.push_back(std::move(r));
  }

  double num(std::size_t row, std::size_t col) const {
    return std::get<double>(rows[row][col]);
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string s;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) s += ',';
    s += t.columns[c];
  }
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) s += ',';
      if (std::holds_alternative<double>(row[c])) {
        s += detail::format_double(std::get<double>(row[c]));
      } else {
        s += std::get<std::string>(row[c]);
      }
    }
    s += '\n';
  }
  return s;
}

inline void write_csv(const std::filesystem::path& path, const Table& t) {
  detail::write_file(path, to_csv(t));
}

// ---- SVG ----------------------------------------------------------------------

struct Series {
  std::string name;
  std::size_t x_col = 0;
  std::size_t y_col = 1;
  std::string color = "#1f77b4";
};

namespace detail {

struct Extent {
  double lo = 0.0, hi = 1.0;
  void grow(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

inline std::string svg_header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) +
         "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace detail

/// Plain line chart over table columns. Axis ranges are data-driven; labels
/// carry the raw column names.
inline std::string to_svg_lines(const Table& t, const std::vector<Series>& series,
                                const std::string& title) {
  const int w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double x = t.num(r, s.x_col), y = t.num(r, s.y_col);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (!(xhi > xlo)) xhi = xlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  const double xpad = 0.0, ypad = 0.05 * (yhi - ylo);
  ylo -= ypad;
  yhi += ypad;
  auto px = [&](double x) {
    return ml + (x - xlo) / (xhi - xlo + xpad) * (w - ml - mr);
  };
  auto py = [&](double y) {
    return h - mb - (y - ylo) / (yhi - ylo) * (h - mt - mb);
  };

  std::string svg = detail::svg_header(w, h);
  svg += "<text x=\"" + std::to_string(w / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + title + "</text>\n";
  // axes
  svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(h - mb) +
         "\" x2=\"" + std::to_string(w - mr) + "\" y2=\"" +
         std::to_string(h - mb) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) +
         "\" x2=\"" + std::to_string(ml) + "\" y2=\"" + std::to_string(h - mb) +
         "\" stroke=\"black\"/>\n";
  // zero line if visible
  if (ylo < 0.0 && yhi > 0.0) {
    svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" +
           detail::format_double(py(0.0)) + "\" x2=\"" + std::to_string(w - mr) +
           "\" y2=\"" + detail::format_double(py(0.0)) +
           "\" stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>\n";
  }
  auto axis_label = [&](double v, bool xaxis, double pos) {
    std::string s = "<text font-family=\"sans-serif\" font-size=\"11\" ";
    if (xaxis) {
      s += "x=\"" + detail::format_double(pos) + "\" y=\"" +
           std::to_string(h - mb + 18) + "\" text-anchor=\"middle\"";
    } else {
      s += "x=\"" + std::to_string(ml - 8) + "\" y=\"" +
           detail::format_double(pos + 4) + "\" text-anchor=\"end\"";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    s += ">" + std::string(buf) + "</text>\n";
    return s;
  };
  for (int i = 0; i <= 4; ++i) {
    const double xv = xlo + (xhi - xlo) * i / 4;
    const double yv = ylo + (yhi - ylo) * i / 4;
    svg += axis_label(xv, true, px(xv));
    svg += axis_label(yv, false, py(yv));
  }
  int legend_y = mt + 8;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      pts += detail::format_double(px(t.num(r, s.x_col))) + "," +
             detail::format_double(py(t.num(r, s.y_col))) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    svg += "<text x=\"" + std::to_string(w - mr - 150) + "\" y=\"" +
           std::to_string(legend_y) + "\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"" + s.color + "\">" + s.name + "</text>\n";
    legend_y += 14;
  }
  svg += "</svg>\n";
  return svg;
}

/// Color-cell grid for categorical data. cell_color(row) must return a CSS
/// color per table row; rows are laid out by the (x_col, y_col) values.
inline std::string to_svg_cells(const Table& t, std::size_t x_col,
                                std::size_t y_col,
                                const std::vector<std::string>& colors,
                                const std::string& title) {
  const int w = 720, h = 560, ml = 70, mr = 140, mt = 40, mb = 50;
  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    xs.push_back(t.num(r, x_col));
    ys.push_back(t.num(r, y_col));
  }
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<double> ux = uniq(xs), uy = uniq(ys);
  const double cw = double(w - ml - mr) / ux.size();
  const double ch = double(h - mt - mb) / uy.size();
  auto find_idx = [](const std::vector<double>& v, double x) {
    return std::size_t(std::lower_bound(v.begin(), v.end(), x - 1e-15) -
                       v.begin());
  };
  std::string svg = detail::svg_header(w, h);
  svg += "<text x=\"" + std::to_string((ml + w - mr) / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + title + "</text>\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t ix = find_idx(ux, xs[r]);
    const std::size_t iy = find_idx(uy, ys[r]);
    const double x = ml + ix * cw;
    const double y = h - mb - (iy + 1) * ch;
    svg += "<rect x=\"" + detail::format_double(x) + "\" y=\"" +
           detail::format_double(y) + "\" width=\"" + detail::format_double(cw + 0.5) +
           "\" height=\"" + detail::format_double(ch + 0.5) + "\" fill=\"" +
           colors[r] + "\"/>\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g/%.3g", ux.front(), ux.back());
  svg += "<text x=\"" + std::to_string(ml) + "\" y=\"" +
         std::to_string(h - mb + 18) +
         "\" font-family=\"sans-serif\" font-size=\"11\">x: " +
         std::string(buf) + "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g/%.3g", uy.front(), uy.back());
  svg += "<text x=\"5\" y=\"" + std::to_string(mt) +
         "\" font-family=\"sans-serif\" font-size=\"11\">y: " +
         std::string(buf) + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

// ---- manifest --------------------------------------------------------------------

inline void write_manifest(const std::filesystem::path& dir,
                           const std::string& command,
                           const std::string& config_hash,
                           const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["artifacts"] = artifacts;
  detail::write_file(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace fluxlab::cli
