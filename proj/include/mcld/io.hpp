#pragma once

// Tables written as CSV or JSON, and a static SVG renderer for particle paths.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mcld/error.hpp"
#include "mcld/particle_system.hpp"

namespace mcld {

using Cell = std::variant<double, long long, std::string>;

/// A named table with fixed columns; the unit of every file the CLI writes.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("Table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }
};

/// Shortest "%.17g" rendering, which round-trips doubles exactly.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return csv_escape(std::get<std::string>(c));
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << detail::csv_escape(t.columns[j]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << detail::cell_text(row[j]);
    os << '\n';
  }
}

/// Array of row objects keyed by column name.
inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::visit([&](const auto& v) { obj[t.columns[j]] = v; }, row[j]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

/// Block sizes as a compact JSON array, used inside trajectory rows.
inline std::string blocks_json(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s + "]";
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

/// Writes `<dir>/<name>.csv` or `<dir>/<name>.json`; returns the path.
inline std::filesystem::path write_table(const std::filesystem::path& dir, const Table& t, bool json) {
  std::ostringstream os;
  if (json) {
    os << to_json(t).dump(1) << '\n';
  } else {
    write_csv(os, t);
  }
  const auto path = dir / (t.name + (json ? ".json" : ".csv"));
  write_text_file(path, os.str());
  return path;
}

// ---------------------------------------------------------------------------
// SVG

struct PathFigure {
  std::vector<Segment> segments;
  std::vector<double> final_end;    ///< per particle: death time, or the horizon if alive
  std::vector<double> death_marks;  ///< times at which some block reached 0
  double horizon = 1.0;
  std::string title;
};

/// Height paths drawn piecewise linearly, deaths marked on the zero line.
/// Pure: the same figure always renders to the same bytes.
inline std::string render_svg(const PathFigure& fig) {
  const double W = 720.0;
  const double H = 420.0;
  const double L = 60.0;
  const double R = 20.0;
  const double T = 40.0;
  const double B = 40.0;
  double ymin = 0.0;
  for (const Segment& s : fig.segments) ymin = std::min(ymin, s.y0);
  if (ymin == 0.0) ymin = -1.0;
  const double tmax = fig.horizon > 0.0 ? fig.horizon : 1.0;
  auto X = [&](double t) { return L + (W - L - R) * t / tmax; };
  auto Y = [&](double y) { return T + (H - T - B) * (y / ymin); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return std::string(buf);
  };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!fig.title.empty()) {
    os << "<text x=\"" << num(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"14\">" << fig.title << "</text>\n";
  }
  os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << num(X(tmax)) << "\" y2=\"" << num(Y(0))
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(X(0)) << "\" y1=\"" << num(Y(0)) << "\" x2=\"" << num(X(0)) << "\" y2=\"" << num(Y(ymin))
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << num(X(tmax)) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"12\">t = " << num(tmax) << "</text>\n";
  os << "<text x=\"" << num(L - 6) << "\" y=\"" << num(Y(ymin)) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"12\">" << num(ymin) << "</text>\n";
  os << "<text x=\"" << num(L - 6) << "\" y=\"" << num(Y(0) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
     << "font-size=\"12\">0</text>\n";

  // Segments of one particle are consecutive in time; each ends where the next begins.
  std::map<std::size_t, std::vector<const Segment*>> by_id;
  for (const Segment& s : fig.segments) by_id[s.id].push_back(&s);
  for (const auto& [id, segs] : by_id) {
    const double last = id < fig.final_end.size() ? std::min(fig.final_end[id], tmax) : tmax;
    const std::string open = std::string("<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"") + palette[id % 10] +
                             "\" points=\"";
    os << open;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      const Segment& s = *segs[k];
      if (s.t0 > tmax) break;
      const double end = k + 1 < segs.size() ? std::min(segs[k + 1]->t0, tmax) : last;
      const double y_end = s.y0 + s.slope * (end - s.t0);
      bool jump = false;
      if (k > 0) {
        const Segment& p = *segs[k - 1];
        jump = std::abs(p.y0 + p.slope * (s.t0 - p.t0) - s.y0) > 1e-12;
      }
      // A jump (re-insertion after a burn) starts a new polyline at the new height.
      if (jump) os << "\"/>\n" << open;
      if (k == 0 || jump) os << num(X(s.t0)) << ',' << num(Y(s.y0));
      os << ' ' << num(X(end)) << ',' << num(Y(std::min(0.0, y_end)));
    }
    os << "\"/>\n";
  }
  for (double t : fig.death_marks) {
    if (t > tmax) continue;
    os << "<circle cx=\"" << num(X(t)) << "\" cy=\"" << num(Y(0)) << "\" r=\"3\" fill=\"black\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace mcld
