#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cli {

using json = nlohmann::json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario parameters: defaults overlaid by a user config; unknown keys and
// type mismatches are rejected.
class Params {
 public:
  explicit Params(json defaults) : values_(std::move(defaults)) {}

  void overlay(const json& user) {
    if (!user.is_object()) throw config_error("config: top level must be a JSON object");
    for (const auto& [key, value] : user.items()) {
      if (key == "schema") {
        if (value != 1) throw config_error("config: unsupported schema version (expected 1)");
        continue;
      }
      if (!values_.contains(key)) throw config_error("config: unknown key '" + key + "'");
      const auto& ref = values_[key];
      const bool same = (ref.is_number() && value.is_number()) || ref.type() == value.type();
      if (!same) throw config_error("config: key '" + key + "' has the wrong type");
      if (ref.is_array() && !ref.empty() && !value.empty())
        for (const auto& x : value)
          if (x.type() != ref.front().type() && !(x.is_number() && ref.front().is_number()))
            throw config_error("config: key '" + key + "' has elements of the wrong type");
      values_[key] = value;
    }
  }

  double num(const std::string& key) const { return values_.at(key).get<double>(); }
  int integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) throw config_error("config: key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }
  bool flag(const std::string& key) const { return values_.at(key).get<bool>(); }
  std::string str(const std::string& key) const { return values_.at(key).get<std::string>(); }
  std::vector<double> list(const std::string& key) const { return values_.at(key).get<std::vector<double>>(); }

  const json& all() const { return values_; }

 private:
  json values_;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::logic_error("no column " + name);
    const auto c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) {
      if (const auto* d = std::get_if<double>(&r[c])) out.push_back(*d);
      else if (const auto* i = std::get_if<long long>(&r[c])) out.push_back(static_cast<double>(*i));
      else out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
  }
};

inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_number(v);
            else out << v;
          },
          r[c]);
    }
    out << "\n";
  }
  return out.str();
}

inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

struct Series {
  std::string label;
  std::vector<double> x, y;
};

inline std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Line plot with axes, tick labels and a legend.
inline std::string line_plot(const std::vector<Series>& series, const std::string& xlabel, const std::string& ylabel,
                             bool markers = false) {
  const double w = 640, h = 420, l = 70, r = 20, t = 20, b = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      x0 = std::min(x0, s.x[k]), x1 = std::max(x1, s.x[k]);
      y0 = std::min(y0, s.y[k]), y1 = std::max(y1, s.y[k]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5 * (std::abs(y0) + 1e-12), y1 += 0.5 * (std::abs(y1) + 1e-12);
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad, y1 += pad;
  auto px = [&](double x) { return l + (x - x0) / (x1 - x0) * (w - l - r); };
  auto py = [&](double y) { return h - b - (y - y0) / (y1 - y0) * (h - t - b); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << l << "\" y1=\"" << h - b << "\" x2=\"" << w - r << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << l << "\" y1=\"" << t << "\" x2=\"" << l << "\" y2=\"" << h - b << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.4g", xv);
    std::snprintf(ys, sizeof ys, "%.4g", yv);
    out << "<text x=\"" << px(xv) << "\" y=\"" << h - b + 16 << "\" text-anchor=\"middle\">" << xs << "</text>\n";
    out << "<text x=\"" << l - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << ys << "</text>\n";
  }
  out << "<text x=\"" << (l + w - r) / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">" << svg_escape(xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << (t + h - b) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << (t + h - b) / 2
      << ")\">" << svg_escape(ylabel) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    std::ostringstream pts;
    for (std::size_t k = 0; k < series[s].x.size(); ++k)
      if (std::isfinite(series[s].x[k]) && std::isfinite(series[s].y[k]))
        pts << px(series[s].x[k]) << "," << py(series[s].y[k]) << " ";
    if (markers) {
      for (std::size_t k = 0; k < series[s].x.size(); ++k)
        if (std::isfinite(series[s].x[k]) && std::isfinite(series[s].y[k]))
          out << "<circle cx=\"" << px(series[s].x[k]) << "\" cy=\"" << py(series[s].y[k]) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    }
    out << "<text x=\"" << w - r - 150 << "\" y=\"" << t + 14 * (s + 1) << "\" fill=\"" << c << "\">" << svg_escape(series[s].label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Site intensities as filled circles on a white-to-blue scale.
inline std::string site_heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& v,
                                const std::string& title) {
  const double size = 600, margin = 20;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY, vmax = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    x0 = std::min(x0, x[k]), x1 = std::max(x1, x[k]), y0 = std::min(y0, y[k]), y1 = std::max(y1, y[k]);
    vmax = std::max(vmax, v[k]);
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double scale = (size - 2 * margin) / span;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"14\">" << svg_escape(title) << "</text>\n";
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = vmax > 0 ? std::sqrt(v[k] / vmax) : 0.0;
    const int shade = static_cast<int>(std::lround(255 * (1 - f)));
    char col[16];
    std::snprintf(col, sizeof col, "#%02x%02xff", shade, shade);
    out << "<circle cx=\"" << margin + (x[k] - x0) * scale << "\" cy=\"" << 20 + size - margin - (y[k] - y0) * scale
        << "\" r=\"3\" fill=\"" << col << "\" stroke=\"#ccc\" stroke-width=\"0.3\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace cli
