#pragma once
// File emission: RFC-4180 CSV, ordered JSON, a documented binary matrix
// layout, and static SVG line plots.  Every write goes through a temp file
// plus rename, so readers never observe partial output.  Identical inputs
// produce byte-identical files; nothing here embeds a clock or a path.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toeplab/checks.hpp"
#include "toeplab/matrix.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary matrix layout assumes a little-endian host");

namespace toeplab {

using json = nlohmann::ordered_json;

inline void write_bytes_atomic(const std::filesystem::path& path, const void* data,
                               std::size_t size) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write: cannot open " + tmp.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw std::runtime_error("write: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  write_bytes_atomic(path, content.data(), content.size());
}

inline void write_json_atomic(const std::filesystem::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

// Shortest text that round-trips a double; special values spelled out.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Fixed-width table with CRLF records.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : width_(header.size()) {
    if (width_ == 0) throw std::invalid_argument("CsvTable: empty header");
    rows_.push_back(std::move(header));
  }

  void add_row(std::vector<std::string> row) {
    if (row.size() != width_)
      throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(std::move(row));
  }

  std::size_t rows() const { return rows_.size() - 1; }

  std::string to_string() const {
    std::string out;
    for (const std::vector<std::string>& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(row[i]);
      }
      out += "\r\n";
    }
    return out;
  }

 private:
  std::size_t width_;
  std::vector<std::vector<std::string>> rows_;
};

inline json verdict_json(const CheckReport& report) {
  json j;
  j["check"] = report.check;
  j["params"] = report.params;
  j["seed"] = report.seed;
  j["pass"] = report.pass;
  json metrics;
  for (const auto& kv : report.metrics) metrics[kv.first] = kv.second;
  j["metrics"] = std::move(metrics);
  return j;
}

// Binary matrix layout: uint32 little-endian header length, a JSON header
// carrying at least format_version/rows/cols, then row-major complex entries
// as real, imag pairs of IEEE-754 binary64.
inline void write_matrix_binary(const std::filesystem::path& path, const ComplexMatrix& m,
                                json meta = json::object()) {
  meta["format_version"] = 1;
  meta["rows"] = m.rows();
  meta["cols"] = m.cols();
  const std::string header = meta.dump();
  if (header.size() > 0xffffffffull)
    throw std::invalid_argument("write_matrix_binary: oversized header");
  const std::uint32_t header_len = static_cast<std::uint32_t>(header.size());

  std::vector<unsigned char> blob(4 + header.size() + 16 * m.rows() * m.cols());
  std::memcpy(blob.data(), &header_len, 4);
  std::memcpy(blob.data() + 4, header.data(), header.size());
  unsigned char* cursor = blob.data() + 4 + header.size();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double re = m(i, j).real(), im = m(i, j).imag();
      std::memcpy(cursor, &re, 8);
      std::memcpy(cursor + 8, &im, 8);
      cursor += 16;
    }
  write_bytes_atomic(path, blob.data(), blob.size());
}

struct LoadedMatrix {
  ComplexMatrix entries;
  json meta;
};

inline LoadedMatrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_matrix_binary: cannot open " + path.string());
  std::uint32_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), 4);
  if (!in || header_len == 0 || header_len > (1u << 24))
    throw std::runtime_error("read_matrix_binary: bad header length");
  std::string header(header_len, '\0');
  in.read(header.data(), header_len);
  if (!in) throw std::runtime_error("read_matrix_binary: truncated header");
  json meta = json::parse(header);
  const std::size_t rows = meta.at("rows").get<std::size_t>();
  const std::size_t cols = meta.at("cols").get<std::size_t>();
  LoadedMatrix out{ComplexMatrix(rows, cols), std::move(meta)};
  std::vector<char> payload(16 * rows * cols);
  in.read(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!in) throw std::runtime_error("read_matrix_binary: truncated payload");
  const char* cursor = payload.data();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double re, im;
      std::memcpy(&re, cursor, 8);
      std::memcpy(&im, cursor + 8, 8);
      out.entries(i, j) = complex(re, im);
      cursor += 16;
    }
  return out;
}

// Entry list form, readable in any CSV tool; guarded to small matrices.
inline void write_matrix_csv(const std::filesystem::path& path, const ComplexMatrix& m) {
  if (m.rows() > 64 || m.cols() > 64)
    throw std::invalid_argument("write_matrix_csv: only matrices up to 64x64");
  CsvTable table({"row", "col", "re", "im"});
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      table.add_row({std::to_string(i), std::to_string(j), format_double(m(i, j).real()),
                     format_double(m(i, j).imag())});
  write_text_atomic(path, table.to_string());
}

// Minimal static line plots.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return std::string(buf);
}

}  // namespace detail

inline std::string render_svg_plot(const std::vector<PlotSeries>& series,
                                   const PlotOptions& opt) {
  if (series.empty()) throw std::invalid_argument("render_svg_plot: no series");
  const double width = 720, height = 480;
  const double ml = 72, mr = 24, mt = 40, mb = 56;

  const auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  const auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size() || s.x.empty())
      throw std::invalid_argument("render_svg_plot: series sizes");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((opt.log_x && !(s.x[i] > 0.0)) || (opt.log_y && !(s.y[i] > 0.0))) continue;
      x_min = std::min(x_min, tx(s.x[i]));
      x_max = std::max(x_max, tx(s.x[i]));
      y_min = std::min(y_min, ty(s.y[i]));
      y_max = std::max(y_max, ty(s.y[i]));
    }
  }
  if (!(x_min <= x_max) || !(y_min <= y_max))
    throw std::invalid_argument("render_svg_plot: no plottable points");
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const auto px = [&](double v) { return ml + (tx(v) - x_min) / (x_max - x_min) * (width - ml - mr); };
  const auto py = [&](double v) { return height - mb - (ty(v) - y_min) / (y_max - y_min) * (height - mt - mb); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  svg += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + opt.title + "</text>\n";

  // Axes with five ticks per side; labels show original-scale values.
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double fy = y_min + (y_max - y_min) * t / 4.0;
    const double gx = ml + (width - ml - mr) * t / 4.0;
    const double gy = height - mb - (height - mt - mb) * t / 4.0;
    const double label_x = opt.log_x ? std::pow(10.0, fx) : fx;
    const double label_y = opt.log_y ? std::pow(10.0, fy) : fy;
    svg += "<line x1=\"" + detail::svg_num(gx) + "\" y1=\"" + detail::svg_num(height - mb) +
           "\" x2=\"" + detail::svg_num(gx) + "\" y2=\"" + detail::svg_num(mt) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(gy) +
           "\" x2=\"" + detail::svg_num(width - mr) + "\" y2=\"" + detail::svg_num(gy) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + detail::svg_num(gx) + "\" y=\"" + detail::svg_num(height - mb + 16) +
           "\" text-anchor=\"middle\">" + detail::tick_label(label_x) + "</text>\n";
    svg += "<text x=\"" + detail::svg_num(ml - 6) + "\" y=\"" + detail::svg_num(gy + 4) +
           "\" text-anchor=\"end\">" + detail::tick_label(label_y) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + detail::svg_num(ml) + "\" y=\"" + detail::svg_num(mt) + "\" width=\"" +
         detail::svg_num(width - ml - mr) + "\" height=\"" + detail::svg_num(height - mt - mb) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg += "<text x=\"360\" y=\"" + detail::svg_num(height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + opt.x_label +
         "</text>\n";
  svg += "<text x=\"16\" y=\"240\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 240)\">" + opt.y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    const char* color = palette[si % 6];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((opt.log_x && !(s.x[i] > 0.0)) || (opt.log_y && !(s.y[i] > 0.0))) continue;
      if (!points.empty()) points.push_back(' ');
      points += detail::svg_num(px(s.x[i])) + "," + detail::svg_num(py(s.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = mt + 16.0 + 16.0 * static_cast<double>(si);
    svg += "<line x1=\"" + detail::svg_num(width - mr - 130) + "\" y1=\"" +
           detail::svg_num(ly - 4) + "\" x2=\"" + detail::svg_num(width - mr - 110) +
           "\" y2=\"" + detail::svg_num(ly - 4) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width - mr - 104) + "\" y=\"" + detail::svg_num(ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_svg_plot(const std::filesystem::path& path,
                           const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  write_text_atomic(path, render_svg_plot(series, opt));
}

}  // namespace toeplab
