#ifndef OPTPUMP_CLI_OUTPUT_HPP
#define OPTPUMP_CLI_OUTPUT_HPP

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "optpump/error.hpp"

namespace optpump::cli {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

/// Fixed two-decimal coordinates for SVG.
inline std::string format_coord(double v) {
  if (!std::isfinite(v)) v = 0.0;
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  std::string s(buf.data(), res.ptr);
  if (s == "-0.00") s = "0.00";
  return s;
}

/// Writes to <path>.tmp and renames over <path>.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(Errc::IoError, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
};

// ---------------------------------------------------------------------------
// SVG

inline constexpr double kSvgWidth = 800.0;
inline constexpr double kSvgHeight = 600.0;

/// Heatmap gradient, low to high.
inline constexpr std::array<std::array<int, 3>, 5> kGradient{{
    {{0x0d, 0x08, 0x87}},  // #0d0887
    {{0x7e, 0x03, 0xa8}},  // #7e03a8
    {{0xcc, 0x47, 0x78}},  // #cc4778
    {{0xf8, 0x95, 0x40}},  // #f89540
    {{0xf0, 0xf9, 0x21}},  // #f0f921
}};

inline std::string hex_color(int r, int g, int b) {
  static const char* digits = "0123456789abcdef";
  std::string s = "#";
  for (int c : {r, g, b}) {
    s += digits[(c >> 4) & 0xf];
    s += digits[c & 0xf];
  }
  return s;
}

/// Color for t in [0, 1], piecewise linear between the gradient stops.
inline std::string gradient_color(double t) {
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  int c[3];
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<int>(std::lround(kGradient[i][k] + f * (kGradient[i + 1][k] - kGradient[i][k])));
  return hex_color(c[0], c[1], c[2]);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Axis-mapped plot area with a fixed 800x600 viewBox.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void set_range(double x0, double x1, double y0, double y1) {
    auto widen = [](double& a, double& b) {
      if (!std::isfinite(a) || !std::isfinite(b)) {
        a = 0.0;
        b = 1.0;
      }
      if (b <= a) {
        const double pad = std::max(1e-12, std::abs(a) * 0.05 + 0.5);
        a -= pad;
        b += pad;
      }
    };
    widen(x0, x1);
    widen(y0, y1);
    x0_ = x0;
    x1_ = x1;
    y0_ = y0;
    y1_ = y1;
  }

  double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * (kRight - kLeft); }
  double py(double y) const { return kBottom - (y - y0_) / (y1_ - y0_) * (kBottom - kTop); }

  void circle(double x, double y, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + format_coord(px(x)) + "\" cy=\"" + format_coord(py(y)) + "\" r=\"" + format_coord(r) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& stroke,
                double width = 2.0) {
    std::string pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += format_coord(px(xs[i])) + "," + format_coord(py(ys[i]));
    }
    body_ += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             format_coord(width) + "\"/>\n";
  }

  /// Cell centred on (x, y) with data-space size (w, h).
  void cell(double x, double y, double w, double h, const std::string& fill) {
    const double xa = px(x - 0.5 * w), xb = px(x + 0.5 * w);
    const double ya = py(y + 0.5 * h), yb = py(y - 0.5 * h);
    body_ += "<rect x=\"" + format_coord(xa) + "\" y=\"" + format_coord(ya) + "\" width=\"" + format_coord(xb - xa) +
             "\" height=\"" + format_coord(yb - ya) + "\" fill=\"" + fill + "\"/>\n";
  }

  void legend(const std::string& label, const std::string& color) {
    const double y = kTop + 16.0 * static_cast<double>(legend_count_++);
    body_ += "<rect x=\"" + format_coord(kRight - 150.0) + "\" y=\"" + format_coord(y) +
             "\" width=\"10.00\" height=\"10.00\" fill=\"" + color + "\"/>\n";
    body_ += "<text x=\"" + format_coord(kRight - 135.0) + "\" y=\"" + format_coord(y + 9.0) +
             "\" font-size=\"12\">" + xml_escape(label) + "</text>\n";
  }

  /// Vertical color bar for heatmaps, labelled with the value range.
  void colorbar(double lo, double hi) {
    colorbar_ = true;
    cb_lo_ = lo;
    cb_hi_ = hi;
  }

  std::string str() const {
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" width=\"800\" height=\"600\">\n";
    s += "<defs><linearGradient id=\"heat\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">";
    for (std::size_t i = 0; i < kGradient.size(); ++i)
      s += "<stop offset=\"" + format_coord(static_cast<double>(i) / 4.0) + "\" stop-color=\"" +
           hex_color(kGradient[i][0], kGradient[i][1], kGradient[i][2]) + "\"/>";
    s += "</linearGradient></defs>\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    s += "<text x=\"400.00\" y=\"30.00\" font-size=\"16\" text-anchor=\"middle\">" + xml_escape(title_) + "</text>\n";
    s += body_;
    s += "<rect x=\"" + format_coord(kLeft) + "\" y=\"" + format_coord(kTop) + "\" width=\"" +
         format_coord(kRight - kLeft) + "\" height=\"" + format_coord(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#000000\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
      s += "<text x=\"" + format_coord(x) + "\" y=\"" + format_coord(y) + "\" font-size=\"12\" text-anchor=\"" + anchor +
           "\">" + xml_escape(text) + "</text>\n";
    };
    label(kLeft, kBottom + 18.0, tick(x0_), "middle");
    label(kRight, kBottom + 18.0, tick(x1_), "middle");
    label(kLeft - 6.0, kBottom + 4.0, tick(y0_), "end");
    label(kLeft - 6.0, kTop + 4.0, tick(y1_), "end");
    label(0.5 * (kLeft + kRight), kBottom + 40.0, xlabel_, "middle");
    s += "<text x=\"20.00\" y=\"" + format_coord(0.5 * (kTop + kBottom)) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 20.00 " +
         format_coord(0.5 * (kTop + kBottom)) + ")\">" + xml_escape(ylabel_) + "</text>\n";
    if (colorbar_) {
      s += "<rect x=\"" + format_coord(kRight + 20.0) + "\" y=\"" + format_coord(kTop) + "\" width=\"20.00\" height=\"" +
           format_coord(kBottom - kTop) + "\" fill=\"url(#heat)\" stroke=\"#000000\"/>\n";
      label(kRight + 45.0, kTop + 4.0, tick(cb_hi_), "start");
      label(kRight + 45.0, kBottom + 4.0, tick(cb_lo_), "start");
    }
    s += "</svg>\n";
    return s;
  }

 private:
  static constexpr double kLeft = 90.0;
  static constexpr double kRight = 700.0;
  static constexpr double kTop = 60.0;
  static constexpr double kBottom = 520.0;

  static std::string tick(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 4);
    return std::string(buf.data(), res.ptr);
  }

  std::string title_, xlabel_, ylabel_;
  std::string body_;
  double x0_ = 0.0, x1_ = 1.0, y0_ = 0.0, y1_ = 1.0;
  int legend_count_ = 0;
  bool colorbar_ = false;
  double cb_lo_ = 0.0, cb_hi_ = 1.0;
};

}  // namespace optpump::cli

#endif  // OPTPUMP_CLI_OUTPUT_HPP
