#include "geomadapt/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "geomadapt/errors.hpp"

namespace geomadapt {

double percentile(std::vector<double> values, double q) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
  return {percentile(values, 5.0), percentile(values, 25.0), percentile(values, 50.0), percentile(values, 75.0),
          percentile(values, 95.0)};
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& comments, const std::string& header)
    : path_(path), out_(path, std::ios::out | std::ios::trunc) {
  if (!out_) throw IoError(path, "cannot open for writing");
  for (const auto& c : comments) out_ << "# " << c << '\n';
  out_ << header << '\n';
  if (!out_) throw IoError(path, "write failed");
}

void CsvFile::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw IoError(path_, "write failed");
}

void CsvFile::flush() {
  out_.flush();
  if (!out_) throw IoError(path_, "flush failed");
}

void CsvFile::close() {
  out_.close();
  if (out_.fail()) throw IoError(path_, "close failed");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << content;
  out.close();
  if (out.fail()) throw IoError(path, "write failed");
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
  if (!std::filesystem::is_directory(dir)) throw IoError(dir, "not a directory");
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

namespace svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Range {
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

struct Frame {
  Range x;
  Range y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); }
};

void open_document(std::ostringstream& os, const Axes& axes) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(axes.title) << "</text>\n";
  os << "<text x=\"" << num(kLeft + (kWidth - kLeft - kRight) / 2) << "\" y=\"" << num(kHeight - 12)
     << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
  os << "<text transform=\"translate(18," << num(kTop + (kHeight - kTop - kBottom) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(axes.y_label) << "</text>\n";
}

void draw_frame(std::ostringstream& os, const Frame& f, bool x_ticks) {
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  os << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
     << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = f.y.lo + (f.y.hi - f.y.lo) * i / 5.0;
    const double y = f.py(v);
    os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y)
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
       << "</text>\n";
  }
  if (!x_ticks) return;
  for (int i = 0; i <= 5; ++i) {
    const double v = f.x.lo + (f.x.hi - f.x.lo) * i / 5.0;
    const double x = f.px(v);
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick_label(v)
       << "</text>\n";
  }
}

void draw_legend(std::ostringstream& os, const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = kTop + 10;
  const double x = kWidth - kRight + 12;
  for (const auto& [label, color] : entries) {
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\"" << color
       << "\"/>\n";
    os << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(label) << "</text>\n";
    y += 18;
  }
}

}  // namespace

std::string line_plot(const Axes& axes, const std::vector<Series>& series, const std::vector<Band>& bands) {
  Frame f;
  for (const auto& s : series) {
    for (double v : s.x) f.x.add(v);
    for (double v : s.y) f.y.add(v);
  }
  for (const auto& b : bands) {
    for (double v : b.x) f.x.add(v);
    for (double v : b.lo) f.y.add(v);
    for (double v : b.hi) f.y.add(v);
  }
  f.x.finish();
  f.y.finish();

  std::ostringstream os;
  open_document(os, axes);
  draw_frame(os, f, true);
  for (const auto& b : bands) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < b.x.size(); ++i)
      if (std::isfinite(b.hi[i])) pts << num(f.px(b.x[i])) << ',' << num(f.py(b.hi[i])) << ' ';
    for (std::size_t i = b.x.size(); i-- > 0;)
      if (std::isfinite(b.lo[i])) pts << num(f.px(b.x[i])) << ',' << num(f.py(b.lo[i])) << ' ';
    os << "<polygon points=\"" << pts.str() << "\" fill=\"" << b.color << "\" fill-opacity=\"" << num(b.opacity)
       << "\" stroke=\"none\"/>\n";
  }
  for (double m : axes.x_markers) {
    const double x = f.px(m);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(kHeight - kBottom) << "\" stroke=\"#888\" stroke-dasharray=\"4,3\"/>\n";
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (std::isfinite(s.y[i])) pts << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"/>\n";
    legend.emplace_back(s.label, s.color);
  }
  draw_legend(os, legend);
  os << "</svg>\n";
  return os.str();
}

std::string box_plot(const Axes& axes, const std::vector<std::string>& categories,
                     const std::vector<BoxSeries>& series) {
  Frame f;
  f.x.lo = 0.0;
  f.x.hi = static_cast<double>(categories.size());
  for (const auto& s : series)
    for (const auto& b : s.boxes) {
      f.y.add(b.p5);
      f.y.add(b.p95);
    }
  f.y.finish();

  std::ostringstream os;
  open_document(os, axes);
  draw_frame(os, f, false);
  const double slot = (kWidth - kLeft - kRight) / std::max<double>(1.0, static_cast<double>(categories.size()));
  const double box_w = 0.8 * slot / std::max<double>(1.0, static_cast<double>(series.size()));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double cx = kLeft + slot * (static_cast<double>(c) + 0.5);
    os << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
       << escape(categories[c]) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (c >= series[s].boxes.size()) continue;
      const BoxStats& b = series[s].boxes[c];
      if (!std::isfinite(b.p50)) continue;
      const double left = cx - 0.4 * slot + box_w * static_cast<double>(s) + 0.1 * box_w;
      const double w = 0.8 * box_w;
      const double mid = left + w / 2;
      const std::string& col = series[s].color;
      os << "<line x1=\"" << num(mid) << "\" y1=\"" << num(f.py(b.p5)) << "\" x2=\"" << num(mid) << "\" y2=\""
         << num(f.py(b.p95)) << "\" stroke=\"" << col << "\"/>\n";
      os << "<rect x=\"" << num(left) << "\" y=\"" << num(f.py(b.p75)) << "\" width=\"" << num(w)
         << "\" height=\"" << num(std::max(0.5, f.py(b.p25) - f.py(b.p75))) << "\" fill=\"" << col
         << "\" fill-opacity=\"0.35\" stroke=\"" << col << "\"/>\n";
      os << "<line x1=\"" << num(left) << "\" y1=\"" << num(f.py(b.p50)) << "\" x2=\"" << num(left + w)
         << "\" y2=\"" << num(f.py(b.p50)) << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    }
  }
  std::vector<std::pair<std::string, std::string>> legend;
  for (const auto& s : series) legend.emplace_back(s.label, s.color);
  draw_legend(os, legend);
  os << "</svg>\n";
  return os.str();
}

}  // namespace svg

}  // namespace geomadapt
