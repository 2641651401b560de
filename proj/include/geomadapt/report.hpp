#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

namespace geomadapt {

/// Linearly interpolated percentile (q in [0, 100]) of the finite entries
/// of `values`; NaN if there are none.
double percentile(std::vector<double> values, double q);

inline constexpr std::array<double, 5> kBoxPercentiles{5.0, 25.0, 50.0, 75.0, 95.0};

struct BoxStats {
  double p5{0.0};
  double p25{0.0};
  double p50{0.0};
  double p75{0.0};
  double p95{0.0};
};

BoxStats box_stats(const std::vector<double>& values);

/// Shortest round-trip decimal form; "nan" for non-finite values.
std::string fmt(double v);

/// Line-oriented CSV writer. Comment lines go first, then the header.
/// Every failure surfaces as IoError carrying the path.
class CsvFile {
 public:
  CsvFile(const std::string& path, const std::vector<std::string>& comments, const std::string& header);
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void row(const std::vector<std::string>& cells);
  /// Flushes so a crash loses at most the current row.
  void flush();
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

void write_text_file(const std::string& path, const std::string& content);
/// Creates `dir` and parents; IoError on failure.
void ensure_directory(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

namespace svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Shaded region between `lo` and `hi`.
struct Band {
  std::string color;
  double opacity{0.2};
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct BoxSeries {
  std::string label;
  std::string color;
  std::vector<BoxStats> boxes;  // one per category
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Vertical marker lines, e.g. regime switches.
  std::vector<double> x_markers;
};

std::string line_plot(const Axes& axes, const std::vector<Series>& series, const std::vector<Band>& bands = {});
std::string box_plot(const Axes& axes, const std::vector<std::string>& categories,
                     const std::vector<BoxSeries>& series);

}  // namespace svg

}  // namespace geomadapt
