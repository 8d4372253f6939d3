#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sensikit/experiments.hpp"

namespace sensikit {

/// Shortest decimal form that reads back to the same double (at most 17
/// significant digits).
std::string format_double(double v);

std::string to_csv(const ConvergenceReport& r);
std::string to_csv(const std::vector<MseReport>& reports);
std::string to_csv(const MseReport& r);
std::string to_csv(const VarianceReport& r);

/// Writes `text` to `path`; throws IoError when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

void emit_csv(const ConvergenceReport& r, const std::filesystem::path& path);
void emit_csv(const MseReport& r, const std::filesystem::path& path);
void emit_csv(const std::vector<MseReport>& r, const std::filesystem::path& path);
void emit_csv(const VarianceReport& r, const std::filesystem::path& path);

/// Minimal CSV reader: header plus rows of fields, comma separated.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct HorizontalRule {
  double y = 0.0;
  std::string color;
};

struct Box {
  std::string label;
  std::string color;
  BoxStats stats;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
  std::vector<HorizontalRule> rules;
  std::vector<Box> boxes;
  int width = 640;
  int height = 420;
};

/// Standalone SVG 1.1 document. One polyline per series.
std::string render_svg(const Plot& plot);

std::vector<Plot> plots_for(const ConvergenceReport& r, bool log_x);
std::vector<Plot> plots_for(const MseReport& r);
std::vector<Plot> plots_for(const std::vector<MseReport>& r);
std::vector<Plot> plots_for(const VarianceReport& r);

/// Writes all plots of a report into one SVG, panels stacked vertically.
/// Throws InvalidArgument on an empty report.
void emit_svg(const ConvergenceReport& r, const std::filesystem::path& path, bool log_x = true);
void emit_svg(const MseReport& r, const std::filesystem::path& path);
void emit_svg(const std::vector<MseReport>& r, const std::filesystem::path& path);
void emit_svg(const VarianceReport& r, const std::filesystem::path& path);

std::string render_panels(const std::vector<Plot>& plots);

}  // namespace sensikit
