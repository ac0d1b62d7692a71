#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace subfp {

using Json = nlohmann::json;

/// %.17g; inf/nan spelled as in C (inf, -inf, nan).
std::string format_double(double x);

/// RFC-4180 field quoting (only when needed).
std::string csv_field(const std::string& s);

/// CSV with a header row and numeric rows, CRLF line endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Reads a numeric CSV written by write_csv (header skipped).
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          std::vector<std::string>* header = nullptr);

/// Non-finite doubles become strings so the output stays valid JSON.
Json json_number(double x);

/// Pretty-printed, keys sorted, trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

/// Minimal SVG line chart; non-finite points are dropped.
std::string svg_line_plot(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace subfp
