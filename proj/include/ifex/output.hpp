#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <string>
#include <vector>

#include "ifex/geometry.hpp"

namespace ifex {

// Fixed shortest-roundtrip formatting keeps reruns byte-identical.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// Curve snapshot: control points followed by a dense polyline, per curve.
std::string curves_csv(const std::vector<SplineCurve>& curves, int samples = 512);

struct SvgCurve {
  std::vector<Vec2> points;
  std::string color = "#1f6fb4";
  bool dashed = false;
  double width = 0.01;
};

std::string curves_svg(const std::vector<SvgCurve>& curves, int pixels = 640);

// Coordinate-format (row, col, value) dump for debugging.
std::string matrix_coordinate_dump(const Eigen::SparseMatrix<double>& a);

}  // namespace ifex
