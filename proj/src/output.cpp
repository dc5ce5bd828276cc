#include "ifex/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ifex {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string curves_csv(const std::vector<SplineCurve>& curves, int samples) {
  std::ostringstream os;
  os << "curve,kind,x,y\n";
  for (size_t c = 0; c < curves.size(); ++c) {
    for (const Vec2& p : curves[c].control_points())
      os << c << ",ctrl," << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
    for (int k = 0; k <= samples; ++k) {
      double t = static_cast<double>(k) / samples;
      if (curves[c].closed() && k == samples) t = 0.0;
      const Vec2 p = curves[c].eval(t);
      os << c << ",pt," << format_double(p.x()) << ',' << format_double(p.y()) << '\n';
    }
  }
  return os.str();
}

std::string curves_svg(const std::vector<SvgCurve>& curves, int pixels) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
     << pixels << "\" viewBox=\"-1.05 -1.05 2.1 2.1\">\n";
  os << "<rect x=\"-1\" y=\"-1\" width=\"2\" height=\"2\" fill=\"white\" stroke=\"#888\" "
        "stroke-width=\"0.005\"/>\n";
  for (const SvgCurve& c : curves) {
    os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"" << c.width
       << '"';
    if (c.dashed) os << " stroke-dasharray=\"0.04,0.03\"";
    os << " points=\"";
    for (size_t i = 0; i < c.points.size(); ++i) {
      if (i) os << ' ';
      // svg y axis points down
      os << format_double(c.points[i].x()) << ',' << format_double(-c.points[i].y());
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string matrix_coordinate_dump(const Eigen::SparseMatrix<double>& a) {
  std::ostringstream os;
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
  return os.str();
}

}  // namespace ifex
