#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dlqr::tools {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string Rgb(double s) {
  // viridis, five anchors
  static constexpr std::array<std::array<double, 3>, 5> c = {{
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int i = std::min(static_cast<int>(s), 3);
  const double f = s - i;
  char buf[24];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(c[i][0] + f * (c[i + 1][0] - c[i][0]))),
                static_cast<int>(std::lround(c[i][1] + f * (c[i + 1][1] - c[i][1]))),
                static_cast<int>(std::lround(c[i][2] + f * (c[i + 1][2] - c[i][2]))));
  return buf;
}

std::ofstream Open(const std::filesystem::path& file) {
  std::ofstream out(file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void Frame(std::ofstream& out, const std::string& title, double t0, double t1,
           double y0, double y1, const std::string& ylabel, double right) {
  const double pw = kWidth - kLeft - right, ph = kHeight - kTop - kBottom;
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double f = k / 4.0;
    const double px = kLeft + f * pw, py = kTop + ph - f * ph;
    out << "<text x=\"" << px << "\" y=\"" << kTop + ph + 16
        << "\" text-anchor=\"middle\">" << Fmt(t0 + f * (t1 - t0)) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\">" << Fmt(y0 + f * (y1 - y0)) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">t</text>\n"
      << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + ph / 2 << ")\">" << ylabel << "</text>\n";
}

}  // namespace

void WriteLinePlot(const std::filesystem::path& file, const std::string& title,
                   const std::vector<double>& t, const std::vector<Series>& series) {
  double lo = INFINITY, hi = -INFINITY;
  for (const Series& s : series) {
    for (double v : s.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  auto out = Open(file);
  Frame(out, title, t.front(), t.back(), lo, hi, series.size() == 1 ? series[0].label : "", kRight);
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t j = 0; j < series.size(); ++j) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[j % 4] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double px = kLeft + (t[k] - t.front()) / (t.back() - t.front()) * pw;
      const double py = kTop + ph - (series[j].y[k] - lo) / (hi - lo) * ph;
      out << Fmt(px) << ',' << Fmt(py) << ' ';
    }
    out << "\"/>\n";
    if (series.size() > 1) {
      out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 14 * j
          << "\" fill=\"" << colors[j % 4] << "\">" << series[j].label << "</text>\n";
    }
  }
  out << "</svg>\n";
}

void WriteHeatmap(const std::filesystem::path& file, const std::string& title,
                  const std::vector<double>& t, const Eigen::VectorXd& x,
                  const Eigen::MatrixXd& values, int max_columns) {
  const double right = 90;
  double lo = values.minCoeff(), hi = values.maxCoeff();
  if (!(hi > lo)) hi = lo + 1.0;
  auto out = Open(file);
  Frame(out, title, t.front(), t.back(), x(0), x(x.size() - 1), "x", right);
  const double pw = kWidth - kLeft - right, ph = kHeight - kTop - kBottom;
  const std::size_t nt = t.size();
  const std::size_t stride =
      std::max<std::size_t>(1, (nt + max_columns - 1) / static_cast<std::size_t>(max_columns));
  const double span_t = t.back() - t.front(), span_x = x(x.size() - 1) - x(0);
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k + 1 < nt; k += stride) cols.push_back(k);
  cols.push_back(nt - 1);
  for (std::size_t j = 0; j + 1 < cols.size(); ++j) {
    const std::size_t k = cols[j];
    const double ta = t[k], tb = t[cols[j + 1]];
    const double px = kLeft + (ta - t.front()) / span_t * pw;
    const double w = (tb - ta) / span_t * pw;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double xa = i == 0 ? x(0) : 0.5 * (x(i) + x(i - 1));
      const double xb = i + 1 == x.size() ? x(i) : 0.5 * (x(i) + x(i + 1));
      const double py = kTop + ph - (xb - x(0)) / span_x * ph;
      const double h = (xb - xa) / span_x * ph;
      out << "<rect x=\"" << Fmt(px) << "\" y=\"" << Fmt(py) << "\" width=\"" << Fmt(w + 0.3)
          << "\" height=\"" << Fmt(h + 0.3) << "\" fill=\""
          << Rgb((values(i, static_cast<Eigen::Index>(k)) - lo) / (hi - lo)) << "\"/>\n";
    }
  }
  // color bar
  const double bx = kWidth - right + 20;
  for (int s = 0; s < 50; ++s) {
    out << "<rect x=\"" << bx << "\" y=\"" << Fmt(kTop + ph - (s + 1) * ph / 50)
        << "\" width=\"16\" height=\"" << Fmt(ph / 50 + 0.3) << "\" fill=\"" << Rgb((s + 0.5) / 50)
        << "\"/>\n";
  }
  out << "<text x=\"" << bx + 20 << "\" y=\"" << kTop + 10 << "\">" << Fmt(hi) << "</text>\n"
      << "<text x=\"" << bx + 20 << "\" y=\"" << kTop + ph << "\">" << Fmt(lo) << "</text>\n"
      << "</svg>\n";
}

}  // namespace dlqr::tools
