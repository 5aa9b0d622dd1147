#ifndef SIGMA_SVG_HPP_
#define SIGMA_SVG_HPP_

// Deterministic SVG emission: fixed canvas, fixed numeric formatting, no
// timestamps, so identical inputs produce byte-identical files.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sigma/sampler.hpp"

namespace sigma {
namespace svg {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMargin = 50;

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

class Canvas {
 public:
  Canvas(double x_min, double x_max, double y_min, double y_max)
      : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
          << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
          << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  }

  double px(double x) const {
    return kMargin + (x - x_min_) / (x_max_ - x_min_) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y_min_) / (y_max_ - y_min_) * (kHeight - 2 * kMargin);
  }

  void axes(const std::string& x_label, const std::string& y_label) {
    body_ << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
          << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
          << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
          << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
          << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n"
          << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
          << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << "</text>\n"
          << "<text x=\"14\" y=\"" << kHeight / 2 << "\" font-size=\"13\" text-anchor=\"middle\""
          << " transform=\"rotate(-90 14 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
  }

  void title(const std::string& text) {
    body_ << "<text x=\"" << kWidth / 2
          << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" << text << "</text>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double width = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
          << "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      body_ << fmt(px(xs[i])) << "," << fmt(py(ys[i])) << " ";
    body_ << "\"/>\n";
  }

  void bar(double x0, double x1, double height, const std::string& color) {
    double left = px(x0), right = px(x1);
    double top = py(height), bottom = py(0);
    body_ << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\""
          << fmt(right - left) << "\" height=\"" << fmt(bottom - top) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
  }

  void point(double x, double y, const std::string& color, double r = 2.0) {
    body_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << r
          << "\" fill=\"" << color << "\"/>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

 private:
  double x_min_, x_max_, y_min_, y_max_;
  std::ostringstream body_;
};

}  // namespace svg

/// Histogram of block-mean samples overlaid with the IG(1, eps) density.
inline std::string ig_overlay_svg(std::vector<double> samples, double eps, int bins = 60) {
  std::sort(samples.begin(), samples.end());
  double lo = 0.0;
  double hi = samples[static_cast<std::size_t>(0.995 * (samples.size() - 1))] * 1.2;
  hi = std::max(hi, 1.5);
  std::vector<double> counts(bins, 0.0);
  for (double s : samples) {
    int b = static_cast<int>((s - lo) / (hi - lo) * bins);
    if (b >= 0 && b < bins) counts[b] += 1.0;
  }
  double bw = (hi - lo) / bins;
  double y_max = 0;
  for (double& c : counts) {
    c /= samples.size() * bw;  // density normalization
    y_max = std::max(y_max, c);
  }
  for (int b = 0; b < 200; ++b) {
    double t = lo + (b + 0.5) * (hi - lo) / 200;
    if (t > 0) y_max = std::max(y_max, inverse_gaussian_pdf(eps, t));
  }

  svg::Canvas c(lo, hi, 0, y_max * 1.08);
  c.title("block mean of e^u vs IG(1," + svg::fmt(eps) + ")");
  c.axes("t", "density");
  for (int b = 0; b < bins; ++b) c.bar(lo + b * bw, lo + (b + 1) * bw, counts[b], "steelblue");
  std::vector<double> xs, ys;
  for (int b = 1; b <= 400; ++b) {
    double t = lo + b * (hi - lo) / 400;
    xs.push_back(t);
    ys.push_back(inverse_gaussian_pdf(eps, t));
  }
  c.polyline(xs, ys, "crimson", 2.0);
  return c.finish();
}

/// Tail curve P(|gap| >= M) as a function of M, one curve per label.
inline std::string tail_curve_svg(const std::vector<std::string>& labels,
                                  const std::vector<std::vector<double>>& gap_samples,
                                  double m_max, double threshold_m) {
  svg::Canvas c(0, m_max, 0, 1.0);
  c.title("exceedance probability vs threshold");
  c.axes("M", "P(|u_p - u_q| &#8805; M)");
  static const char* colors[] = {"steelblue", "crimson", "seagreen", "darkorange", "purple",
                                 "teal"};
  for (std::size_t k = 0; k < gap_samples.size(); ++k) {
    std::vector<double> sorted = gap_samples[k];
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> xs, ys;
    for (int b = 0; b <= 100; ++b) {
      double m = b * m_max / 100;
      auto it = std::lower_bound(sorted.begin(), sorted.end(), m);
      xs.push_back(m);
      ys.push_back(static_cast<double>(sorted.end() - it) / sorted.size());
    }
    c.polyline(xs, ys, colors[k % 6]);
    (void)labels;
  }
  c.polyline({threshold_m, threshold_m}, {0.0, 1.0}, "black", 1.0);
  return c.finish();
}

/// QQ plot between two samples, with the diagonal for reference.
inline std::string qq_plot_svg(std::vector<double> a, std::vector<double> b,
                               const std::string& title) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const int points = 200;
  std::vector<double> qa, qb;
  for (int k = 0; k < points; ++k) {
    double p = (k + 0.5) / points;
    qa.push_back(a[static_cast<std::size_t>(p * (a.size() - 1))]);
    qb.push_back(b[static_cast<std::size_t>(p * (b.size() - 1))]);
  }
  double lo = std::min(qa.front(), qb.front());
  double hi = std::max(qa.back(), qb.back());
  double pad = 0.05 * (hi - lo);
  svg::Canvas c(lo - pad, hi + pad, lo - pad, hi + pad);
  c.title(title);
  c.axes("full model quantiles", "effective model quantiles");
  c.polyline({lo, hi}, {lo, hi}, "gray", 1.0);
  for (int k = 0; k < points; ++k) c.point(qa[k], qb[k], "steelblue");
  return c.finish();
}

}  // namespace sigma

#endif  // SIGMA_SVG_HPP_
