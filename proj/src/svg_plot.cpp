#include "hdreg/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "hdreg/types.hpp"

namespace hdreg {

namespace {

constexpr double kWidth = 860, kHeight = 540;
constexpr double kLeft = 80, kRight = 30, kTop = 46, kBottom = 64;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  char buf[40];
  if (a >= 1e5 || a < 1e-3)
    std::snprintf(buf, sizeof buf, "%.2e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double nice_step(double span, int target) {
  const double raw = span / std::max(target, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  else step = 10.0;
  return step * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::string label,
                       std::string color, double width) {
  if (x.size() != y.size()) throw InputError("SvgPlot: x/y length mismatch");
  series_.push_back({x, y, {}, std::move(label), std::move(color), width, Series::Kind::kLine});
}

void SvgPlot::add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          std::string label, std::string color, double radius) {
  if (x.size() != y.size()) throw InputError("SvgPlot: x/y length mismatch");
  series_.push_back(
      {x, y, {}, std::move(label), std::move(color), radius, Series::Kind::kScatter});
}

void SvgPlot::add_band(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& half_width, std::string color) {
  if (x.size() != y.size() || x.size() != half_width.size())
    throw InputError("SvgPlot: band length mismatch");
  series_.push_back({x, y, half_width, "", std::move(color), 0.0, Series::Kind::kBand});
}

void SvgPlot::write(const std::filesystem::path& path) const {
  if (series_.empty()) throw InputError("SvgPlot: nothing to draw");

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : series_) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      const double xv = log_x_ ? std::log10(s.x[i]) : s.x[i];
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      const double lo = s.y[i] - (s.kind == Series::Kind::kBand ? s.band[i] : 0.0);
      const double hi = s.y[i] + (s.kind == Series::Kind::kBand ? s.band[i] : 0.0);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
  }
  if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
  if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double v) { return kTop + (ymax - v) / (ymax - ymin) * plot_h; };
  auto tx = [&](double v) { return log_x_ ? std::log10(v) : v; };

  std::ofstream out(path);
  if (!out) throw InputError("SvgPlot: cannot write " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes and ticks
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title_) << "</text>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\">" << escape(x_label_) << "</text>\n";
  out << "<text x=\"20\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << kTop + plot_h / 2 << ")\">"
      << escape(y_label_) << "</text>\n";

  const double xstep = nice_step(xmax - xmin, 7);
  for (double v = std::ceil(xmin / xstep) * xstep; v <= xmax + 1e-12 * xstep; v += xstep) {
    const double gx = px(v);
    out << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(gx)
        << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"#dddddd\"/>\n";
    const std::string lbl = log_x_ ? "1e" + fmt_tick(v) : fmt_tick(v);
    out << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\">" << lbl << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin, 6);
  for (double v = std::ceil(ymin / ystep) * ystep; v <= ymax + 1e-12 * ystep; v += ystep) {
    const double gy = py(v);
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(gy) << "\" x2=\""
        << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(gy) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(gy + 4)
        << "\" text-anchor=\"end\">" << fmt_tick(v) << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "</g>\n";

  for (const Series& s : series_) {
    if (s.kind == Series::Kind::kBand) {
      out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
      for (Eigen::Index i = 0; i < s.x.size(); ++i)
        out << fmt(px(tx(s.x[i]))) << "," << fmt(py(s.y[i] + s.band[i])) << " ";
      for (Eigen::Index i = s.x.size(); i-- > 0;)
        out << fmt(px(tx(s.x[i]))) << "," << fmt(py(s.y[i] - s.band[i])) << " ";
      out << "\"/>\n";
    } else if (s.kind == Series::Kind::kLine) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.width
          << "\" points=\"";
      for (Eigen::Index i = 0; i < s.x.size(); ++i)
        out << fmt(px(tx(s.x[i]))) << "," << fmt(py(s.y[i])) << " ";
      out << "\"/>\n";
    } else {
      out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.7\">\n";
      for (Eigen::Index i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << fmt(px(tx(s.x[i]))) << "\" cy=\"" << fmt(py(s.y[i]))
            << "\" r=\"" << s.width << "\"/>\n";
      out << "</g>\n";
    }
  }

  // legend
  double ly = kTop + 14;
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << fmt(kLeft + plot_w - 150) << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << fmt(kLeft + plot_w - 126) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << fmt(kLeft + plot_w - 120) << "\" y=\"" << fmt(ly) << "\">"
        << escape(s.label) << "</text>\n";
    ly += 17;
  }
  out << "</g>\n</svg>\n";
}

}  // namespace hdreg
