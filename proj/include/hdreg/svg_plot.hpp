#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

namespace hdreg {

/// Static SVG line/scatter plots with no display dependency. Output is
/// deterministic: fixed ordering, fixed coordinate formatting.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::string label,
                std::string color, double width = 1.5);
  void add_scatter(const Eigen::VectorXd& x, const Eigen::VectorXd& y, std::string label,
                   std::string color, double radius = 2.5);
  /// Vertical half-width band around a line (e.g. CV mean +- std).
  void add_band(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& half_width, std::string color);
  void set_log_x(bool log_x) { log_x_ = log_x; }

  void write(const std::filesystem::path& path) const;

 private:
  struct Series {
    Eigen::VectorXd x, y, band;
    std::string label, color;
    double width = 1.5;
    enum class Kind { kLine, kScatter, kBand } kind = Kind::kLine;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool log_x_ = false;
};

}  // namespace hdreg
