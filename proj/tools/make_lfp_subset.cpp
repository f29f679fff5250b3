// Generates the battery discharge-curve subset shipped under data/lfp/.
//
// The real cell data cannot be redistributed, so the shipped files are
// deterministic synthetic stand-ins with the same schema: discharge-capacity
// difference curves over a 1000-point decreasing voltage grid (3.5 V down to
// 2.0 V), one training split of 41 cells and two test splits of 42 and 40
// cells, and an integer cycle-life response. Curve magnitude anti-correlates
// with cycle life, the high-voltage region carries almost no cell-to-cell
// signal (low SNR after z-scoring), and the low/high cycle-life counts per
// split are 39/2, 39/3 and 34/6.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "hdreg/csv.hpp"
#include "hdreg/rng.hpp"
#include "hdreg/types.hpp"

namespace {

struct SplitSpec {
  std::string name;
  int low_count;
  int high_count;
  std::uint64_t stream;
};

Eigen::VectorXd bump(const Eigen::VectorXd& v, double center, double width) {
  return (-0.5 * ((v.array() - center) / width).square()).exp();
}

hdreg::Dataset make_split(const SplitSpec& spec, std::uint64_t seed) {
  const Eigen::Index p = 1000;
  Eigen::VectorXd v(p);
  for (Eigen::Index j = 0; j < p; ++j)
    v[j] = 3.5 - 1.5 * static_cast<double>(j) / (p - 1);

  const Eigen::VectorXd phi_main = bump(v, 3.0, 0.12) + 0.55 * bump(v, 3.15, 0.06);
  const Eigen::VectorXd phi_mid = bump(v, 2.4, 0.10);
  const Eigen::VectorXd phi_low = bump(v, 2.05, 0.08) + 0.4 * bump(v, 2.2, 0.12);
  const Eigen::VectorXd phi_tail = 0.02 * bump(v, 3.38, 0.05);

  const int n = spec.low_count + spec.high_count;
  hdreg::Philox4x32 cl_rng(seed, spec.stream);
  hdreg::Philox4x32 shape_rng(seed, spec.stream + 8);
  hdreg::Philox4x32 noise_rng(seed, spec.stream + 16);

  // log10 cycle life: low-CL cells below log10(1200), high-CL cells above
  std::vector<double> logcl;
  const double log_low_cap = std::log10(1200.0);
  for (int i = 0; i < spec.low_count; ++i) {
    double value = 2.88 + 0.13 * cl_rng.next_normal();
    value = std::clamp(value, 2.45, log_low_cap - 0.005);
    logcl.push_back(value);
  }
  for (int i = 0; i < spec.high_count; ++i)
    logcl.push_back(std::log10(1300.0) + (std::log10(2300.0) - std::log10(1300.0)) *
                                             cl_rng.next_double());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  hdreg::shuffle(order, cl_rng);

  hdreg::Dataset d;
  d.x.resize(n, p);
  d.y.resize(n);
  d.domain = v;
  for (int row = 0; row < n; ++row) {
    const double lc = logcl[order[row]];
    d.y[row] = std::round(std::pow(10.0, lc));
    const double magnitude = std::pow(10.0, 2.2 - 1.1 * lc + 0.05 * shape_rng.next_normal());
    const double w_mid = 1.0 + 0.25 * shape_rng.next_normal();
    const double w_low = 1.0 + 0.20 * shape_rng.next_normal();
    const double w_tail = 1.0 + 0.50 * shape_rng.next_normal();
    Eigen::VectorXd curve =
        phi_main + 0.45 * w_mid * phi_mid + 0.5 * w_low * phi_low + w_tail * phi_tail;
    d.x.row(row) = -magnitude * curve.transpose();
    for (Eigen::Index j = 0; j < p; ++j) d.x(row, j) += 1.2e-4 * noise_rng.next_normal();
    char id[32];
    std::snprintf(id, sizeof id, "%s_%02d", spec.name.c_str(), row);
    d.sample_ids.push_back(id);
  }
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic battery subset shipped with the repo"};
  std::string out_dir = "data/lfp";
  std::uint64_t seed = 7;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  const std::vector<SplitSpec> splits = {
      {"train", 39, 2, 100},
      {"test1", 39, 3, 200},
      {"test2", 34, 6, 300},
  };
  std::filesystem::create_directories(out_dir);
  for (const SplitSpec& spec : splits) {
    hdreg::Dataset d = make_split(spec, seed);
    const std::filesystem::path base = std::filesystem::path(out_dir);
    hdreg::save_csv(d, base / ("lfp_" + spec.name + "_dq.csv"));
    hdreg::save_response_csv(d, base / ("lfp_" + spec.name + "_cycle_life.csv"),
                             "cycle_life");
    std::cout << spec.name << ": " << d.n() << " cells x " << d.p() << " columns, cycle life "
              << d.y.minCoeff() << ".." << d.y.maxCoeff() << "\n";
  }
  return 0;
}
