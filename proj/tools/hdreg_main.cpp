#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hdreg/csv.hpp"
#include "hdreg/runner.hpp"

namespace {

struct CommonOpts {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config, "run configuration (JSON)")->required();
  cmd->add_option("--out", opts.out, "output directory (overrides config and HDREG_OUT_DIR)");
  cmd->add_option("--seed", opts.seed, "seed override");
  cmd->add_option("--scheme", opts.scheme, "preprocessing scheme override")
      ->check(CLI::IsMember({"center", "zscore"}));
}

hdreg::RunConfig resolve(const CommonOpts& opts) {
  hdreg::RunConfig cfg = hdreg::load_config(opts.config);
  if (const char* env = std::getenv("HDREG_OUT_DIR")) cfg.out_dir = env;
  if (!opts.out.empty()) cfg.out_dir = opts.out;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.scheme)
    cfg.scheme = *opts.scheme == "zscore" ? hdreg::Scheme::kZScore
                                          : hdreg::Scheme::kCenterOnly;
  return cfg;
}

int fail(const std::string& type, const std::string& message) {
  nlohmann::json err{{"error", message}, {"type", type}};
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-dimensional linear regression with nullspace diagnostics"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* cmd_fit = app.add_subcommand("fit", "fit the configured estimators");
  CLI::App* cmd_cv = app.add_subcommand("cv", "cross-validate hyperparameter grids");
  CLI::App* cmd_null = app.add_subcommand("nullspace", "nullspace comparison of two models");
  CLI::App* cmd_snr = app.add_subcommand("snr", "spline-based per-column SNR profile");
  CLI::App* cmd_synth = app.add_subcommand("synth", "generate and archive a synthetic dataset");
  CLI::App* cmd_report = app.add_subcommand("report", "fit and evaluate across splits");
  for (CLI::App* c : {cmd_fit, cmd_cv, cmd_null, cmd_snr, cmd_synth, cmd_report})
    add_common(c, opts);

  CLI::App* cmd_convert =
      app.add_subcommand("convert", "reshape a foreign numeric CSV into the canonical layout");
  std::string conv_in, conv_out, conv_domain;
  bool conv_transpose = false;
  cmd_convert->add_option("--in", conv_in, "input CSV (plain numeric grid, no ids)")->required();
  cmd_convert->add_option("--out-file", conv_out, "output CSV path")->required();
  cmd_convert->add_option("--domain-file", conv_domain,
                          "single-column CSV with the domain grid");
  cmd_convert->add_flag("--transpose", conv_transpose, "transpose rows and columns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_convert->parsed()) {
      std::ifstream in(conv_in);
      if (!in) return fail("input", "cannot open " + conv_in);
      std::vector<std::vector<double>> rows;
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
          return fail("input", "ragged row at line " + std::to_string(lineno));
        rows.push_back(std::move(row));
      }
      if (rows.empty()) return fail("input", "no data in " + conv_in);
      Eigen::MatrixXd x(rows.size(), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) x(i, j) = rows[i][j];
      if (conv_transpose) x.transposeInPlace();
      hdreg::Dataset d;
      d.x = std::move(x);
      for (Eigen::Index i = 0; i < d.n(); ++i) d.sample_ids.push_back("s" + std::to_string(i));
      if (!conv_domain.empty()) {
        std::ifstream din(conv_domain);
        if (!din) return fail("input", "cannot open " + conv_domain);
        std::vector<double> grid;
        while (std::getline(din, line)) {
          if (line.empty()) continue;
          try {
            grid.push_back(std::stod(line));
          } catch (const std::exception&) {
            continue;  // header
          }
        }
        if (static_cast<Eigen::Index>(grid.size()) != d.p())
          return fail("input", "domain length does not match column count");
        d.domain = Eigen::Map<Eigen::VectorXd>(grid.data(), grid.size());
      }
      hdreg::save_csv(d, conv_out);
      return 0;
    }

    hdreg::RunConfig cfg = resolve(opts);
    hdreg::RunStages stages;
    if (cmd_fit->parsed()) {
      stages.nullspace = stages.evaluate = stages.snr = false;
    } else if (cmd_cv->parsed()) {
      stages.nullspace = stages.evaluate = stages.snr = false;
    } else if (cmd_null->parsed()) {
      stages.evaluate = stages.snr = false;
      if (!cfg.nullspace) return fail("config", "nullspace verb needs a 'nullspace' section");
    } else if (cmd_snr->parsed()) {
      stages.fit = stages.nullspace = stages.evaluate = false;
      if (!cfg.snr) cfg.snr = hdreg::SnrConfig{};
    } else if (cmd_synth->parsed()) {
      stages = hdreg::RunStages{false, false, false, false, false, true};
    } else if (cmd_report->parsed()) {
      stages.nullspace = stages.snr = false;
      if (!cfg.evaluate) return fail("config", "report verb needs an 'evaluate' section");
    }
    hdreg::run(cfg, stages);
    return 0;
  } catch (const hdreg::ConfigError& e) {
    return fail("config", e.what());
  } catch (const hdreg::InputError& e) {
    return fail("input", e.what());
  } catch (const hdreg::NumericError& e) {
    return fail("numeric", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
