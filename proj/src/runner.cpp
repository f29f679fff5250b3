#include "hdreg/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>

#include "hdreg/csv.hpp"
#include "hdreg/estimators.hpp"
#include "hdreg/preprocess.hpp"
#include "hdreg/svd.hpp"
#include "hdreg/svg_plot.hpp"

namespace hdreg {

namespace {

using nlohmann::json;

Method parse_method(const std::string& s) {
  if (s == "min_norm") return Method::kMinNorm;
  if (s == "ridge") return Method::kRidge;
  if (s == "pcr") return Method::kPcr;
  if (s == "pls") return Method::kPls;
  if (s == "fused_lasso") return Method::kFusedLasso;
  throw ConfigError("unknown method '" + s + "'");
}

NoiseConvention parse_convention(const json& j) {
  NoiseConvention conv;
  conv.decibel = j.value("decibel", true);
  conv.mean_removed = j.value("mean_removed", false);
  return conv;
}

CvConfig parse_cv(const json& j) {
  CvConfig cv;
  cv.folds = j.value("folds", 5);
  cv.seed = j.value("seed", std::uint64_t{0});
  const std::string rule = j.value("rule", "one-se");
  if (rule == "min")
    cv.rule = CvRule::kMin;
  else if (rule == "one-se")
    cv.rule = CvRule::kOneSe;
  else
    throw ConfigError("cv rule must be 'min' or 'one-se'");
  return cv;
}

double parse_snr_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (j[key].is_string()) {
    if (j[key] == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string(key) + ": expected a number or \"inf\"");
  }
  return j[key].get<double>();
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }

  RunConfig cfg;
  cfg.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  const std::string scheme = j.value("scheme", "center");
  if (scheme == "center")
    cfg.scheme = Scheme::kCenterOnly;
  else if (scheme == "zscore")
    cfg.scheme = Scheme::kZScore;
  else
    throw ConfigError("scheme must be 'center' or 'zscore'");

  if (!j.contains("dataset")) throw ConfigError("config needs a 'dataset' section");
  const json& jd = j["dataset"];
  int sources = 0;
  if (jd.contains("csv")) {
    cfg.dataset.csv = jd["csv"].get<std::string>();
    ++sources;
  }
  if (jd.contains("parabolic")) {
    const json& jp = jd["parabolic"];
    ParabolicSpec spec;
    spec.n = jp.value("n", 50);
    spec.domain_start = jp.value("domain_start", 1.0);
    spec.domain_step = jp.value("domain_step", 0.01);
    spec.domain_end = jp.value("domain_end", 3.0);
    spec.mu = jp.value("mu", 0.3);
    spec.sigma = jp.value("sigma", 0.3);
    spec.snr_x = parse_snr_field(jp, "snr_x", 50.0);
    spec.snr_y = parse_snr_field(jp, "snr_y", 50.0);
    spec.convention = parse_convention(jp);
    spec.seed = jp.value("seed", std::uint64_t{0});
    cfg.dataset.parabolic = spec;
    ++sources;
  }
  if (sources != 1) throw ConfigError("dataset needs exactly one source (csv or parabolic)");
  if (jd.contains("response_csv"))
    cfg.dataset.response_csv = jd["response_csv"].get<std::string>();
  if (jd.contains("synthetic_response")) {
    const json& jr = jd["synthetic_response"];
    SyntheticResponseSpec spec;
    const std::string kind = jr.value("kind", "constant");
    if (kind == "constant")
      spec.kind = ResponseKind::kConstant;
    else if (kind == "column_mean")
      spec.kind = ResponseKind::kColumnMean;
    else
      throw ConfigError("synthetic_response kind must be 'constant' or 'column_mean'");
    spec.snr_y = parse_snr_field(jr, "snr_y", 50.0);
    spec.convention = parse_convention(jr);
    spec.seed = jr.value("seed", std::uint64_t{0});
    cfg.dataset.synthetic_response = spec;
  }
  const std::string transform = jd.value("response_transform", "none");
  if (transform == "log10")
    cfg.dataset.response_transform = ResponseTransform::kLog10;
  else if (transform != "none")
    throw ConfigError("response_transform must be 'none' or 'log10'");

  if (j.contains("estimators") && j["estimators"].empty())
    throw ConfigError("estimator list is empty");
  std::set<std::string> ids;
  for (const json& je : j.value("estimators", json::array())) {
    EstimatorConfig e;
    e.method = parse_method(je.at("method").get<std::string>());
    e.id = je.value("id", std::string(to_string(e.method)));
    if (!ids.insert(e.id).second) throw ConfigError("duplicate estimator id '" + e.id + "'");
    if (je.contains("lambda")) e.lambda = je["lambda"].get<double>();
    if (je.contains("components")) e.components = je["components"].get<int>();
    if (je.contains("penalty")) {
      const std::string p = je["penalty"].get<std::string>();
      if (p == "identity")
        e.penalty = PenaltyKind::kIdentity;
      else if (p == "first_difference")
        e.penalty = PenaltyKind::kFirstDifference;
      else
        throw ConfigError("penalty must be 'identity' or 'first_difference'");
    }
    if (je.contains("grid") && je["grid"].is_array())
      e.grid = je["grid"].get<std::vector<double>>();
    if (je.contains("cv")) e.cv = parse_cv(je["cv"]);
    if (je.contains("fuse")) e.fuse = je["fuse"].get<bool>();
    if (je.contains("solver")) {
      const json& js = je["solver"];
      e.genlasso.eps_abs = js.value("eps_abs", e.genlasso.eps_abs);
      e.genlasso.eps_rel = js.value("eps_rel", e.genlasso.eps_rel);
      e.genlasso.max_iterations = js.value("max_iterations", e.genlasso.max_iterations);
      e.genlasso.rho = js.value("rho", e.genlasso.rho);
    }
    const bool has_hyper = e.lambda || e.components;
    const bool needs_hyper = e.method != Method::kMinNorm;
    if (needs_hyper && !has_hyper && !e.cv)
      throw ConfigError("estimator '" + e.id + "' needs a fixed hyperparameter or cv");
    cfg.estimators.push_back(std::move(e));
  }

  if (j.contains("nullspace")) {
    const json& jn = j["nullspace"];
    NullspaceRequest req;
    req.beta_a_id = jn.at("beta_a").get<std::string>();
    if (!ids.count(req.beta_a_id))
      throw ConfigError("nullspace beta_a references unknown model '" + req.beta_a_id + "'");
    const json& jb = jn.at("beta_b");
    if (jb.is_string()) {
      const std::string s = jb.get<std::string>();
      if (s == "true")
        req.beta_b = BetaTrue{};
      else if (ids.count(s))
        req.beta_b = BetaModel{s};
      else
        throw ConfigError("nullspace beta_b references unknown model '" + s + "'");
    } else if (jb.contains("constant")) {
      req.beta_b = BetaConstant{jb["constant"].get<double>()};
    } else if (jb.contains("file")) {
      req.beta_b = BetaFile{std::filesystem::path(jb["file"].get<std::string>())};
    } else {
      throw ConfigError("nullspace beta_b must be 'true', a model id, {constant}, or {file}");
    }
    if (jn.contains("c")) req.c = jn["c"].get<double>();
    if (jn.contains("gamma")) req.gamma = jn["gamma"].get<double>();
    if (!req.c && !req.gamma)
      throw ConfigError("nullspace needs either 'c' (search) or 'gamma' (fixed)");
    req.search.grid_points = jn.value("grid_points", req.search.grid_points);
    req.search.grid_min = jn.value("grid_min", req.search.grid_min);
    req.search.grid_max = jn.value("grid_max", req.search.grid_max);
    cfg.nullspace = req;
  }

  if (j.contains("evaluate")) {
    const json& je = j["evaluate"];
    EvaluateConfig ev;
    for (const json& js : je.value("splits", json::array())) {
      SplitConfig sc;
      sc.name = js.at("name").get<std::string>();
      sc.csv = std::filesystem::path(js.at("csv").get<std::string>());
      sc.response_csv = std::filesystem::path(js.at("response_csv").get<std::string>());
      ev.splits.push_back(std::move(sc));
    }
    for (const json& js : je.value("subsets", json::array())) {
      SubsetRule rule;
      rule.name = js.at("name").get<std::string>();
      if (js.contains("lower")) rule.lower = js["lower"].get<double>();
      if (js.contains("upper")) rule.upper = js["upper"].get<double>();
      ev.subsets.push_back(std::move(rule));
    }
    cfg.evaluate = ev;
  }

  if (j.contains("snr")) {
    const json& js = j["snr"];
    SnrConfig sc;
    sc.smooth_target = js.value("smooth_target", 1e-6);
    sc.degree = js.value("degree", 3);
    sc.mean_removed_signal = js.value("mean_removed_signal", true);
    cfg.snr = sc;
  }

  if (cfg.estimators.empty() && !cfg.snr && !j.contains("dataset"))
    throw ConfigError("config runs nothing");
  return cfg;
}

LoadedData load_dataset(const DatasetConfig& cfg, std::uint64_t default_seed) {
  LoadedData data;
  if (cfg.parabolic) {
    ParabolicSpec spec = *cfg.parabolic;
    if (spec.seed == 0) spec.seed = default_seed;
    auto [d, truth] = gen_parabolic(spec);
    data.raw = std::move(d);
    data.truth = std::move(truth);
  } else {
    data.raw = load_csv(*cfg.csv);
    if (cfg.response_csv) attach_response_csv(data.raw, *cfg.response_csv);
  }
  if (cfg.synthetic_response) {
    SyntheticResponseSpec spec = *cfg.synthetic_response;
    if (spec.seed == 0) spec.seed = default_seed;
    auto [d, truth] = attach_synthetic_response(data.raw, spec);
    data.raw = std::move(d);
    data.truth = std::move(truth);
  }
  if (cfg.response_transform != ResponseTransform::kNone)
    data.raw = apply_response_transform(std::move(data.raw), cfg.response_transform);
  return data;
}

namespace {

// true/constant/file coefficients are stated in raw-X units; z-scoring
// rescales a fitted model's axis by the column stds
Eigen::VectorXd to_fit_space(const Eigen::VectorXd& beta_raw, const PreprocessState& state) {
  if (state.column_stds) return state.column_stds->cwiseProduct(beta_raw);
  return beta_raw;
}

Eigen::VectorXd load_beta_file(const std::filesystem::path& path, Eigen::Index p) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coefficient file " + path.string());
  std::string line;
  std::vector<double> vals;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;  // header
    }
    vals.push_back(std::stod(line));
  }
  if (static_cast<Eigen::Index>(vals.size()) != p)
    throw InputError("coefficient file " + path.string() + " has " +
                     std::to_string(vals.size()) + " rows, expected " + std::to_string(p));
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

struct FittedModel {
  EstimatorConfig config;
  CoefficientVector beta;
  std::optional<CvResult> cv;
};

std::string hyper_cell(const FittedModel& m) {
  if (m.beta.method == Method::kMinNorm) return "-";
  if (m.beta.hyper.components) return "M=" + std::to_string(*m.beta.hyper.components);
  if (m.beta.hyper.lambda) return "lambda=" + format_double(*m.beta.hyper.lambda);
  return "-";
}

void write_coefficients_csv(const std::filesystem::path& path,
                            const std::vector<FittedModel>& models,
                            const std::optional<CoefficientVector>& truth_fit) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  Eigen::Index p = 0;
  for (const auto& m : models) p = m.beta.beta.size();
  if (truth_fit) p = truth_fit->beta.size();
  out << "id,method,hyperparams";
  for (Eigen::Index j = 0; j < p; ++j) out << ",c" << j;
  out << "\n";
  if (truth_fit) {
    out << "true,true,-";
    for (Eigen::Index j = 0; j < p; ++j) out << "," << format_double(truth_fit->beta[j]);
    out << "\n";
  }
  for (const auto& m : models) {
    out << m.config.id << "," << to_string(m.beta.method) << "," << hyper_cell(m);
    for (Eigen::Index j = 0; j < p; ++j) out << "," << format_double(m.beta.beta[j]);
    out << "\n";
  }
}

void write_cv_csv(const std::filesystem::path& dir, const FittedModel& m) {
  std::ofstream out(dir / ("cv_" + m.config.id + ".csv"));
  out << "hyperparam,mean_rmse,std_rmse\n";
  const CvResult& cv = *m.cv;
  for (std::size_t i = 0; i < cv.grid.size(); ++i)
    out << format_double(cv.grid[i]) << "," << format_double(cv.mean_curve[i]) << ","
        << format_double(cv.std_curve[i]) << "\n";
  out << "\n";
  out << "rule,chosen_min,chosen_1se\n";
  out << to_string(cv.rule_used) << "," << format_double(cv.chosen_min) << ","
      << format_double(cv.chosen_1se) << "\n";
  for (const std::string& w : cv.warnings) out << "# " << w << "\n";
}

Eigen::VectorXd plot_axis(const Dataset& d) {
  if (d.domain) return *d.domain;
  Eigen::VectorXd idx(d.p());
  for (Eigen::Index j = 0; j < d.p(); ++j) idx[j] = static_cast<double>(j);
  return idx;
}

const char* kPalette[] = {"#2ca02c", "#1f77b4", "#d62728", "#ff7f0e", "#9467bd", "#8c564b"};

}  // namespace

void run(const RunConfig& config, const RunStages& stages) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const fs::path plots = config.out_dir / "plots";
  fs::create_directories(plots);

  LoadedData data = load_dataset(config.dataset, config.seed);

  if (stages.save_dataset) {
    save_csv(data.raw, config.out_dir / "dataset.csv");
    if (data.raw.y.size()) save_response_csv(data.raw, config.out_dir / "response.csv");
    if (data.truth) {
      std::ofstream out(config.out_dir / "true_beta.csv");
      out << "beta\n";
      for (Eigen::Index j = 0; j < data.truth->beta.size(); ++j)
        out << format_double(data.truth->beta[j]) << "\n";
    }
  }

  const Eigen::VectorXd axis = plot_axis(data.raw);
  const std::string axis_label = data.raw.domain ? "domain" : "column index";

  if (config.snr && stages.snr) {
    SnrProfile prof = snr_profile(data.raw, config.snr->smooth_target, config.snr->degree,
                                  config.snr->mean_removed_signal);
    std::ofstream out(config.out_dir / "snr.csv");
    out << "domain,snr_db,snr_ratio,noise_power,column_mean,column_std\n";
    for (Eigen::Index j = 0; j < data.raw.p(); ++j)
      out << format_double(axis[j]) << "," << format_double(prof.snr_db[j]) << ","
          << format_double(prof.snr_ratio[j]) << "," << format_double(prof.noise_power[j])
          << "," << format_double(prof.column_mean[j]) << ","
          << format_double(prof.column_std[j]) << "\n";
    SvgPlot plot("Per-column SNR", axis_label, "SNR (dB)");
    plot.add_line(axis, prof.snr_db, "SNR", "#1f77b4");
    plot.write(plots / "snr.svg");
  }

  if (config.estimators.empty() || !stages.fit) return;
  if (data.raw.y.size() == 0)
    throw ConfigError("estimators configured but the dataset has no response");

  auto state = fit_preprocess(data.raw, config.scheme);
  Dataset centered = apply_preprocess(state, data.raw);
  SvdFactors factors = svd_factor(centered.x);

  std::optional<CoefficientVector> truth_fit;
  if (data.truth) {
    truth_fit = *data.truth;
    truth_fit->beta = to_fit_space(data.truth->beta, *state);
    truth_fit->preprocessing = state;
  }

  std::vector<FittedModel> models;
  for (const EstimatorConfig& e : config.estimators) {
    FittedModel m;
    m.config = e;
    double hyper = 0.0;
    if (e.cv) {
      std::vector<double> grid = e.grid;
      if (grid.empty()) {
        if (e.method == Method::kRidge)
          grid = default_ridge_grid(factors.sigma_max());
        else if (e.method == Method::kFusedLasso)
          grid = default_lasso_grid(centered.x, centered.y);
        else {
          const int hi = static_cast<int>(std::min<Eigen::Index>(factors.rank(), 10));
          for (int v = 1; v <= hi; ++v) grid.push_back(v);
        }
      }
      CvEstimator cve{e.method, e.penalty, e.genlasso};
      m.cv = cross_validate(data.raw, cve, grid, e.cv->folds, e.cv->seed, e.cv->rule,
                            config.scheme);
      hyper = m.cv->chosen();
    } else if (e.lambda) {
      hyper = *e.lambda;
    } else if (e.components) {
      hyper = *e.components;
    }

    switch (e.method) {
      case Method::kMinNorm:
        m.beta = fit_min_norm(centered, factors);
        break;
      case Method::kRidge:
        m.beta = fit_ridge(centered, factors, hyper);
        break;
      case Method::kPcr:
        m.beta = fit_pcr(centered, factors, static_cast<int>(std::lround(hyper)));
        break;
      case Method::kPls:
        m.beta = fit_pls(centered, factors, static_cast<int>(std::lround(hyper))).first;
        break;
      case Method::kFusedLasso: {
        PenaltyMatrix pen = e.penalty == PenaltyKind::kIdentity
                                ? PenaltyMatrix::identity(centered.p())
                                : PenaltyMatrix::first_difference(centered.p());
        m.beta = fit_generalized_lasso(centered, hyper, pen, e.genlasso);
        if (e.fuse) m.beta.beta = fuse_runs(m.beta.beta);
        break;
      }
      default:
        throw ConfigError("estimator '" + e.id + "': unsupported method");
    }
    models.push_back(std::move(m));
  }

  write_coefficients_csv(config.out_dir / "coefficients.csv", models, truth_fit);

  {
    SvgPlot plot("Regression coefficients", axis_label, "coefficient");
    if (truth_fit) plot.add_line(axis, truth_fit->beta, "true", "black", 2.0);
    int color = 0;
    for (const auto& m : models)
      plot.add_line(axis, m.beta.beta, m.config.id, kPalette[color++ % 6]);
    plot.write(plots / "coefficients.svg");
  }

  for (const auto& m : models) {
    if (!m.cv || !stages.write_cv) continue;
    write_cv_csv(config.out_dir, m);
    SvgPlot plot("Cross-validation: " + m.config.id,
                 m.cv->integer_grid ? "components" : "lambda", "RMSE");
    Eigen::VectorXd gx = Eigen::Map<const Eigen::VectorXd>(m.cv->grid.data(),
                                                           m.cv->grid.size());
    plot.set_log_x(!m.cv->integer_grid);
    plot.add_band(gx, m.cv->mean_curve, m.cv->std_curve, "#1f77b4");
    plot.add_line(gx, m.cv->mean_curve, "mean CV RMSE", "#1f77b4");
    plot.write(plots / ("cv_" + m.config.id + ".svg"));
  }

  // prediction scatter for each model
  for (const auto& m : models) {
    const Eigen::VectorXd yhat = predict(m.beta, centered);
    Eigen::VectorXd y_model = data.raw.y;
    SvgPlot plot("Predictions: " + m.config.id, "measured", "predicted");
    plot.add_scatter(y_model, yhat, m.config.id, "#1f77b4");
    const double lo = y_model.minCoeff(), hi = y_model.maxCoeff();
    Eigen::Vector2d diag_x(lo, hi), diag_y(lo, hi);
    plot.add_line(diag_x, diag_y, "identity", "#999999", 1.0);
    plot.write(plots / ("predictions_" + m.config.id + ".svg"));
  }

  if (config.nullspace && stages.nullspace) {
    const NullspaceRequest& req = *config.nullspace;
    const FittedModel* ma = nullptr;
    for (const auto& m : models)
      if (m.config.id == req.beta_a_id) ma = &m;
    if (!ma) throw ConfigError("nullspace beta_a model '" + req.beta_a_id + "' was not fit");

    CoefficientVector beta_b;
    if (std::holds_alternative<BetaTrue>(req.beta_b)) {
      if (!truth_fit)
        throw ConfigError("nullspace beta_b is 'true' but the dataset has no true "
                          "coefficients (use a generator or synthetic response)");
      beta_b = *truth_fit;
    } else if (const auto* bm = std::get_if<BetaModel>(&req.beta_b)) {
      for (const auto& m : models)
        if (m.config.id == bm->id) beta_b = m.beta;
      if (!beta_b.beta.size())
        throw ConfigError("nullspace beta_b model '" + bm->id + "' was not fit");
    } else if (const auto* bc = std::get_if<BetaConstant>(&req.beta_b)) {
      beta_b.beta = to_fit_space(Eigen::VectorXd::Constant(centered.p(), bc->value), *state);
      beta_b.method = Method::kCustom;
      beta_b.preprocessing = state;
    } else {
      const auto& bf = std::get<BetaFile>(req.beta_b);
      beta_b.beta = to_fit_space(load_beta_file(bf.path, centered.p()), *state);
      beta_b.method = Method::kCustom;
      beta_b.preprocessing = state;
    }

    NullspaceComparison cmp =
        req.gamma ? compare_fixed_gamma(centered, factors, ma->beta, beta_b, *req.gamma)
                  : select_gamma(centered, factors, ma->beta, beta_b, *req.c, req.search);

    std::ofstream out(config.out_dir / "nullspace.csv");
    out << "gamma,nrmse_before,nrmse_after,constraint_c,status\n";
    out << (std::isinf(cmp.gamma) ? "inf" : format_double(cmp.gamma)) << ","
        << format_double(cmp.nrmse_before) << "," << format_double(cmp.nrmse_after) << ","
        << (req.c ? format_double(*req.c) : "-") << ","
        << (req.gamma ? "fixed" : to_string(cmp.status)) << "\n\n";
    out << "domain,beta_a,beta_b,v,beta_a_plus_v\n";
    for (Eigen::Index j = 0; j < centered.p(); ++j)
      out << format_double(axis[j]) << "," << format_double(cmp.beta_a.beta[j]) << ","
          << format_double(cmp.beta_b.beta[j]) << "," << format_double(cmp.v[j]) << ","
          << format_double(cmp.beta_a.beta[j] + cmp.v[j]) << "\n";

    SvgPlot plot("Nullspace comparison: " + req.beta_a_id, axis_label, "coefficient");
    plot.add_line(axis, cmp.beta_b.beta, "beta_b", "black", 2.0);
    plot.add_line(axis, cmp.beta_a.beta, "beta_a (" + req.beta_a_id + ")", "#2ca02c");
    plot.add_line(axis, cmp.beta_a.beta + cmp.v, "beta_a + v", "magenta");
    plot.write(plots / "nullspace.svg");
  }

  if (config.evaluate && stages.evaluate) {
    std::vector<std::pair<std::string, Dataset>> splits;
    {
      Dataset train = data.raw;
      train.y = invert_response(data.raw.y_transform, train.y);
      train.y_transform = ResponseTransform::kNone;
      splits.emplace_back("Training", std::move(train));
    }
    for (const SplitConfig& sc : config.evaluate->splits) {
      Dataset d = load_csv(sc.csv);
      attach_response_csv(d, sc.response_csv);
      splits.emplace_back(sc.name, std::move(d));
    }
    std::ofstream out(config.out_dir / "eval.csv");
    out << "model,split,subset,count,rmse\n";
    for (const auto& m : models) {
      EvalReport rep = evaluate(m.beta, splits, config.evaluate->subsets);
      for (const SplitReport& row : rep.rows) {
        out << m.config.id << "," << row.split << ",all," << row.count << ","
            << (row.rmse ? format_double(*row.rmse) : "-") << "\n";
        for (const auto& sub : row.subsets)
          out << m.config.id << "," << row.split << "," << sub.name << "," << sub.count << ","
              << (sub.rmse ? format_double(*sub.rmse) : "-") << "\n";
      }
    }
  }
}

}  // namespace hdreg
