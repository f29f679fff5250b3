#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>

#include "hdreg/csv.hpp"
#include "hdreg/runner.hpp"
#include "helpers.hpp"

using namespace hdreg;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "hdreg_test_io";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-7) == "-2.5e-07");
  for (double v : {1.0 / 3.0, 0.30000000000000004, 1e300, 5e-324, -0.0,
                   123456.789012345678}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("toy dataset round-trips bit-exactly") {
  Dataset d;
  d.x.resize(2, 3);
  d.x << 0.1, 1.0 / 3.0, -2.5e-7, 4, 5.5, 6.25;
  d.y.resize(0);
  d.sample_ids = {"a", "b"};
  d.domain = Eigen::Vector3d(1.5, 2.5, 3.5);

  const fs::path dir = temp_dir();
  save_csv(d, dir / "toy.csv");
  Dataset loaded = load_csv(dir / "toy.csv");
  CHECK(loaded.x == d.x);
  REQUIRE(loaded.domain);
  CHECK(*loaded.domain == *d.domain);
  CHECK(loaded.sample_ids == d.sample_ids);

  save_csv(loaded, dir / "toy2.csv");
  CHECK(slurp(dir / "toy.csv") == slurp(dir / "toy2.csv"));
}

TEST_CASE("the shipped battery subset loads with the documented shape") {
  const fs::path root = fs::path(__FILE__).parent_path().parent_path();
  Dataset d = load_csv(root / "data/lfp/lfp_train_dq.csv");
  CHECK(d.n() == 41);
  CHECK(d.p() == 1000);
  REQUIRE(d.domain);
  for (Eigen::Index j = 1; j < d.p(); ++j) CHECK((*d.domain)[j] < (*d.domain)[j - 1]);
  attach_response_csv(d, root / "data/lfp/lfp_train_cycle_life.csv");
  CHECK(d.y.size() == 41);
  CHECK(d.y.minCoeff() > 0);
}

TEST_CASE("parse errors carry locations") {
  const fs::path dir = temp_dir();

  spit(dir / "ragged.csv", "id,c0,c1\nA,1,2\nB,3\n");
  CHECK_THROWS_AS(load_csv(dir / "ragged.csv"), ParseError);

  spit(dir / "nonnum.csv", "id,c0,c1\nA,1,x7\n");
  try {
    load_csv(dir / "nonnum.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row == 2);
    CHECK(e.col == 3);
  }

  spit(dir / "dup.csv", "id,c0\nA,1\nA,2\n");
  CHECK_THROWS_AS(load_csv(dir / "dup.csv"), ParseError);
}

TEST_CASE("a missing response id is reported by name") {
  const fs::path dir = temp_dir();
  spit(dir / "x.csv", "id,c0,c1\ncellA,1,2\ncellB,3,4\n");
  spit(dir / "y.csv", "id,y\ncellA,10\n");
  Dataset d = load_csv(dir / "x.csv");
  try {
    attach_response_csv(d, dir / "y.csv");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("cellB") != std::string::npos);
  }
}

TEST_CASE("run configuration parses and validates") {
  const fs::path dir = temp_dir();
  spit(dir / "cfg.json", R"({
    "seed": 3,
    "out_dir": "outx",
    "scheme": "zscore",
    "dataset": {"parabolic": {"n": 10, "seed": 1}},
    "estimators": [
      {"id": "pls1", "method": "pls", "components": 1},
      {"id": "rr", "method": "ridge", "cv": {"folds": 4, "rule": "min"}}
    ],
    "nullspace": {"beta_a": "pls1", "beta_b": "true", "c": 1e-4}
  })");
  RunConfig cfg = load_config(dir / "cfg.json");
  CHECK(cfg.seed == 3);
  CHECK(cfg.scheme == Scheme::kZScore);
  REQUIRE(cfg.dataset.parabolic);
  CHECK(cfg.dataset.parabolic->n == 10);
  REQUIRE(cfg.estimators.size() == 2);
  CHECK(cfg.estimators[1].cv->folds == 4);
  CHECK(cfg.estimators[1].cv->rule == CvRule::kMin);
  REQUIRE(cfg.nullspace);
  CHECK(std::holds_alternative<BetaTrue>(cfg.nullspace->beta_b));

  spit(dir / "bad1.json", R"({"dataset": {}})");
  CHECK_THROWS_AS(load_config(dir / "bad1.json"), ConfigError);

  spit(dir / "bad2.json", R"({
    "dataset": {"parabolic": {}},
    "estimators": [{"id": "a", "method": "warp_drive", "components": 1}]
  })");
  CHECK_THROWS_AS(load_config(dir / "bad2.json"), ConfigError);

  spit(dir / "bad3.json", R"({
    "dataset": {"parabolic": {}},
    "estimators": [{"id": "p", "method": "pls", "components": 1}],
    "nullspace": {"beta_a": "nope", "beta_b": "true", "c": 1e-4}
  })");
  CHECK_THROWS_AS(load_config(dir / "bad3.json"), ConfigError);

  spit(dir / "bad4.json", R"({
    "dataset": {"parabolic": {}},
    "estimators": []
  })");
  CHECK_THROWS_AS(load_config(dir / "bad4.json"), ConfigError);

  spit(dir / "bad5.json", R"({
    "dataset": {"parabolic": {}},
    "estimators": [{"id": "r", "method": "ridge"}]
  })");
  CHECK_THROWS_AS(load_config(dir / "bad5.json"), ConfigError);
}

TEST_CASE("run executes a small workflow end to end") {
  const fs::path dir = temp_dir() / "run_e2e";
  fs::remove_all(dir);
  RunConfig cfg;
  cfg.out_dir = dir;
  cfg.seed = 1;
  ParabolicSpec spec;
  spec.n = 12;
  spec.domain_end = 2.0;  // p = 101, keeps the test quick
  spec.seed = 2;
  cfg.dataset.parabolic = spec;
  EstimatorConfig pls;
  pls.id = "pls1";
  pls.method = Method::kPls;
  pls.components = 1;
  cfg.estimators.push_back(pls);
  NullspaceRequest req;
  req.beta_a_id = "pls1";
  req.beta_b = BetaTrue{};
  req.gamma = 10.0;
  cfg.nullspace = req;

  run(cfg);
  CHECK(fs::exists(dir / "coefficients.csv"));
  CHECK(fs::exists(dir / "nullspace.csv"));
  CHECK(fs::exists(dir / "plots/coefficients.svg"));
  CHECK(fs::exists(dir / "plots/nullspace.svg"));
  CHECK(fs::exists(dir / "plots/predictions_pls1.svg"));

  const std::string coeffs = slurp(dir / "coefficients.csv");
  CHECK(coeffs.find("pls1,pls,M=1") != std::string::npos);
  CHECK(coeffs.find("true,true,-") != std::string::npos);
}
