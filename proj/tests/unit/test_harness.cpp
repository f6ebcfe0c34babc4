#include "doctest.h"

#include "confreg/errors.hpp"
#include "confreg/harness.hpp"

#include <cmath>

using namespace confreg;

namespace {

Json toy_config(std::size_t n_trials) {
  Json j = parse_json(R"({
    "schema_version": 1,
    "spec": {"K": [[2, 1, 1], [0, 1, 1]], "H": [[1, -1, 0], [0, 1, -1]], "constraints": {"type": "nonnegative"}},
    "x_star": [0, 0, 0],
    "alpha": 0.32,
    "seed": 11,
    "methods": ["ssb_x", "ssb_mu", "qzero_x", "qzero_mu", "bonferroni", "split_naive", "split_refined",
                {"name": "custom", "label": "wide", "stat": "l2u", "threshold": 9.0}],
    "calibration": {"n_samples": 5000, "seed": 2},
    "area": {"enabled": true, "n_angles": 90, "n_trials": 5}
  })");
  j["n_trials"] = n_trials;
  return j;
}

ErrorCode config_error(const Json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(68, 100);
  CHECK(lo < 0.68);
  CHECK(hi > 0.68);
  CHECK(lo == doctest::Approx(0.5833).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.7626).epsilon(1e-3));
  const auto [l0, h0] = wilson_interval(0, 10);
  CHECK(l0 == 0.0);
  CHECK(h0 > 0.0);
}

TEST_CASE("config validation") {
  CHECK(config_error(toy_config(10)) == ErrorCode::Ok);
  Json j = toy_config(10);
  j["schema_version"] = 2;
  CHECK(config_error(j) == ErrorCode::InvalidConfig);
  j = toy_config(10);
  j["x_star"] = {-1, 0, 0};
  CHECK(config_error(j) == ErrorCode::InvalidConfig);
  j = toy_config(10);
  j["methods"] = {"nope"};
  CHECK(config_error(j) == ErrorCode::InvalidConfig);
  j = toy_config(10);
  j["n_trials"] = 0;
  CHECK(config_error(j) == ErrorCode::InvalidConfig);
  j = toy_config(10);
  j["spec"]["H"] = {{1, 2}};
  CHECK(config_error(j) == ErrorCode::InvalidConfig);
  CHECK_THROWS_AS(parse_method("nope"), Error);
  CHECK(parse_method("split_refined") == MethodKind::SplitRefined);

  const ExperimentConfig c = config_from_json(toy_config(10));
  const ExperimentConfig back = config_from_json(to_json(c));
  CHECK(back.methods.size() == c.methods.size());
  CHECK(back.methods.back().label == "wide");
  CHECK(back.methods.back().stat == TestStatistic::Lambda2U);
}

TEST_CASE("method thresholds on the toy problem") {
  const ExperimentConfig c = config_from_json(toy_config(1));
  const auto ssb = build_method({MethodKind::SsbMu, "", TestStatistic::Lambda1, 0.0}, c.spec, 0.32, c.calibration);
  CHECK(ssb->thresholds()["delta"].get<double>() == doctest::Approx(2.2788685664).epsilon(1e-8));
  CalibrationOptions opts;
  opts.n_samples = 40000;
  const auto qz = build_method({MethodKind::QzeroMu, "", TestStatistic::Lambda1, 0.0}, c.spec, 0.32, opts);
  CHECK(std::abs(qz->thresholds()["delta"].get<double>() - 1.6421196862) < 0.05);
  const auto bf = build_method({MethodKind::Bonferroni, "", TestStatistic::Lambda1, 0.0}, c.spec, 0.32, opts);
  CHECK(bf->thresholds()["per_row"].size() == 2);
}

TEST_CASE("smoke run and determinism") {
  const ExperimentConfig one = config_from_json(toy_config(1));
  const CoverageReport r1 = run_coverage(one);
  const Json j = to_json(r1, one);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["methods"].size() == 8);
  CHECK(j["result_hash"].get<std::string>().size() == 16);

  ExperimentConfig c = config_from_json(toy_config(60));
  const CoverageReport a = run_coverage(c);
  c.threads = 3;
  const CoverageReport b = run_coverage(c);
  CHECK(a.result_hash == b.result_hash);
  c.seed = 12;
  CHECK(run_coverage(c).result_hash != a.result_hash);

  for (const MethodReport& m : a.methods) {
    CHECK(m.coverage_rate >= m.wilson_lo);
    CHECK(m.coverage_rate <= m.wilson_hi);
    CHECK(m.failure_count == 0);
  }
  CHECK_FALSE(a.flagged);
  REQUIRE(a.inclusion.size() == 2);
  for (const InclusionReport& i : a.inclusion) CHECK(i.violations == 0);
  // the mu-description never covers more than its x-description box
  CHECK(a.method("ssb_mu").hits <= a.method("ssb_x").hits);
  CHECK(a.method("qzero_mu").hits <= a.method("qzero_x").hits);
  CHECK(a.method("qzero_mu").hits <= a.method("ssb_mu").hits);
  CHECK(areas_csv(a).rfind("trial,method,area\n", 0) == 0);
}

TEST_CASE("area ordering on a few trials") {
  Json j = toy_config(8);
  j["methods"] = {"ssb_x", "ssb_mu", "qzero_mu"};
  j["area"]["n_trials"] = 8;
  j["x_star"] = {5, 5, 5};
  const CoverageReport r = run_coverage(config_from_json(j));
  CHECK(r.method("qzero_mu").area.mean < r.method("ssb_mu").area.mean);
  CHECK(r.method("ssb_mu").area.mean < r.method("ssb_x").area.mean);
}
