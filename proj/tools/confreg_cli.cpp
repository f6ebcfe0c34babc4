#include "confreg/confreg.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNotContained = 1, kInvalid = 2, kFlagged = 3, kError = 4, kEmpty = 5 };

struct Failure {
  cr_status status;
  std::string message;
};

void check(cr_status s) {
  if (s != CR_OK) throw Failure{s, cr_last_error()};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{CR_PARSE_ERROR, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Failure{CR_PARSE_ERROR, "cannot write " + path};
  out << text;
}

double parse_number(const std::string& t) {
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(t, &pos);
  if (pos != t.size()) throw std::invalid_argument(t);
  return v;
}

std::vector<double> json_vector(const json& j, const std::string& key) {
  const json& a = j.is_object() ? j.at(key) : j;
  std::vector<double> v;
  for (const json& e : a) v.push_back(e.is_string() ? parse_number(e.get<std::string>()) : e.get<double>());
  return v;
}

// A comma-separated list or the path of a JSON file holding an array (or an
// object with the named key).
std::vector<double> read_vector(const std::string& arg, const std::string& key) {
  std::ifstream probe(arg);
  try {
    if (probe) return json_vector(json::parse(read_file(arg)), key);
    std::vector<double> v;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(parse_number(tok));
    return v;
  } catch (const std::exception& e) {
    throw Failure{CR_PARSE_ERROR, "cannot read vector '" + arg + "': " + e.what()};
  }
}

json number(double d) {
  if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
  if (std::isnan(d)) return "nan";
  return d;
}

struct SpecHandle {
  cr_spec* p = nullptr;
  json raw;
  ~SpecHandle() { cr_spec_free(p); }
  size_t n = 0, dim = 0, k = 0;
};

void load_spec(SpecHandle& h, const std::string& path) {
  const std::string text = read_file(path);
  try {
    h.raw = json::parse(text);
  } catch (const std::exception& e) {
    throw Failure{CR_PARSE_ERROR, path + ": " + e.what()};
  }
  check(cr_spec_from_json(text.c_str(), &h.p));
  check(cr_spec_dims(h.p, &h.n, &h.dim, &h.k));
}

std::vector<double> sized(std::vector<double> v, size_t n, const char* what) {
  if (v.size() != n)
    throw Failure{CR_DIMENSION_MISMATCH, std::string(what) + " must have " + std::to_string(n) + " entries"};
  return v;
}

struct RegionArgs {
  std::string spec, y, stat = "l1", mu;
  double delta = 0.0;
  int angles = 720;
  double rtol = 1e-6;
  std::string out;
};

struct RegionHandle {
  SpecHandle spec;
  cr_region* r = nullptr;
  ~RegionHandle() { cr_region_free(r); }
};

std::vector<double> optional_y(const SpecHandle& s, const std::string& arg) {
  if (!arg.empty()) return sized(read_vector(arg, "y"), s.n, "y");
  if (s.raw.contains("y")) return sized(json_vector(s.raw.at("y"), "y"), s.n, "y");
  return {};
}

void open_region(RegionHandle& h, const RegionArgs& a) {
  load_spec(h.spec, a.spec);
  std::vector<double> y;
  if (!a.y.empty()) {
    y = read_vector(a.y, "y");
  } else if (h.spec.raw.contains("y")) {
    y = json_vector(h.spec.raw.at("y"), "y");
  } else {
    throw Failure{CR_PARSE_ERROR, "--y is required (or a \"y\" entry in the spec)"};
  }
  y = sized(y, h.spec.n, "y");
  cr_statistic st;
  check(cr_parse_statistic(a.stat.c_str(), &st));
  check(cr_region_create(h.spec.p, st, a.delta, y.data(), &h.r));
}

const CLI::Validator open_unit(
    [](std::string& v) {
      double x = 0.0;
      if (!CLI::detail::lexical_cast(v, x)) return "not a number: " + v;
      return x > 0.0 && x < 1.0 ? std::string() : "must lie strictly between 0 and 1";
    },
    "(0,1)");

void add_region_options(CLI::App* c, RegionArgs& a) {
  c->add_option("--spec", a.spec, "problem spec JSON")->required();
  c->add_option("--y", a.y, "observation: JSON file or comma list");
  c->add_option("--stat", a.stat, "l1, l2u or l2c");
  c->add_option("--delta", a.delta, "threshold")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence regions for constrained linear inverse problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cr_version()));
  int rc = kOk;

  // chibar quantile
  auto* chibar = app.add_subcommand("chibar", "chi-bar-squared mixtures");
  chibar->require_subcommand(1);
  std::string weights;
  double level = 0.95;
  auto* cq = chibar->add_subcommand("quantile", "quantile of a mixture given weights w0,w1,...");
  cq->add_option("--weights", weights, "weights on chi2_0, chi2_1, ...")->required();
  cq->add_option("--level", level, "probability level")->required()->check(open_unit);
  cq->callback([&] {
    const auto w = read_vector(weights, "weights");
    double q = 0.0;
    check(cr_chibar_quantile(w.size(), w.data(), level, &q));
    std::printf("%.10g\n", q);
  });

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "global threshold for a statistic");
  std::string cal_spec, cal_stat = "l1", cal_method = "auto";
  double cal_alpha = 0.05;
  cr_calibration_options copts;
  cr_calibration_options_default(&copts);
  cal->add_option("--spec", cal_spec, "problem spec JSON")->required();
  cal->add_option("--stat", cal_stat, "l1, l2u or l2c");
  cal->add_option("--alpha", cal_alpha, "miscoverage level")->check(open_unit);
  cal->add_option("--method", cal_method, "auto, origin, vertices, chisq-n or chisq-rank");
  cal->add_option("--samples", copts.n_samples, "Monte Carlo samples");
  cal->add_option("--seed", copts.seed, "random seed");
  cal->add_option("--threads", copts.threads, "worker threads (0 = all cores)");
  cal->add_option("--vertex-budget", copts.vertex_budget, "maximum vertex bases to try");
  cal->callback([&] {
    SpecHandle s;
    load_spec(s, cal_spec);
    cr_statistic st;
    check(cr_parse_statistic(cal_stat.c_str(), &st));
    cr_threshold t;
    check(cr_calibrate(s.p, st, cal_alpha, cal_method.c_str(), &copts, &t));
    json j = {{"delta", number(t.delta)},
              {"provenance", t.provenance},
              {"stderr", number(t.std_error)},
              {"n_samples", t.n_samples}};
    if (t.points_evaluated) j["points_evaluated"] = t.points_evaluated;
    if (t.budget_exceeded) j["budget_exceeded"] = true;
    std::cout << j.dump(2) << "\n";
  });

  // region
  auto* region = app.add_subcommand("region", "regions {mu : stat(mu, y) <= delta}");
  region->require_subcommand(1);
  RegionArgs ra;
  auto* rbox = region->add_subcommand("box", "per-coordinate bounding intervals");
  add_region_options(rbox, ra);
  rbox->callback([&] {
    RegionHandle h;
    open_region(h, ra);
    std::vector<double> lo(h.spec.k), hi(h.spec.k);
    check(cr_region_bounding_box(h.r, lo.data(), hi.data()));
    json iv = json::array();
    for (size_t i = 0; i < lo.size(); ++i) iv.push_back({number(lo[i]), number(hi[i])});
    std::cout << json{{"intervals", iv}}.dump(2) << "\n";
  });
  auto* rcont = region->add_subcommand("contains", "membership test; exit code 0 inside, 1 outside");
  add_region_options(rcont, ra);
  rcont->add_option("--mu", ra.mu, "point: JSON file or comma list")->required();
  rcont->callback([&] {
    RegionHandle h;
    open_region(h, ra);
    const auto mu = sized(read_vector(ra.mu, "mu"), h.spec.k, "mu");
    int in = 0;
    double v = 0.0;
    check(cr_region_contains(h.r, mu.data(), &in));
    check(cr_region_value(h.r, mu.data(), &v));
    std::cout << json{{"contains", in != 0}, {"statistic", number(v)}, {"delta", ra.delta}}.dump(2) << "\n";
    rc = in ? kOk : kNotContained;
  });
  auto* rarea = region->add_subcommand("area", "area of a two-dimensional region");
  add_region_options(rarea, ra);
  rarea->add_option("--angles", ra.angles, "number of rays");
  rarea->add_option("--rtol", ra.rtol, "radial tolerance");
  rarea->callback([&] {
    RegionHandle h;
    open_region(h, ra);
    double a = 0.0;
    check(cr_region_area(h.r, ra.angles, ra.rtol, &a));
    std::printf("%.10g\n", a);
  });
  auto* rbound = region->add_subcommand("boundary", "boundary polyline as CSV (theta,r,mu1,mu2)");
  add_region_options(rbound, ra);
  rbound->add_option("--angles", ra.angles, "number of rays");
  rbound->add_option("--rtol", ra.rtol, "radial tolerance");
  rbound->add_option("--out", ra.out, "write CSV here instead of stdout");
  rbound->callback([&] {
    RegionHandle h;
    open_region(h, ra);
    char* csv = nullptr;
    const cr_status s = cr_region_boundary_csv(h.r, ra.angles, ra.rtol, &csv);
    const std::string text = s == CR_OK ? std::string(csv) : std::string();
    cr_string_free(csv);
    if (s != CR_OK && s != CR_EMPTY_REGION) check(s);
    if (ra.out.empty()) {
      std::cout << text;
    } else {
      write_file(ra.out, text);
    }
    if (s == CR_EMPTY_REGION) throw Failure{s, cr_last_error()};
  });

  // boundedness
  auto* bnd = app.add_subcommand("boundedness", "which sides of each functional are bounded");
  std::string bnd_spec;
  bnd->add_option("--spec", bnd_spec, "problem spec JSON")->required();
  bnd->callback([&] {
    SpecHandle s;
    load_spec(s, bnd_spec);
    std::vector<cr_bound_kind> kinds(s.k);
    check(cr_boundedness(s.p, kinds.data()));
    json out = json::array();
    for (cr_bound_kind k : kinds) out.push_back(cr_bound_kind_string(k));
    std::cout << json{{"rows", out}}.dump(2) << "\n";
  });

  // reduce
  auto* red = app.add_subcommand("reduce", "reductions to small canonical problems");
  red->require_subcommand(1);
  std::string red_spec, red_y, red_lo, red_up;
  auto emit = [](char* text) {
    std::cout << text << "\n";
    cr_string_free(text);
  };
  auto* rtfm = red->add_subcommand("tfm", "split functionals into non-negative parts");
  rtfm->add_option("--spec", red_spec, "problem spec JSON")->required();
  rtfm->add_option("--y", red_y, "observation to reduce");
  rtfm->callback([&] {
    SpecHandle s;
    load_spec(s, red_spec);
    const std::vector<double> y = optional_y(s, red_y);
    char* out = nullptr;
    check(cr_reduce_tfm(s.p, y.empty() ? nullptr : y.data(), &out));
    emit(out);
  });
  auto* rboxr = red->add_subcommand("box", "six-variable box reduction (k = 1)");
  rboxr->add_option("--spec", red_spec, "problem spec JSON")->required();
  rboxr->add_option("--lo", red_lo, "lower bounds (inf allowed)")->required();
  rboxr->add_option("--up", red_up, "upper bounds (inf allowed)")->required();
  rboxr->add_option("--y", red_y, "observation to reduce");
  rboxr->callback([&] {
    SpecHandle s;
    load_spec(s, red_spec);
    const auto lo = sized(read_vector(red_lo, "lo"), s.dim, "lo");
    const auto up = sized(read_vector(red_up, "up"), s.dim, "up");
    const std::vector<double> y = optional_y(s, red_y);
    char* out = nullptr;
    check(cr_reduce_box(s.p, lo.data(), up.data(), y.empty() ? nullptr : y.data(), &out));
    emit(out);
  });

  // coverage
  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage experiments");
  cov->require_subcommand(1);
  std::string cov_config, cov_out, cov_csv;
  auto* crun = cov->add_subcommand("run", "run an experiment config; exit 2 invalid config, 3 flagged run");
  crun->add_option("--config", cov_config, "experiment config JSON")->required();
  crun->add_option("--out", cov_out, "report path (default: stdout or the config's output_path)");
  crun->add_option("--csv", cov_csv, "per-trial areas CSV");
  crun->callback([&] {
    std::string text;
    try {
      text = read_file(cov_config);
    } catch (const Failure& f) {
      throw Failure{CR_INVALID_CONFIG, f.message};
    }
    char* report = nullptr;
    char* csv = nullptr;
    int flagged = 0;
    const cr_status s = cr_coverage_run(text.c_str(), &report, cov_csv.empty() ? nullptr : &csv, &flagged);
    if (s == CR_PARSE_ERROR) throw Failure{CR_INVALID_CONFIG, cr_last_error()};
    check(s);
    std::string out = cov_out;
    if (out.empty()) {
      try {
        out = json::parse(text).value("output_path", std::string());
      } catch (const std::exception&) {
      }
    }
    if (out.empty()) {
      std::cout << report << "\n";
    } else {
      write_file(out, std::string(report) + "\n");
    }
    if (csv) write_file(cov_csv, csv);
    cr_string_free(report);
    cr_string_free(csv);
    if (flagged) {
      std::cerr << "run flagged: solver failures exceeded 0.1% of trials\n";
      rc = kFlagged;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  } catch (const Failure& f) {
    std::cerr << "error: " << cr_status_string(f.status) << ": " << f.message << "\n";
    switch (f.status) {
      case CR_PARSE_ERROR:
      case CR_INVALID_CONFIG:
        return kInvalid;
      case CR_EMPTY_REGION:
        return kEmpty;
      default:
        return kError;
    }
  }
  return rc;
}
