#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/measure.hpp"
#include "finsler/metrics.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/quotients.hpp"

namespace finsler {

/// All violations are collected and reported together.
struct ConfigError : std::runtime_error {
  std::vector<std::string> violations;
  explicit ConfigError(std::vector<std::string> v)
      : std::runtime_error(join(v)), violations(std::move(v)) {}
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (auto& e : v) s += "\n  - " + e;
    return s;
  }
};

enum class TaskKind {
  CurvatureScan,
  ComparisonCheck,
  QuotientSweep,
  ReversibleContrast,
  DistanceAudit,
  DivergenceDemo
};

inline std::string task_name(TaskKind t) {
  switch (t) {
    case TaskKind::CurvatureScan: return "curvature-scan";
    case TaskKind::ComparisonCheck: return "comparison-check";
    case TaskKind::QuotientSweep: return "quotient-sweep";
    case TaskKind::ReversibleContrast: return "reversible-contrast";
    case TaskKind::DistanceAudit: return "distance-audit";
    case TaskKind::DivergenceDemo: return "divergence-demo";
  }
  return "?";
}

struct ExperimentConfig {
  FinslerMetricSpec metric = FinslerMetricSpec::explicit_ball_funk(3);
  MeasureSpec measure = MeasureSpec::busemann_hausdorff(metric);
  TaskKind task = TaskKind::QuotientSweep;

  QuotientKind quotient = QuotientKind::Hardy;
  double p = 2.0;
  double q = 1.0;
  std::vector<double> alphas = {1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  int curvature_samples = 20;
  double probe_exponent = 2.0;  // divergence-demo r^-p weight
  double probe_radius = 1.0;
  QuadratureConfig quad;
  double tolerance_scale = 1.0;
  std::string out_dir = "out";
  std::string format = "text";  // text | json | csv
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

/// Flattens the JSON form {"metric": {"kind": ...}} into dotted keys so both
/// config formats share one ingestion path.
inline void flatten_json(const nlohmann::json& j, const std::string& prefix,
                         std::map<std::string, std::string>& kv) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten_json(*it, key, kv);
    } else if (it->is_array()) {
      std::string list;
      for (auto& e : *it) {
        if (!list.empty()) list += ", ";
        list += e.is_string() ? e.get<std::string>() : nlohmann::json(e).dump();
      }
      kv[key] = list;
    } else if (it->is_string()) {
      kv[key] = it->get<std::string>();
    } else {
      kv[key] = it->dump();
    }
  }
}

}  // namespace detail

/// Parse the flat key-value text (or the equivalent JSON document) into a
/// fully validated ExperimentConfig. Every violation is reported, not just
/// the first.
inline ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> errors;

  std::string stripped = detail::trim(text);
  if (!stripped.empty() && stripped[0] == '{') {
    nlohmann::json j = nlohmann::json::parse(stripped, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ConfigError({"malformed JSON config"});
    detail::flatten_json(j, "", kv);
  } else {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }
  }

  static const std::vector<std::string> known = {
      "metric.kind",     "metric.dim",       "metric.a",          "norm.kind",
      "norm.m",          "norm.split",       "norm.axes",         "norm.drift",
      "measure.kind",    "measure.c",        "task",              "quotient.kind",
      "quotient.p",      "quotient.q",       "sweep.alphas",      "samples.curvature",
      "mc.samples",      "mc.seed",          "probe.p",           "probe.radius",
      "contrast.truncation", "tolerance.scale", "output.dir",     "output.format"};
  for (auto& [key, value] : kv) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      errors.push_back("unknown key '" + key + "'");
  }

  auto get = [&](const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  };
  auto get_num = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (...) {
      errors.push_back("key '" + key + "': cannot parse number from '" + it->second + "'");
      return fallback;
    }
  };

  ExperimentConfig cfg;

  int dim = static_cast<int>(get_num("metric.dim", 3));
  if (dim < 2) errors.push_back("metric.dim must be >= 2");
  double a = get_num("metric.a", 1.0);
  if (a < 0.0 || a > 1.0) errors.push_back("metric.a must lie in [0,1]");

  MinkowskiNorm norm = MinkowskiNorm::euclidean(std::max(dim, 2));
  std::string norm_kind = get("norm.kind", "euclidean");
  try {
    if (norm_kind == "euclidean") {
      norm = MinkowskiNorm::euclidean(dim);
    } else if (norm_kind == "power-sum") {
      int m = static_cast<int>(get_num("norm.m", 2));
      if (m < 1) errors.push_back("norm.m must be a positive integer");
      norm = MinkowskiNorm::power_sum(dim, std::max(m, 1));
    } else if (norm_kind == "quartic-split") {
      int n1 = static_cast<int>(get_num("norm.split", 1));
      if (n1 < 1 || n1 >= dim) errors.push_back("norm.split must lie in [1, dim-1]");
      norm = MinkowskiNorm::quartic_split(std::clamp(n1, 1, dim - 1),
                                          dim - std::clamp(n1, 1, dim - 1));
    } else if (norm_kind == "ellipsoid") {
      auto axes = detail::parse_double_list(get("norm.axes", ""));
      if (static_cast<int>(axes.size()) != dim)
        errors.push_back("norm.axes must list exactly metric.dim positive values");
      else
        norm = MinkowskiNorm::ellipsoid(axes);
    } else if (norm_kind == "randers") {
      auto drift = detail::parse_double_list(get("norm.drift", ""));
      if (static_cast<int>(drift.size()) != dim)
        errors.push_back("norm.drift must list exactly metric.dim values");
      else
        norm = MinkowskiNorm::randers(drift);
    } else {
      errors.push_back("norm.kind '" + norm_kind +
                       "' is not one of euclidean|power-sum|quartic-split|ellipsoid|randers");
    }
  } catch (const std::exception& e) {
    errors.push_back(std::string("norm: ") + e.what());
  }

  std::string metric_kind = get("metric.kind", "funk-ball");
  bool funk_domain = metric_kind == "funk" || metric_kind == "hilbert";
  if (funk_domain && norm_kind == "power-sum")
    errors.push_back(
        "norm.kind power-sum is not admitted as a Funk/Hilbert domain: the unit sphere of the "
        "2m-power sum has vanishing principal curvature at the axis points (not strongly "
        "convex); use ellipsoid or randers domains");
  try {
    if (metric_kind == "minkowski")
      cfg.metric = FinslerMetricSpec::minkowski(norm);
    else if (metric_kind == "funk")
      cfg.metric = FinslerMetricSpec::funk(norm);
    else if (metric_kind == "funk-ball")
      cfg.metric = FinslerMetricSpec::explicit_ball_funk(dim);
    else if (metric_kind == "hilbert")
      cfg.metric = FinslerMetricSpec::hilbert(norm);
    else if (metric_kind == "interpolated-funk")
      cfg.metric = FinslerMetricSpec::interpolated_funk(dim, a);
    else if (metric_kind == "klein")
      cfg.metric = FinslerMetricSpec::klein(dim);
    else
      errors.push_back("metric.kind '" + metric_kind +
                       "' is not one of minkowski|funk|funk-ball|hilbert|interpolated-funk|klein");
  } catch (const std::exception& e) {
    errors.push_back(std::string("metric: ") + e.what());
  }

  std::string measure_kind = get("measure.kind", "busemann-hausdorff");
  if (measure_kind == "lebesgue")
    cfg.measure = MeasureSpec::lebesgue();
  else if (measure_kind == "constant") {
    double c = get_num("measure.c", 1.0);
    if (!(c > 0))
      errors.push_back("measure.c must be positive");
    else
      cfg.measure = MeasureSpec::constant_density(c);
  } else if (measure_kind == "busemann-hausdorff") {
    // resolved against the metric after all parsing succeeded (below)
  } else {
    errors.push_back("measure.kind '" + measure_kind +
                     "' is not one of lebesgue|busemann-hausdorff|constant");
  }

  std::string task = get("task", "quotient-sweep");
  if (task == "curvature-scan")
    cfg.task = TaskKind::CurvatureScan;
  else if (task == "comparison-check")
    cfg.task = TaskKind::ComparisonCheck;
  else if (task == "quotient-sweep")
    cfg.task = TaskKind::QuotientSweep;
  else if (task == "reversible-contrast")
    cfg.task = TaskKind::ReversibleContrast;
  else if (task == "distance-audit")
    cfg.task = TaskKind::DistanceAudit;
  else if (task == "divergence-demo")
    cfg.task = TaskKind::DivergenceDemo;
  else
    errors.push_back("task '" + task + "' is unknown");

  std::string qk = get("quotient.kind", "hardy");
  if (qk == "eigenvalue")
    cfg.quotient = QuotientKind::Eigenvalue;
  else if (qk == "hardy")
    cfg.quotient = QuotientKind::Hardy;
  else if (qk == "hpw")
    cfg.quotient = QuotientKind::HPW;
  else if (qk == "ckn")
    cfg.quotient = QuotientKind::CKN;
  else
    errors.push_back("quotient.kind '" + qk + "' is not one of eigenvalue|hardy|hpw|ckn");

  cfg.p = get_num("quotient.p", 2.0);
  cfg.q = get_num("quotient.q", 1.0);

  if (cfg.task == TaskKind::QuotientSweep || cfg.task == TaskKind::ReversibleContrast) {
    if (cfg.quotient == QuotientKind::Hardy) {
      if (!(cfg.p > 1.0))
        errors.push_back("hardy requires p > 1");
      else if (cfg.p >= dim)
        errors.push_back(
            "hardy requires p in (1, n): for p >= n the weight r^-p is not a locally finite "
            "measure (the denominator integral diverges on every ball); run task = "
            "divergence-demo to exhibit exactly this divergence");
    }
    if (cfg.quotient == QuotientKind::Eigenvalue && !(cfg.p > 1.0))
      errors.push_back("eigenvalue requires p > 1");
    if (cfg.quotient == QuotientKind::CKN) {
      if (!(0 < cfg.q && cfg.q < 2 && 2 < cfg.p))
        errors.push_back("CKN requires 0 < q < 2 < p");
      else if (!(2 < dim && dim < 2.0 * (cfg.p - cfg.q) / (cfg.p - 2.0)))
        errors.push_back("CKN requires 2 < n < 2(p-q)/(p-2)");
    }
  }

  auto alphas = detail::parse_double_list(
      get("sweep.alphas", "1, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01"));
  bool alpha_ok = !alphas.empty();
  for (size_t i = 0; i < alphas.size() && alpha_ok; ++i) {
    if (!(alphas[i] > 0)) alpha_ok = false;
    if (i > 0 && !(alphas[i] < alphas[i - 1])) alpha_ok = false;
  }
  if (!alpha_ok)
    errors.push_back("sweep.alphas must be a strictly decreasing list of positive values");
  else
    cfg.alphas = alphas;

  cfg.curvature_samples = static_cast<int>(get_num("samples.curvature", 20));
  if (cfg.curvature_samples < 1) errors.push_back("samples.curvature must be >= 1");
  cfg.quad.mc_samples = static_cast<long long>(get_num("mc.samples", 1000000));
  if (cfg.quad.mc_samples < 100) errors.push_back("mc.samples must be >= 100");
  cfg.quad.mc_seed = static_cast<unsigned long long>(get_num("mc.seed", 20240501));
  cfg.probe_exponent = get_num("probe.p", 2.0);
  cfg.probe_radius = get_num("probe.radius", 1.0);
  if (!(cfg.probe_radius > 0)) errors.push_back("probe.radius must be positive");
  cfg.quad.contrast_truncation_radius = get_num("contrast.truncation", 10.0);
  if (!(cfg.quad.contrast_truncation_radius > 0))
    errors.push_back("contrast.truncation must be positive");
  cfg.tolerance_scale = get_num("tolerance.scale", 1.0);
  if (!(cfg.tolerance_scale > 0)) errors.push_back("tolerance.scale must be positive");
  cfg.out_dir = get("output.dir", "out");
  cfg.format = get("output.format", "text");
  if (cfg.format != "text" && cfg.format != "json" && cfg.format != "csv")
    errors.push_back("output.format must be text|json|csv");

  if (cfg.task == TaskKind::ReversibleContrast) {
    bool klein_ok = cfg.metric.kind == FinslerMetricSpec::Kind::InterpolatedFunk &&
                    cfg.metric.a == 0.0;
    bool mink_ok =
        cfg.metric.kind == FinslerMetricSpec::Kind::Minkowski && cfg.metric.norm.reversible();
    if (!klein_ok && !mink_ok)
      errors.push_back(
          "reversible-contrast requires metric.kind = klein or a reversible minkowski metric");
    if (cfg.quotient == QuotientKind::Eigenvalue)
      errors.push_back("reversible-contrast applies to hardy|hpw|ckn quotients");
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));

  if (measure_kind == "busemann-hausdorff")
    cfg.measure = MeasureSpec::busemann_hausdorff(cfg.metric);
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace finsler
