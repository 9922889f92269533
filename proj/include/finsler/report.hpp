#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/quotients.hpp"

namespace finsler {

/// Fixed shortest-roundtrip double formatting so identical runs emit
/// byte-identical artifacts.
inline std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

enum class CheckStatus { Pass, Warn, Fail };

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Warn: return "warn";
    case CheckStatus::Fail: return "fail";
  }
  return "?";
}

struct CheckRow {
  std::string name;
  double expected = 0;
  double observed = 0;
  double tolerance = 0;
  CheckStatus status = CheckStatus::Pass;
  std::string reference;  // human-readable anchor for the identity being checked
};

/// A per-check verification table with a machine-readable JSON twin.
/// Any fail row makes the owning process exit nonzero.
struct VerificationReport {
  std::vector<CheckRow> rows;

  void check_eq(const std::string& name, double expected, double observed, double tol,
                const std::string& reference, bool warn_only = false) {
    CheckStatus st = std::fabs(observed - expected) <= tol
                         ? CheckStatus::Pass
                         : (warn_only ? CheckStatus::Warn : CheckStatus::Fail);
    rows.push_back({name, expected, observed, tol, st, reference});
  }
  /// observed >= bound - tol
  void check_ge(const std::string& name, double bound, double observed, double tol,
                const std::string& reference, bool warn_only = false) {
    CheckStatus st = observed >= bound - tol
                         ? CheckStatus::Pass
                         : (warn_only ? CheckStatus::Warn : CheckStatus::Fail);
    rows.push_back({name, bound, observed, tol, st, reference});
  }
  /// observed <= bound + tol
  void check_le(const std::string& name, double bound, double observed, double tol,
                const std::string& reference, bool warn_only = false) {
    CheckStatus st = observed <= bound + tol
                         ? CheckStatus::Pass
                         : (warn_only ? CheckStatus::Warn : CheckStatus::Fail);
    rows.push_back({name, bound, observed, tol, st, reference});
  }
  void check_true(const std::string& name, bool ok, const std::string& reference,
                  bool warn_only = false) {
    rows.push_back({name, 1.0, ok ? 1.0 : 0.0, 0.0,
                    ok ? CheckStatus::Pass : (warn_only ? CheckStatus::Warn : CheckStatus::Fail),
                    reference});
  }

  int count(CheckStatus s) const {
    int c = 0;
    for (auto& r : rows)
      if (r.status == s) ++c;
    return c;
  }
  bool ok() const { return count(CheckStatus::Fail) == 0; }

  std::string to_text() const {
    std::string out;
    for (auto& r : rows) {
      out += "[" + std::string(status_name(r.status)) + "] " + r.name +
             ": expected " + fmt_double(r.expected) + ", observed " + fmt_double(r.observed) +
             ", tol " + fmt_double(r.tolerance) + "  (" + r.reference + ")\n";
    }
    out += std::to_string(rows.size()) + " checks: " + std::to_string(count(CheckStatus::Pass)) +
           " pass, " + std::to_string(count(CheckStatus::Warn)) + " warn, " +
           std::to_string(count(CheckStatus::Fail)) + " fail\n";
    return out;
  }

  std::string to_csv() const {
    std::string out = "name,expected,observed,tol,status\n";
    for (auto& r : rows) {
      out += r.name + "," + fmt_double(r.expected) + "," + fmt_double(r.observed) + "," +
             fmt_double(r.tolerance) + "," + status_name(r.status) + "\n";
    }
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["checks"] = nlohmann::ordered_json::array();
    for (auto& r : rows) {
      nlohmann::ordered_json row;
      row["name"] = r.name;
      row["expected"] = fmt_double(r.expected);
      row["observed"] = fmt_double(r.observed);
      row["tol"] = fmt_double(r.tolerance);
      row["status"] = status_name(r.status);
      row["reference"] = r.reference;
      j["checks"].push_back(row);
    }
    j["summary"]["total"] = rows.size();
    j["summary"]["pass"] = count(CheckStatus::Pass);
    j["summary"]["warn"] = count(CheckStatus::Warn);
    j["summary"]["fail"] = count(CheckStatus::Fail);
    return j;
  }
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// CSV serialization of a quotient sweep:
/// (alpha, num1, num2, den, quotient, slope, sharp_const).
inline std::string sweep_to_csv(const QuotientSweep& sweep) {
  std::string out = "alpha,num1,num2,den,quotient,slope,sharp_const\n";
  for (size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    std::string slope = i < sweep.slopes.size() ? fmt_double(sweep.slopes[i]) : "";
    out += fmt_double(r.alpha) + "," + fmt_double(r.num1) + "," + fmt_double(r.num2) + "," +
           fmt_double(r.den) + "," + fmt_double(r.quotient) + "," + slope + "," +
           fmt_double(sweep.sharp) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json sweep_to_json(const QuotientSweep& sweep) {
  nlohmann::ordered_json j;
  j["kind"] = quotient_kind_name(sweep.kind);
  j["n"] = sweep.n;
  j["p"] = sweep.p;
  j["q"] = sweep.q;
  j["sharp_const"] = fmt_double(sweep.sharp);
  j["monotone_decreasing"] = sweep.monotone_decreasing;
  j["rows"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < sweep.rows.size(); ++i) {
    const auto& r = sweep.rows[i];
    nlohmann::ordered_json row;
    row["alpha"] = fmt_double(r.alpha);
    row["num1"] = fmt_double(r.num1);
    row["num2"] = fmt_double(r.num2);
    row["den"] = fmt_double(r.den);
    row["quotient"] = fmt_double(r.quotient);
    if (i < sweep.slopes.size()) row["slope"] = fmt_double(sweep.slopes[i]);
    j["rows"].push_back(row);
  }
  return j;
}

inline std::string comparison_to_csv(const ComparisonReport& rep) {
  std::string out = "r,density,bound,ratio\n";
  for (auto& row : rep.rows)
    out += fmt_double(row.r) + "," + fmt_double(row.density) + "," + fmt_double(row.bound) + "," +
           fmt_double(row.ratio) + "\n";
  return out;
}

}  // namespace finsler
