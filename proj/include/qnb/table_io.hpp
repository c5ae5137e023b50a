// qnb/table_io.hpp - CSV / JSON artifacts for PMF tables and count distributions
//
// JSON numbers carry 17 significant digits, so parsing them back gives the
// same doubles; CSV is for people and carries 12.
#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qnb/dist.hpp"
#include "qnb/error.hpp"

namespace qnb {

namespace io {

inline std::string number(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string json_number(double v) { return number(v, 17); }
inline std::string csv_number(double v) { return number(v, 12); }

inline std::string json_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += json_number(values[i]);
  }
  return out + "]";
}

inline std::string json_spec(const RunSpec& spec) {
  return "{\"scheme\":\"" + spec.scheme.name() + "\",\"k\":" + std::to_string(spec.k) +
         ",\"r\":" + std::to_string(spec.r) + ",\"ell\":" + std::to_string(spec.scheme.ell) + "}";
}

inline std::string json_params(const ModelParams& p) {
  return "{\"theta\":" + json_number(p.theta) + ",\"q\":" + json_number(p.q) + "}";
}

}  // namespace io

/// Header `n,pmf,cdf` (plus `stderr` for simulated tables), LF line endings.
inline std::string to_csv(const PmfTable& table) {
  std::string out = table.std_errors ? "n,pmf,cdf,stderr\n" : "n,pmf,cdf\n";
  const auto cdf = table.cdf();
  for (std::size_t i = 0; i < table.probs.size(); ++i) {
    out += std::to_string(table.support_min + static_cast<int>(i)) + "," + io::csv_number(table.probs[i]) + "," +
           io::csv_number(cdf[i]);
    if (table.std_errors) out += "," + io::csv_number((*table.std_errors)[i]);
    out += "\n";
  }
  return out;
}

/// One object: spec, params, support_min, probs, tail_bound, truncated
/// (and stderr for simulated tables).
inline std::string to_json(const PmfTable& table) {
  std::string out = "{\"spec\":" + io::json_spec(table.spec) + ",\"params\":" + io::json_params(table.params) +
                    ",\"support_min\":" + std::to_string(table.support_min) +
                    ",\"probs\":" + io::json_array(table.probs) + ",\"tail_bound\":" + io::json_number(table.tail_bound) +
                    ",\"truncated\":" + (table.truncated ? "true" : "false");
  if (table.std_errors) out += ",\"stderr\":" + io::json_array(*table.std_errors);
  return out + "}\n";
}

inline PmfTable pmf_table_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    PmfTable t;
    const auto& s = j.at("spec");
    t.spec = {s.at("k").get<int>(), s.at("r").get<int>(),
              Scheme::parse(s.at("scheme").get<std::string>(), s.value("ell", 0))};
    t.params = {j.at("params").at("theta").get<double>(), j.at("params").at("q").get<double>()};
    t.support_min = j.at("support_min").get<int>();
    t.probs = j.at("probs").get<std::vector<double>>();
    t.tail_bound = j.at("tail_bound").get<double>();
    t.truncated = j.at("truncated").get<bool>();
    if (j.contains("stderr")) t.std_errors = j.at("stderr").get<std::vector<double>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw parameter_error(std::string("malformed table JSON: ") + e.what());
  }
}

/// Run-count distribution in n trials, P(count = x) for x = 0..probs.size()-1.
struct CountTable {
  Scheme scheme;
  int k = 1;
  int n = 0;
  ModelParams params;
  std::vector<double> probs;
};

inline constexpr int kMaxCountTrials = 300;

inline CountTable build_count_table(Scheme scheme, int n, int k, const ModelParams& params) {
  scheme.validate(k);
  params.validate();
  if (n < 0) throw parameter_error("n must be >= 0");
  // the kernel table grows like n^2 * max_count
  if (n > kMaxCountTrials) throw size_guard_error("count table refused: n above 300");
  DistContext ctx(params);
  CountTable t{scheme, k, n, params, {}};
  for (int x = 0; x <= max_count(scheme, n, k); ++x) t.probs.push_back(ctx.count_pmf(scheme, x, n, k));
  return t;
}

inline std::string to_csv(const CountTable& t) {
  std::string out = "x,pmf\n";
  for (std::size_t x = 0; x < t.probs.size(); ++x) out += std::to_string(x) + "," + io::csv_number(t.probs[x]) + "\n";
  return out;
}

inline std::string to_json(const CountTable& t) {
  return "{\"scheme\":\"" + t.scheme.name() + "\",\"ell\":" + std::to_string(t.scheme.ell) +
         ",\"k\":" + std::to_string(t.k) + ",\"n\":" + std::to_string(t.n) +
         ",\"params\":" + io::json_params(t.params) + ",\"probs\":" + io::json_array(t.probs) + "}\n";
}

}  // namespace qnb
