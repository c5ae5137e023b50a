// qnb - batch front end: pmf / counts / simulate / kernels tables, verify suites.
//
// Exit codes: 0 ok, 1 a verification check failed, 2 bad invocation or a
// refused parameter combination. Every error is one stderr line of the form
// "qnb: error[<code>]: <reason>".
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnb/qnb.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct RunConfig {
  // spec
  std::string scheme = "type1";
  int k = 1;
  int r = 1;
  int ell = 0;
  // params
  double theta = 0.5;
  double q = 1.0;
  // output
  std::string format = "csv";
  std::string output;
  // tables
  double tail_eps = 1e-8;
  int n_cap = 2000;
  bool dual = false;
  bool direct = false;
  int n = 10;
  // simulate
  long replications = 100000;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  // kernels
  std::string family = "A";
  std::string r_range = "1";
  std::string s_range = "0:10";
  std::string t_range;
  // verify
  bool worked_examples = false;
  qnb::VerifyOptions verify;
};

int fail(const std::string& code, const std::string& reason) {
  std::string line = reason;
  for (auto& c : line)
    if (c == '\n') c = ' ';
  std::cerr << "qnb: error[" << code << "]: " << line << "\n";
  return code == "check-failed" ? kCheckFailed : kUsage;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
  if (!out) throw qnb::parameter_error("cannot open output file '" + cfg.output + "'");
  out << text;
  if (!out) throw qnb::parameter_error("cannot write output file '" + cfg.output + "'");
}

qnb::RunSpec spec_of(const RunConfig& cfg) {
  qnb::RunSpec spec{cfg.k, cfg.r, qnb::Scheme::parse(cfg.scheme, cfg.ell)};
  spec.validate();
  return spec;
}

qnb::ModelParams params_of(const RunConfig& cfg) {
  qnb::ModelParams p{cfg.theta, cfg.q};
  p.validate();
  return p;
}

void warn_truncated(const qnb::PmfTable& t) {
  if (t.truncated)
    std::cerr << "qnb: warning[truncated]: stopped at n=" << t.max_n() << " with tail_bound=" << qnb::io::json_number(t.tail_bound)
              << "\n";
}

// "a" or "a:b", inclusive.
std::pair<int, int> parse_range(const std::string& text, const std::string& what) {
  try {
    const auto colon = text.find(':');
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const int hi = std::stoi(b, &used);
    if (used != b.size() || hi < lo) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw qnb::parameter_error("bad " + what + " range '" + text + "' (want N or A:B)");
  }
}

int cmd_pmf(const RunConfig& cfg) {
  const auto route = cfg.dual ? qnb::Route::dual : cfg.direct ? qnb::Route::direct : qnb::Route::automatic;
  const auto t = qnb::build_pmf_table(spec_of(cfg), params_of(cfg), cfg.tail_eps, cfg.n_cap, route);
  emit(cfg, cfg.format == "json" ? qnb::to_json(t) : qnb::to_csv(t));
  warn_truncated(t);
  return kOk;
}

int cmd_counts(const RunConfig& cfg) {
  const auto t = qnb::build_count_table(qnb::Scheme::parse(cfg.scheme, cfg.ell), cfg.n, cfg.k, params_of(cfg));
  emit(cfg, cfg.format == "json" ? qnb::to_json(t) : qnb::to_csv(t));
  return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const qnb::TrialSampler sampler(params_of(cfg), cfg.seed, cfg.stream);
  const auto t = qnb::monte_carlo_waiting_pmf(spec_of(cfg), sampler, cfg.replications, cfg.n_cap);
  emit(cfg, cfg.format == "json" ? qnb::to_json(t) : qnb::to_csv(t));
  warn_truncated(t);
  return kOk;
}

int cmd_kernels(const RunConfig& cfg) {
  const qnb::Family family = qnb::parse_family(cfg.family);
  const auto [r_lo, r_hi] = parse_range(cfg.r_range, "r");
  const auto [s_lo, s_hi] = parse_range(cfg.s_range, "s");
  qnb::KernelCache cache(cfg.q);
  const bool json = cfg.format == "json";
  std::string out = json ? "[" : "family,k,ell,r,s,t,value\n";
  bool first = true;
  for (int r = r_lo; r <= r_hi; ++r)
    for (int s = s_lo; s <= s_hi; ++s) {
      // every count is at most s (or, for the capped family, t <= r)
      const auto [t_lo, t_hi] = cfg.t_range.empty() ? std::pair{0, std::max(s, r)} : parse_range(cfg.t_range, "t");
      for (int t = t_lo; t <= t_hi; ++t) {
        const qnb::KernelKey key{family, cfg.k, family == qnb::Family::E ? cfg.ell : 0, r, s, t};
        const double v = qnb::kernel(key, cache);
        if (json) {
          out += std::string(first ? "" : ",") + "{\"family\":\"" + cfg.family + "\",\"k\":" + std::to_string(key.k) +
                 ",\"ell\":" + std::to_string(key.ell) + ",\"r\":" + std::to_string(r) + ",\"s\":" +
                 std::to_string(s) + ",\"t\":" + std::to_string(t) + ",\"value\":" + qnb::io::json_number(v) + "}";
        } else {
          out += cfg.family + "," + std::to_string(key.k) + "," + std::to_string(key.ell) + "," + std::to_string(r) +
                 "," + std::to_string(s) + "," + std::to_string(t) + "," + qnb::io::csv_number(v) + "\n";
        }
        first = false;
      }
    }
  if (json) out += "]\n";
  emit(cfg, out);
  return kOk;
}

std::string report_csv(const qnb::VerifyReport& rep) {
  std::string out = "check,passed,points,max_deviation,tolerance\n";
  for (const auto& c : rep.checks)
    out += c.name + "," + (c.passed() ? "true" : "false") + "," + std::to_string(c.points) + "," +
           qnb::io::csv_number(c.max_deviation) + "," + qnb::io::csv_number(c.tolerance) + "\n";
  return out;
}

int cmd_verify(const RunConfig& cfg) {
  qnb::VerifyReport rep;
  if (cfg.worked_examples)
    rep.checks.push_back(qnb::check_worked_examples());
  else
    rep = qnb::run_verification(cfg.verify);
  emit(cfg, cfg.format == "csv" ? report_csv(rep) : rep.to_json());
  int status = kOk;
  for (const auto& c : rep.checks)
    for (const auto& f : c.failures) status = fail("check-failed", c.name + " " + f);
  std::cerr << "qnb: verify " << (rep.passed() ? "passed" : "FAILED") << " (" << rep.checks.size() << " checks)\n";
  return status;
}

void add_spec_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--scheme", cfg.scheme, "type1 | type2 | type3 | type4 | loverlap")
      ->check(CLI::IsMember({"type1", "type2", "type3", "type4", "loverlap"}));
  sub->add_option("--k", cfg.k, "run length");
  sub->add_option("--ell", cfg.ell, "overlap for loverlap, 0 <= ell < k");
}

void add_param_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--theta", cfg.theta, "success probability of the first trial, 0 < theta < 1");
  sub->add_option("--q", cfg.q, "geometric decay after each failure, 0 < q <= 1");
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--output,-o", cfg.output, "write here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Exact waiting-time and run-count distributions for q-geometric trials"};
  app.require_subcommand(1);

  auto* pmf = app.add_subcommand("pmf", "waiting-time PMF/CDF table");
  add_spec_options(pmf, cfg);
  pmf->add_option("--r", cfg.r, "occurrence index");
  add_param_options(pmf, cfg);
  pmf->add_option("--tail-eps", cfg.tail_eps, "stop once the CDF reaches 1 - tail_eps");
  pmf->add_option("--n-cap", cfg.n_cap, "never tabulate beyond this n");
  auto* dual = pmf->add_flag("--dual", cfg.dual, "difference the count-distribution CDF");
  pmf->add_flag("--direct", cfg.direct, "sum the waiting-time formula")->excludes(dual);
  add_output_options(pmf, cfg);

  auto* counts = app.add_subcommand("counts", "run-count distribution in n trials");
  add_spec_options(counts, cfg);
  counts->add_option("--n", cfg.n, "number of trials");
  add_param_options(counts, cfg);
  add_output_options(counts, cfg);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo waiting-time table with standard errors");
  add_spec_options(simulate, cfg);
  simulate->add_option("--r", cfg.r, "occurrence index");
  add_param_options(simulate, cfg);
  simulate->add_option("--replications", cfg.replications, "number of simulated paths (>= 1000)");
  simulate->add_option("--seed", cfg.seed, "generator seed");
  simulate->add_option("--stream", cfg.stream, "independent stream id");
  simulate->add_option("--n-cap", cfg.n_cap, "censor paths at this many trials");
  add_output_options(simulate, cfg);

  auto* kernels = app.add_subcommand("kernels", "dump kernel values over an (r, s, t) grid");
  kernels->add_option("--family", cfg.family, "A | B | C | D | E | Dcap");
  kernels->add_option("--k", cfg.k, "run length");
  kernels->add_option("--ell", cfg.ell, "overlap (family E)");
  kernels->add_option("--r", cfg.r_range, "cells: N or A:B");
  kernels->add_option("--s", cfg.s_range, "total: N or A:B");
  kernels->add_option("--t", cfg.t_range, "count: N or A:B (default 0:max(s,r))");
  kernels->add_option("--q", cfg.q, "0 < q <= 1");
  add_output_options(kernels, cfg);

  auto* verify = app.add_subcommand("verify", "run the invariant suites; exit 1 on any failure");
  cfg.format = "json";
  auto& vo = cfg.verify;
  verify->add_flag("--worked-examples,--paper-examples", cfg.worked_examples,
                   "only reproduce the illustration-sequence counts and waiting times");
  verify->add_option("--k-max", vo.grid.k_max);
  verify->add_option("--r-max", vo.grid.r_max);
  verify->add_option("--n-max", vo.grid.n_max, "enumeration depth (<= 22)");
  verify->add_option("--thetas", vo.grid.thetas)->delimiter(',');
  verify->add_option("--qs", vo.grid.qs)->delimiter(',');
  verify->add_option("--kernel-k-max", vo.grid.kernel_k_max);
  verify->add_option("--kernel-r-max", vo.grid.kernel_r_max);
  verify->add_option("--kernel-s-max", vo.grid.kernel_s_max);
  verify->add_option("--kernel-t-max", vo.grid.kernel_t_max);
  verify->add_option("--kernel-qs", vo.grid.kernel_qs)->delimiter(',');
  verify->add_option("--kernel-tol", vo.kernel_rel_tol);
  verify->add_option("--oracle-tol", vo.oracle_tol);
  verify->add_option("--route-tol", vo.route_tol);
  verify->add_option("--limit-tol", vo.limit_tol);
  verify->add_option("--coincidence-tol", vo.coincidence_tol);
  verify->add_option("--duality-tol", vo.duality_tol);
  // harness self-test: shifts every direct-route value
  verify->add_option("--inject-perturbation", vo.perturbation)->group("");
  add_output_options(verify, cfg);

  // table commands default to csv, verify to json
  for (auto* sub : {pmf, counts, simulate, kernels}) sub->preparse_callback([&](std::size_t) { cfg.format = "csv"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*pmf) return cmd_pmf(cfg);
    if (*counts) return cmd_counts(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*kernels) return cmd_kernels(cfg);
    return cmd_verify(cfg);
  } catch (const qnb::unsupported_scheme& e) {
    return fail("unsupported", e.what());
  } catch (const qnb::size_guard_error& e) {
    return fail("size-guard", e.what());
  } catch (const qnb::parameter_error& e) {
    return fail("parameter", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
