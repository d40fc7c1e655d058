// hetsec: run sweeps, check invariants, emit figure CSVs.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "hetsec/harness.hpp"

using namespace hetsec;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const ResultTable& t) {
  std::fprintf(stderr, "%-10s %-16s %8s %8s %8s %12s %10s\n", "scheme", "param", "value", "solved", "failed",
               "secrecy", "fu_sinr");
  for (const auto& [key, s] : summarize(t)) {
    const auto& [scheme, param, v] = key;
    std::fprintf(stderr, "%-10s %-16s %8.2f %8d %8d %12.5f %10.4f\n", scheme.c_str(), param.c_str(), v, s.solved,
                 s.failed, s.mean_secrecy, s.mean_fu_sinr);
  }
}

int finish(const ResultTable& t, const std::string& out, double budget) {
  write_csv(t, out);
  print_summary(t);
  const double fr = failure_rate(t);
  std::fprintf(stderr, "wrote %zu rows to %s; failure rate %.3f\n", t.rows.size(), out.c_str(), fr);
  if (fr > budget) {
    std::fprintf(stderr, "failure rate above budget %.3f\n", budget);
    return 2;
  }
  return 0;
}

Progress progress_printer(bool quiet) {
  if (quiet) return {};
  return [](const ResultRow& r) {
    if (r.status == "trace") return;
    std::fprintf(stderr, "%s %s=%g trial %d: %s R=%.4f\n", r.scheme.c_str(), r.sweep_param.c_str(), r.sweep_value_db,
                 r.trial, r.status.c_str(), r.secrecy_rate_bits);
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secrecy beamforming for two-tier networks"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "no per-row progress");

  auto* run = app.add_subcommand("run", "run a sweep and write a CSV");
  std::string config_path, sweep_text, schemes_text, out;
  int trials = -1;
  std::int64_t seed = -1;
  bool no_timing = false;
  run->add_option("--config", config_path, "YAML experiment file");
  run->add_option("--sweep", sweep_text, "p_m_db=30:45:3 or p_f_db=20,30,40");
  run->add_option("--schemes", schemes_text, "comma separated scheme names");
  run->add_option("--trials", trials);
  run->add_option("--seed", seed);
  run->add_option("--out", out, "CSV path");
  run->add_flag("--no-timing", no_timing, "write solve_ms = 0 for byte-identical reruns");

  auto* verify = app.add_subcommand("verify", "check invariants on fresh channel draws");
  int v_trials = 5;
  std::int64_t v_seed = 12345;
  double v_pm = 40.0, v_pf = 40.0;
  verify->add_option("--trials", v_trials);
  verify->add_option("--seed", v_seed);
  verify->add_option("--p-m-db", v_pm);
  verify->add_option("--p-f-db", v_pf);

  auto* figure = app.add_subcommand("figure", "CSV for a named figure (fig3, fig6 ... fig10)");
  std::string fig_name, fig_out;
  int f_trials = 100;
  std::int64_t f_seed = 1;
  double f_budget = 0.1;
  figure->add_option("name", fig_name)->required();
  figure->add_option("--trials", f_trials);
  figure->add_option("--seed", f_seed);
  figure->add_option("--out", fig_out, "CSV path (default <name>.csv)");
  figure->add_option("--error-budget", f_budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      ExperimentSpec spec;
      if (!config_path.empty()) spec = load_spec(config_path);
      if (!sweep_text.empty()) spec.sweep = parse_sweep(sweep_text);
      if (!schemes_text.empty()) spec.schemes = split_list(schemes_text);
      if (trials >= 0) spec.trials = trials;
      if (seed >= 0) spec.seed = static_cast<std::uint64_t>(seed);
      if (!out.empty()) spec.output = out;
      if (no_timing) spec.timing = false;
      if (spec.sweep.values.empty()) spec.sweep = parse_sweep("p_m_db=30:45:3");
      if (spec.schemes.empty()) spec.schemes = {"stb_smf", "stb_jmf", "stb_om", "benchmark"};
      spec.validate();
      const ResultTable t = run_experiment(spec, progress_printer(quiet));
      return finish(t, spec.output, spec.error_budget);
    }
    if (*verify) {
      NetworkConfig c;
      c.p_m = db_to_linear(v_pm);
      c.p_f = db_to_linear(v_pf);
      if (v_trials < 1) throw ConfigError("trials must be at least 1");
      const auto bad = verify_invariants(c, v_trials, static_cast<std::uint64_t>(v_seed));
      for (const auto& b : bad) std::fprintf(stderr, "violation: %s\n", b.c_str());
      std::fprintf(stderr, "%d trials, %zu violations\n", v_trials, bad.size());
      return bad.empty() ? 0 : 2;
    }
    if (*figure) {
      if (f_trials < 1) throw ConfigError("trials must be at least 1");
      figure_specs(fig_name, f_trials, static_cast<std::uint64_t>(f_seed));  // name check before any work
      const ResultTable t = run_figure(fig_name, f_trials, static_cast<std::uint64_t>(f_seed), progress_printer(quiet));
      return finish(t, fig_out.empty() ? fig_name + ".csv" : fig_out, f_budget);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
