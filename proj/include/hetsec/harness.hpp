#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hetsec/channel.hpp"
#include "hetsec/metrics.hpp"

namespace hetsec {

/// Scheme names accepted by the runner.
const std::vector<std::string>& known_schemes();

struct Sweep {
  std::string param = "p_m_db";  // p_m_db or p_f_db
  std::vector<double> values;    // dB
};

/// "p_m_db=30:45:3" (inclusive range) or "p_f_db=20,30,40".
Sweep parse_sweep(const std::string& text);

struct ExperimentSpec {
  NetworkConfig base;
  Sweep sweep;
  std::vector<std::string> schemes;
  int trials = 100;
  std::uint64_t seed = 1;
  std::string output = "results.csv";
  double random_an_fraction = 0.1;
  double error_budget = 0.1;  // tolerated share of failed rows before exit code 2
  bool timing = true;         // false writes solve_ms = 0 so reruns are byte-identical
  bool trace = false;         // also emit one row per STB-OM iteration (status "trace")

  void validate() const;  // throws ConfigError
};

/// YAML document; unknown keys are errors. Missing keys keep the defaults.
ExperimentSpec parse_spec_yaml(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

struct ResultRow {
  std::string scheme;
  std::string sweep_param;
  double sweep_value_db = 0.0;
  int trial = 0;
  double secrecy_rate_bits = 0.0;
  double sinr_mu1 = 0.0;
  double sinr_mu2 = 0.0;  // NaN when M = 1
  double sinr_eve = 0.0;
  double sinr_fu_mean = 0.0;  // NaN when the FBSs are not part of the scheme
  int iterations = 0;
  double solve_ms = 0.0;
  std::string status;  // ok, ok_gamma_fu_0.5, trace, qos_infeasible, numerical_failure, degenerate_channel, error
  friend bool operator==(const ResultRow&, const ResultRow&);
};

bool solved(const ResultRow& row);  // status ok or ok_gamma_fu_0.5

struct ResultTable {
  std::vector<ResultRow> rows;
};

extern const char* const kCsvHeader;

/// Channels of one trial; the same draw for every scheme and sweep value.
ChannelSet trial_channels(const NetworkConfig& config, std::uint64_t seed, int trial);

/// Runs one scheme on one channel draw and fills every metric column.
/// Solver errors become status values; nothing is thrown for them. The
/// precoders are copied to `solution` when it is given and the scheme solved.
std::vector<ResultRow> run_scheme(const std::string& scheme, const ChannelSet& ch, const NetworkConfig& config,
                                  const ExperimentSpec& spec, int trial, BeamformingSolution* solution = nullptr);

using Progress = std::function<void(const ResultRow&)>;
ResultTable run_experiment(const ExperimentSpec& spec, const Progress& progress = {});

/// NetworkConfig at one sweep point.
NetworkConfig at_sweep_point(const NetworkConfig& base, const std::string& param, double value_db);

std::string to_csv(const ResultTable& table);
ResultTable parse_csv(const std::string& text);
void write_csv(const ResultTable& table, const std::string& path);
ResultTable read_csv(const std::string& path);

struct PointSummary {
  int solved = 0;
  int failed = 0;
  double mean_secrecy = 0.0;
  double mean_fu_sinr = 0.0;  // over solved rows with a finite value; NaN if none
  double mean_iterations = 0.0;
};

/// Means over solved rows, keyed by (scheme, sweep_param, sweep value); trace rows are skipped.
using SummaryKey = std::tuple<std::string, std::string, double>;
std::map<SummaryKey, PointSummary> summarize(const ResultTable& table);

/// Share of non-trace rows that did not solve.
double failure_rate(const ResultTable& table);

/// Figure names for the `figure` subcommand: fig3, fig6 ... fig10. Several specs
/// when a figure needs a two-dimensional sweep.
std::vector<ExperimentSpec> figure_specs(const std::string& name, int trials, std::uint64_t seed);
ResultTable run_figure(const std::string& name, int trials, std::uint64_t seed, const Progress& progress = {});

/// Invariant checks on `trials` fresh channel draws; returns the violations found.
std::vector<std::string> verify_invariants(const NetworkConfig& config, int trials, std::uint64_t seed);

}  // namespace hetsec
