#include "hetsec/benchmark.hpp"

#include <limits>

namespace hetsec {

BenchmarkResult solve_benchmark_detailed(const ChannelSet& ch, const NetworkConfig& c, const JmfOptions& opts) {
  BenchmarkResult r;
  // no eavesdropper cap: the inner problem is then max SINR_1 itself
  auto [g, sol] = inner_value(ch, c, std::numeric_limits<double>::infinity(), opts.solver_tol);
  r.sinr_bound = g;
  r.inner = std::move(sol);
  r.solution = extract_precoders(ch, c, r.inner, opts,
                                 [&](const BeamformingSolution& s) { return sinr_mu(ch, s, 0); });
  auto& d = r.solution.diagnostics;
  d.iterations = 1;
  d.objective = g;
  r.solution.ift_sum = interference_at_eve(ch, r.solution);
  return r;
}

BeamformingSolution solve_benchmark(const ChannelSet& ch, const NetworkConfig& c, const JmfOptions& opts) {
  return solve_benchmark_detailed(ch, c, opts).solution;
}

}  // namespace hetsec
