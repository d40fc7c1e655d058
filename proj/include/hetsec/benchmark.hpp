#pragma once

#include "hetsec/stb_jmf.hpp"

namespace hetsec {

struct BenchmarkResult {
  BeamformingSolution solution;
  InnerSdpSolution inner;
  double sinr_bound = 0.0;  // SDP value of max SINR_1
};

/// Rate-only baseline: maximizes the SINR of MU 1 under the same QoS and power
/// constraints as the joint design, ignoring the eavesdropper. One SDP after
/// the Charnes-Cooper change of variables; scored afterwards by its secrecy rate.
BenchmarkResult solve_benchmark_detailed(const ChannelSet& ch, const NetworkConfig& config, const JmfOptions& opts = {});
BeamformingSolution solve_benchmark(const ChannelSet& ch, const NetworkConfig& config, const JmfOptions& opts = {});

}  // namespace hetsec
