#pragma once

#include <cstdint>
#include <vector>

#include "hetsec/types.hpp"

namespace hetsec {

/// Scenario parameters. Powers and SINR targets are linear and normalized to
/// the noise power; use db_to_linear() for dB inputs.
struct NetworkConfig {
  int n_m = 10;     // MBS antennas
  int n_f = 4;      // antennas per FBS
  int m_users = 2;  // MUs; MU 1 is the wiretapped one
  int k_users = 1;  // FUs per cooperative FBS
  int n_coop = 2;   // cooperative FBSs
  double p_m = db_to_linear(40.0);
  double p_f = db_to_linear(40.0);
  double sigma2 = 1.0;
  std::vector<double> gamma_mu = {1.0};                   // MUs 2..M
  std::vector<std::vector<double>> gamma_fu = {{0.6}, {0.6}};  // [n][k]
  double cell_radius_m = 500.0;
  double fbs_intensity = 1e-5;  // per square meter

  /// Throws ConfigError on a violated invariant.
  void validate() const;
  /// Additionally requires n_m > n_f > m_users.
  void validate_for_null_space() const;

  /// Resize the QoS target lists to the current user counts, filling with
  /// the given values.
  void set_uniform_targets(double gamma_mu_value, double gamma_fu_value);
};

/// Every channel of one realization; rows are 1 x (transmit antennas).
struct ChannelSet {
  std::vector<CRow> h_mu;                              // [m]        MBS -> MU_m
  CRow h_e;                                            //            MBS -> eavesdropper
  std::vector<std::vector<CRow>> h_fbs_mu;             // [n][m]     FBS_n -> MU_m
  std::vector<CRow> h_fbs_e;                           // [n]        FBS_n -> eavesdropper
  std::vector<std::vector<CRow>> h_mbs_fu;             // [n][k]     MBS -> FU_nk
  std::vector<std::vector<std::vector<CRow>>> h_fbs_fu;  // [p][n][k] FBS_p -> FU_nk

  int m_users() const { return static_cast<int>(h_mu.size()); }
  int n_coop() const { return static_cast<int>(h_fbs_e.size()); }
  int k_users() const { return h_mbs_fu.empty() ? 0 : static_cast<int>(h_mbs_fu[0].size()); }

  /// Throws DimensionError when the shapes disagree with `config`.
  void check(const NetworkConfig& config) const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Placement {
  std::vector<Point> fbs_positions;
};

/// Seed for an independent random stream, derived with SplitMix64 from a base
/// seed and a stream id. Every random entity (a channel vector, the FBS
/// layout, a user position) draws from its own stream, so adding or removing
/// entities never shifts the draws of the others.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// i.i.d. CN(0,1) entries for every channel in the set. Stream ids are keyed
/// by the global FBS indices in `fbs_ids` (default 0..N-1), so a cooperative
/// FBS keeps its channels whichever subset is selected.
ChannelSet sample_rayleigh_channels(const NetworkConfig& config, std::uint64_t seed,
                                    const std::vector<int>& fbs_ids = {});

/// Homogeneous PPP of intensity fbs_intensity on the disk of radius cell_radius_m.
Placement sample_fbs_placement(const NetworkConfig& config, std::uint64_t seed);

/// Uniform point on the disk of radius r.
Point sample_uniform_on_disk(double r, std::uint64_t seed);

/// Indices of the `count` FBSs closest to `eve`, nearest first. Throws
/// ConfigError if the placement holds fewer than `count` FBSs.
std::vector<int> nearest_fbs(const Placement& placement, Point eve, int count);

}  // namespace hetsec
