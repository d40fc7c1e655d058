#pragma once

#include <string>
#include <vector>

#include "hetsec/channel.hpp"

namespace hetsec {

struct SolveDiagnostics {
  int iterations = 0;
  std::vector<std::string> solver_statuses;
  double objective = 0.0;
  std::vector<double> trace;  // per-iteration objective (SCA) or outer values (line search)
  int randomized_blocks = 0;  // blocks recovered by Gaussian randomization
  double max_rank_ratio = 0.0;
};

/// Precoders of both tiers. An empty w_fu means the FBSs transmit on an
/// orthogonal band and do not interact with the macrocell; an empty `an`
/// means no artificial noise.
struct BeamformingSolution {
  std::vector<CVec> w_mu;               // [m], length n_m
  std::vector<std::vector<CVec>> w_fu;  // [n][k], length n_f
  CVec an;                              // artificial-noise vector, length n_m or empty
  double ift_sum = 0.0;                 // interference the FBSs deposit at the eavesdropper
  SolveDiagnostics diagnostics;

  double mbs_power() const;
  double fbs_power(int n) const;
};

// User indices are 0-based: MU 0 is the wiretapped user.

double sinr_mu(const ChannelSet& ch, const BeamformingSolution& sol, int m, double sigma2 = 1.0);
double sinr_eve(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2 = 1.0);
double sinr_fu(const ChannelSet& ch, const BeamformingSolution& sol, int n, int k, double sigma2 = 1.0);

/// Sum over cooperative FBSs of |h_{n,E} w_nk|^2.
double interference_at_eve(const ChannelSet& ch, const BeamformingSolution& sol);

/// log2(1 + SINR_0) - log2(1 + SINR_E); may be negative.
double secrecy_rate(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2 = 1.0);
/// max(0, secrecy_rate)
double secrecy_rate_clipped(const ChannelSet& ch, const BeamformingSolution& sol, double sigma2 = 1.0);
double secrecy_rate_from_sinr(double sinr_user, double sinr_eve);

}  // namespace hetsec
