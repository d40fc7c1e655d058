#pragma once

#include <vector>

#include "hetsec/linalg.hpp"
#include "hetsec/metrics.hpp"
#include "hetsec/stb_om.hpp"

namespace hetsec {

/// What FBS n knows locally.
struct FbsLocalProblem {
  CMat g;                 // M x n_f, channels FBS_n -> every MU
  CRow h_e;               // FBS_n -> eavesdropper
  std::vector<CRow> h_fu; // [k] FBS_n -> its own FUs
  double p_f = 0.0;
};

FbsLocalProblem local_problem(const ChannelSet& ch, const NetworkConfig& config, int n);

struct FbsPrecoders {
  std::vector<CVec> w;     // [k]
  double objective = 0.0;  // sum_k |h_e w_k|^2
};

/// Maximizes the interference at the eavesdropper inside the null space of g,
/// with the own FUs zero-forced against each other. One SOCP per stream
/// (maximize Re(h_e V x_k) over the power ball); the best stream gets the
/// whole budget, the others stay silent.
FbsPrecoders solve_fbs_socp(const FbsLocalProblem& prob, double tol = 1e-9);

/// K = 1 only: w = V x with x along the leading generalized eigenvector of
/// (V^H h_e^H h_e V, V^H V), scaled to full power.
CVec solve_fbs_closed_form(const FbsLocalProblem& prob);

/// Largest generalized eigenvalue of (V^H h_e^H h_e V, V^H V).
double fbs_lambda_max(const FbsLocalProblem& prob);

/// Interference temperature of FBS n at the eavesdropper.
double compute_ift(const ChannelSet& ch, int n, const std::vector<CVec>& precoders);

struct StbSmfOptions {
  StbOmOptions om;
  bool closed_form = true;  // used when K = 1
};

/// Cooperative FBSs maximize their leakage to the eavesdropper, then the MBS
/// runs STB-OM against the resulting interference floor.
BeamformingSolution solve_stb_smf(const ChannelSet& ch, const NetworkConfig& config, const StbSmfOptions& opts = {});

}  // namespace hetsec
