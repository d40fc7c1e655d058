#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hetsec/conic/problem.hpp"
#include "hetsec/conic/solver.hpp"
#include "hetsec/metrics.hpp"

namespace hetsec {

/// Fractional program for a fixed eavesdropper SINR cap tau, after the
/// Charnes-Cooper change of variables X = zeta W. The PSD blocks are stored
/// normalized: X_m = mu_scale * Y_m and X_nk = fu_scale * Y_nk.
struct InnerSdp {
  conic::ConicProblem problem;
  std::vector<conic::VarId> y_mu;               // [m]
  std::vector<std::vector<conic::VarId>> y_fu;  // [n][k]
  conic::VarId zeta;
  double mu_scale = 1.0, fu_scale = 1.0;
  std::vector<int> psd_mu;                      // constraint index of each PSD membership
  std::vector<std::vector<int>> psd_fu;
  int mbs_power = -1;
  std::vector<int> fbs_power;
};

/// tau = +inf drops the eavesdropper cap, leaving max SINR_0 under QoS and power.
InnerSdp build_inner_sdp(const ChannelSet& ch, const NetworkConfig& config, double tau);

struct InnerSdpSolution {
  std::vector<CMat> x_mu;               // X_m
  std::vector<std::vector<CMat>> x_fu;  // X_nk
  double zeta = 0.0;
  double objective = 0.0;               // Tr(H_0 X_0) = G(tau)
  // multipliers of the PSD memberships, in X units
  std::vector<CMat> g_mu;
  std::vector<std::vector<CMat>> g_fu;
  double tau = 0.0;
};

/// G(tau) and the maximizer. Interior-point solutions sit in the middle of the
/// optimal face; the blocks are then walked to lower rank without changing the
/// objective or any tight constraint. Throws QosInfeasible when the QoS targets cannot
/// be met (this does not depend on tau) and NumericalFailure when the solver breaks down.
std::pair<double, InnerSdpSolution> inner_value(const ChannelSet& ch, const NetworkConfig& config, double tau,
                                                double solver_tol = 1e-9);

struct GoldenSearchTrace {
  std::vector<std::pair<double, double>> evaluations;  // (x, f(x))
  std::vector<std::pair<double, double>> brackets;
};

/// Golden-section search for a maximizer of a unimodal f on [lo, hi]; stops
/// when the bracket is no wider than eps and returns its midpoint.
double golden_section(const std::function<double(double)>& f, double lo, double hi, double eps,
                      GoldenSearchTrace* trace = nullptr);

/// lambda_2 / lambda_1 of a Hermitian PSD matrix (0 when X = 0).
std::pair<double, bool> verify_rank_one(const CMat& x, double tol = 1e-6);

/// Score of a candidate precoder: nullopt when infeasible, larger is better.
using CandidateScore = std::function<std::optional<double>(const CVec&)>;

/// Precoder from W = X / zeta: the principal eigenpair when W is rank one
/// within `rank_tol`, otherwise the best feasible of `trials` draws from
/// CN(0, W), each rescaled to power Tr(W). Throws NumericalFailure when no
/// draw is feasible.
CVec rank_one_extract(const CMat& x, double zeta, int trials, const CandidateScore& score, std::uint64_t seed,
                      double rank_tol = 1e-6, bool* randomized = nullptr);

struct KktReport {
  std::vector<double> complementarity;  // ||G_b X_b||_F, MU blocks then FU blocks
  std::vector<double> dual_min_eig;     // smallest eigenvalue of each G_b
  std::vector<double> rank_ratio;       // lambda_2 / lambda_1 of each X_b
  double mbs_power_gap = 0.0;           // |sum Tr X_m - P_M zeta| / (P_M zeta)
  std::vector<double> fbs_power_gap;    // per FBS, same normalization
  double worst_complementarity() const;
  double worst_dual_eig() const;
  bool pass(double tol) const;
};

double complementarity_residual(const CMat& g, const CMat& x);
KktReport verify_kkt(const InnerSdpSolution& sol, const NetworkConfig& config);

struct JmfOptions {
  int grid_points = 20;
  double search_eps = 1e-4;  // bracket width in log(1 + tau)
  int randomization_trials = 100;
  std::uint64_t randomization_seed = 1;
  double rank_tol = 1e-6;
  double solver_tol = 1e-9;
};

struct JmfResult {
  BeamformingSolution solution;
  InnerSdpSolution inner;
  double tau = 0.0;
  double outer_value = 0.0;  // (1 + G(tau)) / (1 + tau)
  GoldenSearchTrace search;  // x is log(1 + tau)
  KktReport kkt;
  int sdp_solves = 0;
};

/// Outer objective (1 + G(tau)) / (1 + tau); -inf when the inner problem fails.
double outer_value(const ChannelSet& ch, const NetworkConfig& config, double tau, double solver_tol = 1e-9);

/// Largest admissible eavesdropper SINR: Tr(H_0) P_M.
double tau_max(const ChannelSet& ch, const NetworkConfig& config);

JmfResult solve_stb_jmf_detailed(const ChannelSet& ch, const NetworkConfig& config, const JmfOptions& opts = {});
BeamformingSolution solve_stb_jmf(const ChannelSet& ch, const NetworkConfig& config, const JmfOptions& opts = {});

/// What randomized candidates are ranked by (secrecy rate when empty).
using SolutionScore = std::function<double(const BeamformingSolution&)>;

/// Precoders for every block of an inner solution; Gaussian randomization
/// for blocks that are not rank one, scored under QoS.
BeamformingSolution extract_precoders(const ChannelSet& ch, const NetworkConfig& config, const InnerSdpSolution& sol,
                                      const JmfOptions& opts, const SolutionScore& objective = {});

}  // namespace hetsec
