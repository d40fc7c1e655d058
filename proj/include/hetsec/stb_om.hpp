#pragma once

#include <vector>

#include "hetsec/conic/problem.hpp"
#include "hetsec/conic/solver.hpp"
#include "hetsec/metrics.hpp"

namespace hetsec {

/// Expansion point of the successive convex approximation.
struct TaylorPoint {
  std::vector<CVec> w_tilde;  // [m]
  CVec z_tilde;               // artificial noise; empty when AN is off
  double t1_tilde = 1.0;      // > 1
  double t2_tilde = 1.0;      // in (0, 1]
};

struct StbOmOptions {
  int max_iters = 30;
  double rel_tol = 1e-4;     // on t0
  double ift_sum = 0.0;      // interference from cooperative FBSs at the eavesdropper
  bool use_an = false;
  double an_init_fraction = 0.1;  // share of the spare power given to the initial AN vector
  double solver_tol = 1e-8;
};

/// Affine functional Re(grad^H w) + coef_x * x + constant.
struct AffineForm {
  CVec grad;
  double coef_x = 0.0;
  double constant = 0.0;

  double evaluate(const CVec& w, double x) const;
};

/// w^H A w / (x - a); throws DimensionError unless x > a.
double quad_over_lin(const CMat& A, double a, const CVec& w, double x);

/// First-order expansion of quad_over_lin around (w_tilde, x_tilde):
///   2 Re(w~^H A w)/(x~ - a) - w~^H A w~ (x - a)/(x~ - a)^2
/// It touches quad_over_lin at the expansion point and lies below it elsewhere.
AffineForm taylor_q(const CMat& A, double a, const CVec& w_tilde, double x_tilde);

/// Handles to the variables of a built SCA subproblem. The variables are
/// normalized: precoders are w_scale * w, slacks are t*_scale * t*.
struct OmSocp {
  conic::ConicProblem problem;
  std::vector<conic::VarId> w;  // [m]
  conic::VarId z;               // valid only with AN
  conic::VarId t0, t1, t2;
  double w_scale = 1.0, t0_scale = 1.0, t1_scale = 1.0, t2_scale = 1.0;

  CVec precoder(const conic::SolveResult& r, int m) const;
  CVec noise(const conic::SolveResult& r) const;
  double t0_value(const conic::SolveResult& r) const;
};

/// Convex subproblem around `point`: maximize t0 subject to the linearized
/// user-rate and eavesdropper constraints, MU QoS cones with phase fixing,
/// the MBS power cone and t1 t2 >= t0^2.
OmSocp build_socp(const ChannelSet& ch, const TaylorPoint& point, const NetworkConfig& config,
                  const StbOmOptions& opts);

/// Deterministic feasible starting point; throws QosInfeasible when the MU
/// targets cannot be met within the power budget.
TaylorPoint init_feasible(const ChannelSet& ch, const NetworkConfig& config, const StbOmOptions& opts);

/// Secrecy-rate maximization at the MBS alone. diagnostics.trace holds t0 per
/// iteration; t0^2 = (1 + SINR_0)/(1 + SINR_E) at each re-tightened point.
BeamformingSolution solve_stb_om(const ChannelSet& ch, const NetworkConfig& config, const StbOmOptions& opts = {});

/// Joint precoder and artificial-noise design (AN power counts towards the
/// squared-norm MBS budget).
BeamformingSolution solve_stb_om_with_an(const ChannelSet& ch, const NetworkConfig& config,
                                         StbOmOptions opts = {});

/// Baseline: AN drawn at random inside the null space of every MU channel
/// with `fraction` of the MBS power, precoders optimized for the rest.
BeamformingSolution solve_random_an(const ChannelSet& ch, const NetworkConfig& config, std::uint64_t seed,
                                    double fraction = 0.1, StbOmOptions opts = {});

}  // namespace hetsec
