#include "hetsec/stb_smf.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "hetsec/conic/solver.hpp"

namespace hetsec {

FbsLocalProblem local_problem(const ChannelSet& ch, const NetworkConfig& c, int n) {
  ch.check(c);
  if (n < 0 || n >= c.n_coop) throw DimensionError("FBS index out of range");
  FbsLocalProblem p;
  p.g = stack_rows(ch.h_fbs_mu[n]);
  p.h_e = ch.h_fbs_e[n];
  p.h_fu = ch.h_fbs_fu[n][n];
  p.p_f = c.p_f;
  return p;
}

namespace {

Eigen::GeneralizedSelfAdjointEigenSolver<CMat> pencil(const FbsLocalProblem& prob, CMat& V) {
  V = null_space_basis(prob.g);
  const CRow a = prob.h_e * V;
  const CMat r1 = a.adjoint() * a;
  const CMat r2 = V.adjoint() * V;
  // Cholesky reduction of r2 to a standard Hermitian problem
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(r1, r2, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw NumericalFailure("generalized eigenproblem failed");
  return es;
}

void check_local(const FbsLocalProblem& prob) {
  if (prob.h_e.size() != prob.g.cols()) throw DimensionError("eavesdropper channel length");
  for (const auto& h : prob.h_fu)
    if (h.size() != prob.g.cols()) throw DimensionError("FU channel length");
  if (!(prob.p_f > 0.0)) throw ConfigError("FBS power must be positive");
}

}  // namespace

double fbs_lambda_max(const FbsLocalProblem& prob) {
  check_local(prob);
  CMat V;
  const auto es = pencil(prob, V);
  return std::max(0.0, es.eigenvalues()(es.eigenvalues().size() - 1));
}

CVec solve_fbs_closed_form(const FbsLocalProblem& prob) {
  check_local(prob);
  if (prob.h_fu.size() != 1) throw DimensionError("closed form needs exactly one FU per FBS");
  CMat V;
  const auto es = pencil(prob, V);
  const CVec phi = fix_phase(es.eigenvectors().col(es.eigenvectors().cols() - 1));
  const double q = (phi.adjoint() * V.adjoint() * V * phi).value().real();
  return V * (std::sqrt(prob.p_f / q) * phi);
}

FbsPrecoders solve_fbs_socp(const FbsLocalProblem& prob, double tol) {
  check_local(prob);
  const int K = static_cast<int>(prob.h_fu.size());
  const CMat V = null_space_basis(prob.g);
  const int d = static_cast<int>(V.cols());
  if (d < K) throw DimensionError("null space too small for the FU streams");
  const double ws = std::sqrt(prob.p_f);

  FbsPrecoders best;
  best.w.assign(K, CVec::Zero(prob.g.cols()));
  best.objective = -1.0;
  for (int k = 0; k < K; ++k) {
    conic::ConicProblem p;
    const auto x = p.add_complex_vector("x", d);
    std::vector<conic::LinExpr> pw;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
      auto [re, im] = p.row_times(V.row(i), x);
      pw.push_back(std::move(re));
      pw.push_back(std::move(im));
    }
    p.add_soc(conic::LinExpr(1.0), std::move(pw));
    for (int t = 0; t < K; ++t) {
      if (t == k) continue;
      auto [re, im] = p.row_times(prob.h_fu[t] * V, x);
      p.add_eq(re);
      p.add_eq(im);
    }
    p.set_objective(p.row_times(prob.h_e * V, x).first, conic::Sense::Maximize);
    const auto r = conic::solve(p, tol);
    if (!r.optimal())
      throw NumericalFailure("FBS stream problem: " + std::string(conic::to_string(r.status)));
    const CVec w = ws * (V * r.vector(p, x));
    const double obj = std::norm((prob.h_e * w).value());
    if (obj > best.objective) {
      best.objective = obj;
      best.w.assign(K, CVec::Zero(prob.g.cols()));
      best.w[k] = w;
    }
  }
  return best;
}

double compute_ift(const ChannelSet& ch, int n, const std::vector<CVec>& precoders) {
  if (n < 0 || n >= ch.n_coop()) throw DimensionError("FBS index out of range");
  double s = 0.0;
  for (const auto& w : precoders) s += std::norm((ch.h_fbs_e[n] * w).value());
  return s;
}

BeamformingSolution solve_stb_smf(const ChannelSet& ch, const NetworkConfig& c, const StbSmfOptions& opts) {
  c.validate_for_null_space();
  if (c.n_f - c.m_users < c.k_users) throw ConfigError("need n_f - m_users >= k_users");
  std::vector<std::vector<CVec>> w_fu(c.n_coop);
  double ift = 0.0;
  for (int n = 0; n < c.n_coop; ++n) {
    const FbsLocalProblem lp = local_problem(ch, c, n);
    if (c.k_users == 1 && opts.closed_form)
      w_fu[n] = {solve_fbs_closed_form(lp)};
    else
      w_fu[n] = solve_fbs_socp(lp).w;
    ift += compute_ift(ch, n, w_fu[n]);
  }
  StbOmOptions om = opts.om;
  om.ift_sum += ift;
  BeamformingSolution sol = solve_stb_om(ch, c, om);
  sol.w_fu = std::move(w_fu);
  sol.ift_sum = ift;
  return sol;
}

}  // namespace hetsec
