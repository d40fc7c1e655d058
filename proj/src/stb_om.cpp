#include "hetsec/stb_om.hpp"

#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <random>
#include <string>

#include "hetsec/conic/solver.hpp"
#include "hetsec/linalg.hpp"

namespace hetsec {

using conic::ConicProblem;
using conic::LinExpr;
using conic::VarId;

double AffineForm::evaluate(const CVec& w, double x) const {
  return grad.dot(w).real() + coef_x * x + constant;
}

double quad_over_lin(const CMat& A, double a, const CVec& w, double x) {
  if (!(x > a)) throw DimensionError("quad_over_lin needs x > a");
  return (w.adjoint() * A * w).value().real() / (x - a);
}

AffineForm taylor_q(const CMat& A, double a, const CVec& w_tilde, double x_tilde) {
  if (!(x_tilde > a)) throw DimensionError("expansion point needs x > a");
  const double d = x_tilde - a;
  const CVec aw = A * w_tilde;
  const double q = w_tilde.dot(aw).real();
  AffineForm f;
  f.grad = 2.0 * aw / d;
  f.coef_x = -q / (d * d);
  f.constant = a * q / (d * d);
  return f;
}

namespace {

// f evaluated at (ws * v, x)
LinExpr to_expr(const ConicProblem& p, const AffineForm& f, VarId v, double ws, const LinExpr& x) {
  return p.re_inner(ws * f.grad, v) + f.coef_x * x + f.constant;
}

CMat outer(const CRow& h) { return h.adjoint() * h; }

double gain(const CRow& h, const CVec& w) { return std::norm((h * w).value()); }

// 2 Re and 2 Im of h w
void push_doubled(const ConicProblem& p, const CRow& h, VarId w, std::vector<LinExpr>& out, double scale = 2.0) {
  auto [re, im] = p.row_times(h, w);
  out.push_back(scale * re);
  out.push_back(scale * im);
}

struct Sinrs {
  double user = 0.0;
  double eve = 0.0;
};

Sinrs point_sinrs(const ChannelSet& ch, const std::vector<CVec>& w, const CVec& z, double ift) {
  double du = 1.0, de = 1.0 + ift;
  for (std::size_t m = 1; m < w.size(); ++m) {
    du += gain(ch.h_mu[0], w[m]);
    de += gain(ch.h_e, w[m]);
  }
  if (z.size()) {
    du += gain(ch.h_mu[0], z);
    de += gain(ch.h_e, z);
  }
  return {gain(ch.h_mu[0], w[0]) / du, gain(ch.h_e, w[0]) / de};
}

void retighten(const ChannelSet& ch, TaylorPoint& pt, double ift) {
  const auto s = point_sinrs(ch, pt.w_tilde, pt.z_tilde, ift);
  pt.t1_tilde = 1.0 + std::max(s.user, 1e-12);
  pt.t2_tilde = 1.0 / (1.0 + s.eve);
}

void check_shapes(const ChannelSet& ch, const NetworkConfig& c) {
  ch.check(c);
  if (static_cast<int>(c.gamma_mu.size()) != c.m_users - 1) throw DimensionError("gamma_mu needs m_users - 1 entries");
}

}  // namespace

OmSocp build_socp(const ChannelSet& ch, const TaylorPoint& pt, const NetworkConfig& c, const StbOmOptions& opts) {
  check_shapes(ch, c);
  const int M = c.m_users;
  if (static_cast<int>(pt.w_tilde.size()) != M) throw DimensionError("one expansion precoder per MU required");
  if (!(pt.t1_tilde > 1.0) || !(pt.t2_tilde > 0.0)) throw DimensionError("expansion point outside the slack domain");
  const bool an = opts.use_an;
  if (an && pt.z_tilde.size() != c.n_m) throw DimensionError("AN expansion vector missing");

  OmSocp s;
  // variables are normalized so the optimum is O(1): w = ws v, t_i = scale_i u_i
  s.w_scale = std::sqrt(c.p_m);
  s.t1_scale = pt.t1_tilde;
  s.t2_scale = pt.t2_tilde;
  s.t0_scale = std::sqrt(pt.t1_tilde * pt.t2_tilde);
  const double ws = s.w_scale;

  auto& p = s.problem;
  for (int m = 0; m < M; ++m) s.w.push_back(p.add_complex_vector("w" + std::to_string(m), c.n_m));
  if (an) s.z = p.add_complex_vector("z", c.n_m);
  s.t0 = p.add_scalar("t0");
  s.t1 = p.add_scalar("t1");
  s.t2 = p.add_scalar("t2");
  const LinExpr T1 = s.t1_scale * p.scalar(s.t1);
  const LinExpr T2 = s.t2_scale * p.scalar(s.t2);

  // user rate: sum_{m>=1} |h_0 w_m|^2 (+ |h_0 z|^2) <= Q_{H_0,1}(w_0, t1) - 1 =: g1
  {
    const CRow h = ws * ch.h_mu[0];
    const LinExpr g1 = to_expr(p, taylor_q(outer(ch.h_mu[0]), 1.0, pt.w_tilde[0], pt.t1_tilde), s.w[0], ws, T1) - 1.0;
    std::vector<LinExpr> x;
    for (int m = 1; m < M; ++m) push_doubled(p, h, s.w[m], x);
    if (an) push_doubled(p, h, s.z, x);
    x.push_back(g1 - 1.0);
    p.add_soc(g1 + 1.0, std::move(x));
  }

  // eavesdropper: 1 + IFT + sum_m |h_E w_m|^2 (+ |h_E z|^2) <= (1 + IFT + sum_{m>=1} |h_E w_m|^2 (+ z)) / t2,
  // with 1/t2 and the quadratic-over-linear terms linearized.
  {
    const CMat H = outer(ch.h_e);
    const CRow h = ws * ch.h_e;
    const double base = 1.0 + opts.ift_sum;
    const double tt = pt.t2_tilde;
    LinExpr g2 = LinExpr(base * (2.0 / tt) - base) - (base / (tt * tt)) * T2;
    for (int m = 1; m < M; ++m) g2 += to_expr(p, taylor_q(H, 0.0, pt.w_tilde[m], tt), s.w[m], ws, T2);
    if (an) g2 += to_expr(p, taylor_q(H, 0.0, pt.z_tilde, tt), s.z, ws, T2);
    std::vector<LinExpr> x;
    for (int m = 0; m < M; ++m) push_doubled(p, h, s.w[m], x);
    if (an) push_doubled(p, h, s.z, x);
    x.push_back(g2 - 1.0);
    p.add_soc(g2 + 1.0, std::move(x));
  }

  // QoS of MUs 1..M-1 with h_m w_m real: sqrt(g) ||(h_m w_q)_{q!=m}, h_m z, 1|| <= Re(h_m w_m)
  for (int m = 1; m < M; ++m) {
    const double sg = std::sqrt(c.gamma_mu[m - 1]);
    const CRow h = ch.h_mu[m];
    auto [re, im] = p.row_times(h, s.w[m]);
    p.add_eq(im);
    std::vector<LinExpr> x;
    for (int q = 0; q < M; ++q)
      if (q != m) push_doubled(p, h, s.w[q], x, sg);
    if (an) push_doubled(p, h, s.z, x, sg);
    x.push_back(LinExpr(sg / ws));
    p.add_soc(re, std::move(x));
  }

  // MBS power
  {
    std::vector<LinExpr> x;
    for (int m = 0; m < M; ++m)
      for (auto& e : p.components(s.w[m])) x.push_back(std::move(e));
    if (an)
      for (auto& e : p.components(s.z)) x.push_back(std::move(e));
    p.add_soc(LinExpr(1.0), std::move(x));
  }

  // t1 t2 >= t0^2, and t0_scale^2 = t1_scale t2_scale
  p.add_soc(p.scalar(s.t1) + p.scalar(s.t2), {2.0 * p.scalar(s.t0), p.scalar(s.t1) - p.scalar(s.t2)});
  p.set_objective(p.scalar(s.t0), conic::Sense::Maximize);
  return s;
}

CVec OmSocp::precoder(const conic::SolveResult& r, int m) const { return w_scale * r.vector(problem, w.at(m)); }
CVec OmSocp::noise(const conic::SolveResult& r) const { return w_scale * r.vector(problem, z); }
double OmSocp::t0_value(const conic::SolveResult& r) const { return t0_scale * r.scalar(problem, t0); }

TaylorPoint init_feasible(const ChannelSet& ch, const NetworkConfig& c, const StbOmOptions& opts) {
  check_shapes(ch, c);
  const int M = c.m_users;
  TaylorPoint pt;
  pt.w_tilde.assign(M, CVec::Zero(c.n_m));
  double used = 0.0;

  if (M > 1) {
    // minimum-power precoders meeting the MU targets with w_0 = 0
    ConicProblem p;
    std::vector<VarId> w;
    for (int m = 1; m < M; ++m) w.push_back(p.add_complex_vector("w" + std::to_string(m), c.n_m));
    const VarId t = p.add_scalar("t");
    std::vector<LinExpr> all;
    for (const auto& v : w)
      for (auto& e : p.components(v)) all.push_back(std::move(e));
    p.add_soc(p.scalar(t), std::move(all));
    p.add_le(p.scalar(t), LinExpr(std::sqrt(c.p_m)));
    for (int m = 1; m < M; ++m) {
      const double sg = std::sqrt(c.gamma_mu[m - 1]);
      auto [re, im] = p.row_times(ch.h_mu[m], w[m - 1]);
      p.add_eq(im);
      std::vector<LinExpr> x;
      for (int q = 1; q < M; ++q)
        if (q != m) push_doubled(p, ch.h_mu[m], w[q - 1], x, sg);
      x.push_back(LinExpr(sg));
      p.add_soc(re, std::move(x));
    }
    p.set_objective(p.scalar(t), conic::Sense::Minimize);
    const auto r = conic::solve(p, opts.solver_tol);
    if (r.status == conic::Status::Infeasible) throw QosInfeasible("MU targets exceed the MBS power budget");
    if (!r.optimal()) throw NumericalFailure("QoS feasibility problem: " + std::string(conic::to_string(r.status)));
    for (int m = 1; m < M; ++m) {
      pt.w_tilde[m] = r.vector(p, w[m - 1]);
      used += pt.w_tilde[m].squaredNorm();
    }
    if (used >= c.p_m * (1.0 - 1e-6)) throw QosInfeasible("MU targets leave no power for the wiretapped user");
  }

  double spare = c.p_m - used;
  if (opts.use_an) {
    pt.z_tilde = CVec::Zero(c.n_m);
    if (opts.an_init_fraction > 0.0) {
      const CVec dir = project_to_null_space(stack_rows(ch.h_mu), ch.h_e.adjoint());
      pt.z_tilde = std::sqrt(opts.an_init_fraction * spare) * dir;
      spare *= 1.0 - opts.an_init_fraction;
    }
  }
  std::vector<CRow> protect{ch.h_e};
  for (int m = 1; m < M; ++m) protect.push_back(ch.h_mu[m]);
  const CVec dir = project_to_null_space(stack_rows(protect), ch.h_mu[0].adjoint());
  pt.w_tilde[0] = std::sqrt(spare) * dir;
  retighten(ch, pt, opts.ift_sum);
  return pt;
}

BeamformingSolution solve_stb_om(const ChannelSet& ch, const NetworkConfig& c, const StbOmOptions& opts) {
  if (opts.max_iters < 1 || !(opts.rel_tol > 0.0)) throw ConfigError("invalid STB-OM options");
  if (opts.ift_sum < 0.0) throw ConfigError("ift_sum must be nonnegative");
  TaylorPoint pt = init_feasible(ch, c, opts);

  BeamformingSolution sol;
  auto& diag = sol.diagnostics;
  for (int it = 0; it < opts.max_iters; ++it) {
    OmSocp s = build_socp(ch, pt, c, opts);
    auto r = conic::solve(s.problem, opts.solver_tol);
    if (!r.optimal()) r = conic::solve(s.problem, opts.solver_tol * 10.0);
    diag.solver_statuses.emplace_back(conic::to_string(r.status));
    if (!r.optimal()) {
      if (diag.trace.empty()) throw NumericalFailure("STB-OM subproblem failed at the first iteration");
      break;
    }
    for (int m = 0; m < c.m_users; ++m) pt.w_tilde[m] = s.precoder(r, m);
    if (opts.use_an) pt.z_tilde = s.noise(r);
    retighten(ch, pt, opts.ift_sum);
    const double t0 = s.t0_value(r);
    diag.trace.push_back(t0);
    diag.iterations = it + 1;
    if (diag.trace.size() >= 2) {
      const double prev = diag.trace[diag.trace.size() - 2];
      if (std::abs(t0 - prev) <= opts.rel_tol * std::abs(prev)) break;
    }
  }
  sol.w_mu = pt.w_tilde;
  if (opts.use_an) sol.an = pt.z_tilde;
  sol.ift_sum = opts.ift_sum;
  diag.objective = diag.trace.back();
  return sol;
}

BeamformingSolution solve_stb_om_with_an(const ChannelSet& ch, const NetworkConfig& c, StbOmOptions opts) {
  opts.use_an = true;
  return solve_stb_om(ch, c, opts);
}

BeamformingSolution solve_random_an(const ChannelSet& ch, const NetworkConfig& c, std::uint64_t seed,
                                    double fraction, StbOmOptions opts) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ConfigError("AN power fraction must lie in [0, 1)");
  const CMat V = null_space_basis(stack_rows(ch.h_mu));
  std::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> n;
  CVec x(V.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = cplx(n(eng), n(eng));
  CVec z = V * x;
  z *= std::sqrt(fraction * c.p_m) / z.norm();

  NetworkConfig reduced = c;
  reduced.p_m = (1.0 - fraction) * c.p_m;
  const double fbs_part = opts.ift_sum;
  opts.use_an = false;
  opts.ift_sum += gain(ch.h_e, z);
  BeamformingSolution sol = solve_stb_om(ch, reduced, opts);
  sol.an = z;
  sol.ift_sum = fbs_part;
  return sol;
}

}  // namespace hetsec
