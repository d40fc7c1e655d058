#include "hetsec/stb_jmf.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "hetsec/linalg.hpp"

namespace hetsec {

using conic::LinExpr;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;

CMat outer(const CRow& h) { return h.adjoint() * h; }

double quad(const CRow& h, const CMat& x) { return (h * x * h.adjoint()).value().real(); }

// eavesdropper SINR of an inner solution (zeta plays the noise)
double eve_ratio(const ChannelSet& ch, const InnerSdpSolution& s) {
  double den = s.zeta;
  for (std::size_t m = 1; m < s.x_mu.size(); ++m) den += quad(ch.h_e, s.x_mu[m]);
  for (std::size_t n = 0; n < s.x_fu.size(); ++n)
    for (const auto& x : s.x_fu[n]) den += quad(ch.h_fbs_e[n], x);
  return quad(ch.h_e, s.x_mu[0]) / den;
}

// Objective and constraints of the inner program in X units, each as lhs <= rhs
// or lhs == rhs; the objective is row 0 (lhs only).
enum class RowKind { Objective, Le, Eq };
struct RowValue {
  RowKind kind;
  double lhs, rhs;
};

std::vector<RowValue> inner_rows(const ChannelSet& ch, const NetworkConfig& c, double tau, const std::vector<CMat>& xm,
                                 const std::vector<std::vector<CMat>>& xf, double zeta) {
  const int M = c.m_users, N = c.n_coop, K = c.k_users;
  auto fbs_sum = [&](auto&& h_of) {
    double v = 0.0;
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) v += quad(h_of(n), xf[n][k]);
    return v;
  };
  std::vector<RowValue> rows;
  rows.push_back({RowKind::Objective, quad(ch.h_mu[0], xm[0]), 0.0});
  double tr = 0.0;
  for (const auto& x : xm) tr += x.trace().real();
  rows.push_back({RowKind::Le, tr, c.p_m * zeta});
  for (int n = 0; n < N; ++n) {
    double f = 0.0;
    for (const auto& x : xf[n]) f += x.trace().real();
    rows.push_back({RowKind::Le, f, c.p_f * zeta});
  }
  for (int m = 1; m < M; ++m) {
    double interf = fbs_sum([&](int n) { return ch.h_fbs_mu[n][m]; }) + zeta;
    for (int q = 0; q < M; ++q)
      if (q != m) interf += quad(ch.h_mu[m], xm[q]);
    rows.push_back({RowKind::Le, c.gamma_mu[m - 1] * interf, quad(ch.h_mu[m], xm[m])});
  }
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) {
      double interf = zeta;
      for (int t = 0; t < K; ++t)
        if (t != k) interf += quad(ch.h_fbs_fu[n][n][k], xf[n][t]);
      for (int q = 0; q < N; ++q)
        if (q != n)
          for (int t = 0; t < K; ++t) interf += quad(ch.h_fbs_fu[q][n][k], xf[q][t]);
      for (int m = 0; m < M; ++m) interf += quad(ch.h_mbs_fu[n][k], xm[m]);
      rows.push_back({RowKind::Le, c.gamma_fu[n][k] * interf, quad(ch.h_fbs_fu[n][n][k], xf[n][k])});
    }
  if (std::isfinite(tau)) {
    double b = fbs_sum([&](int n) { return ch.h_fbs_e[n]; }) + zeta;
    for (int m = 1; m < M; ++m) b += quad(ch.h_e, xm[m]);
    rows.push_back({RowKind::Le, quad(ch.h_e, xm[0]), tau * b});
  }
  double a = fbs_sum([&](int n) { return ch.h_fbs_mu[n][0]; }) + zeta;
  for (int m = 1; m < M; ++m) a += quad(ch.h_mu[0], xm[m]);
  rows.push_back({RowKind::Eq, a, 1.0});
  return rows;
}

// Rank reduction inside the optimal set: with X_b = V_b V_b^H, move along
// X_b - t V_b D_b V_b^H where the D_b leave the objective and every tight
// constraint unchanged, and t zeroes one eigenvalue. A step is kept only if
// nothing gets worse.
constexpr double kKeep = 1e-7;  // eigenvalues below kKeep * lambda_1 are solver noise, left alone

// eng == nullptr walks along the last right singular vector; otherwise along a
// random direction of the null space when it has more than one
void walk_rank(const ChannelSet& ch, const NetworkConfig& c, InnerSdpSolution& sol, std::mt19937_64* eng) {
  constexpr double kTight = 1e-9;   // relative slack of a constraint held fixed
  constexpr double kSlip = 1e-9;    // allowed relative change of the objective and constraints
  std::vector<CMat*> blocks;
  for (auto& x : sol.x_mu) blocks.push_back(&x);
  for (auto& b : sol.x_fu)
    for (auto& x : b) blocks.push_back(&x);
  const int nb = static_cast<int>(blocks.size());

  auto rows_at = [&](double zeta) { return inner_rows(ch, c, sol.tau, sol.x_mu, sol.x_fu, zeta); };
  auto scale = [](const RowValue& r) { return std::max(std::abs(r.lhs) + std::abs(r.rhs), 1e-300); };
  auto excess = [](const RowValue& r) { return r.kind == RowKind::Eq ? std::abs(r.lhs - r.rhs) : r.lhs - r.rhs; };

  std::vector<bool> held;  // rows tight at the solver's point
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<CMat> v(nb);
    int dim = 0;
    bool high = false;
    for (int b = 0; b < nb; ++b) {
      Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (*blocks[b] + blocks[b]->adjoint()));
      const auto& ev = es.eigenvalues();
      const auto n = ev.size();
      int r = 0;
      while (r < n && ev(n - 1) > 0.0 && ev(n - 1 - r) > kKeep * ev(n - 1)) ++r;
      v[b] = es.eigenvectors().rightCols(r) * ev.tail(r).cwiseSqrt().asDiagonal();
      dim += r * r;
      high = high || r > 1;
    }
    if (!high) return;

    const auto base = rows_at(sol.zeta);
    const int nr = static_cast<int>(base.size());
    std::vector<int> active;
    for (int i = 0; i < nr; ++i)
      if (base[i].kind != RowKind::Le || base[i].rhs - base[i].lhs <= kTight * scale(base[i])) active.push_back(i);
    if (held.empty()) {
      held.assign(nr, false);
      for (int i : active) held[i] = true;
    }

    // Hermitian coordinates of every block: diagonal, then real and imaginary off-diagonal pairs
    auto unit = [](int r, int d) {
      CMat e = CMat::Zero(r, r);
      int idx = 0;
      for (int i = 0; i < r; ++i, ++idx)
        if (idx == d) e(i, i) = 1.0;
      for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
          if (idx++ == d) e(i, j) = e(j, i) = 1.0;
          if (idx++ == d) {
            e(i, j) = std::complex<double>(0.0, 1.0);
            e(j, i) = std::complex<double>(0.0, -1.0);
          }
        }
      return e;
    };
    // rate of change of each row (lhs - rhs, relative) per coordinate
    Eigen::MatrixXd slope(nr, dim);
    std::vector<std::pair<int, int>> coord;  // (block, index)
    {
      std::vector<CMat> zm(sol.x_mu.size());
      std::vector<std::vector<CMat>> zf(sol.x_fu.size());
      for (auto& x : zm) x = CMat::Zero(c.n_m, c.n_m);
      for (std::size_t n = 0; n < zf.size(); ++n) zf[n].assign(sol.x_fu[n].size(), CMat::Zero(c.n_f, c.n_f));
      auto slot = [&](int b) -> CMat& {
        if (b < static_cast<int>(zm.size())) return zm[b];
        b -= static_cast<int>(zm.size());
        return zf[b / c.k_users][b % c.k_users];
      };
      const auto zero = inner_rows(ch, c, sol.tau, zm, zf, 0.0);
      for (int b = 0; b < nb; ++b) {
        const int r = static_cast<int>(v[b].cols());
        for (int d = 0; d < r * r; ++d) {
          slot(b) = v[b] * unit(r, d) * v[b].adjoint();
          const auto rows = inner_rows(ch, c, sol.tau, zm, zf, 0.0);
          for (int i = 0; i < nr; ++i)
            slope(i, static_cast<int>(coord.size())) =
                ((rows[i].lhs - rows[i].rhs) - (zero[i].lhs - zero[i].rhs)) / scale(base[i]);
          coord.emplace_back(b, d);
          slot(b).setZero();
        }
      }
    }
    // one step with the rows in eq held; the other active rows may only move
    // back into their slack, which fixes the sign of t
    auto attempt = [&](const std::vector<int>& eq) {
      Eigen::MatrixXd a(eq.size(), dim);
      for (std::size_t i = 0; i < eq.size(); ++i) a.row(i) = slope.row(eq[i]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
      Eigen::VectorXd dir = svd.matrixV().col(dim - 1);
      if (eng) {
        const auto& sv = svd.singularValues();
        int rank = 0;
        while (rank < sv.size() && sv(rank) > 1e-9 * sv(0)) ++rank;
        if (dim - rank > 1) {
          boost::random::normal_distribution<double> g;
          Eigen::VectorXd w(dim - rank);
          for (auto& x : w) x = g(*eng);
          dir = (svd.matrixV().rightCols(dim - rank) * w).normalized();
        }
      }

      std::vector<CMat> d(nb);
      for (int b = 0; b < nb; ++b) d[b] = CMat::Zero(v[b].cols(), v[b].cols());
      for (int i = 0; i < dim; ++i) d[coord[i].first] += dir(i) * unit(static_cast<int>(v[coord[i].first].cols()), coord[i].second);
      double up = 0.0, down = 0.0;
      for (int b = 0; b < nb; ++b) {
        if (d[b].rows() == 0) continue;
        Eigen::SelfAdjointEigenSolver<CMat> es(d[b], Eigen::EigenvaluesOnly);
        up = std::max(up, es.eigenvalues().maxCoeff());
        down = std::max(down, -es.eigenvalues().minCoeff());
      }
      // X - t V D V^H changes row i by -t * slope_i
      const Eigen::VectorXd rate = slope * dir;
      const double eps = 1e-9 * rate.cwiseAbs().maxCoeff();
      bool pos = true, neg = true;
      for (int i : active)
        if (std::find(eq.begin(), eq.end(), i) == eq.end()) {
          pos = pos && rate(i) >= -eps;
          neg = neg && rate(i) <= eps;
        }
      double t = kInf;
      if (pos && up > 0.0 && (up >= down || !neg)) t = 1.0 / up;
      else if (neg && down > 0.0) t = -1.0 / down;
      if (!std::isfinite(t)) return false;
      for (int i = 0; i < nr; ++i) {
        if (std::find(active.begin(), active.end(), i) != active.end()) continue;
        const double rise = -t * rate(i), room = (base[i].rhs - base[i].lhs) / scale(base[i]);
        if (rise > room && room > 0.0) t *= room / rise;
      }

      std::vector<CMat> saved(nb);
      for (int b = 0; b < nb; ++b) {
        saved[b] = *blocks[b];
        CMat x = *blocks[b] - t * v[b] * d[b] * v[b].adjoint();
        *blocks[b] = 0.5 * (x + x.adjoint());
      }
      const auto after = rows_at(sol.zeta);
      bool ok = after[0].lhs >= base[0].lhs - kSlip * scale(base[0]);
      for (std::size_t i = 1; ok && i < after.size(); ++i)
        ok = excess(after[i]) <= std::max(excess(base[i]), 0.0) + kSlip * scale(base[i]);
      if (!ok)
        for (int b = 0; b < nb; ++b) *blocks[b] = saved[b];
      return ok;
    };
    // rows slack at the solver's point have zero multipliers, so those that
    // turned tight since may be given back slack; hold as many as possible
    std::vector<int> loose;
    for (int i : active)
      if (!held[i]) loose.push_back(i);
    std::vector<unsigned> masks(1u << loose.size());
    for (unsigned m = 0; m < masks.size(); ++m) masks[m] = m;
    std::stable_sort(masks.begin(), masks.end(), [](unsigned x, unsigned y) { return std::popcount(x) < std::popcount(y); });
    bool moved = false;
    for (unsigned m : masks) {  // bits set: rows released
      std::vector<int> eq;
      for (int i : active)
        if (held[i]) eq.push_back(i);
      for (std::size_t j = 0; j < loose.size(); ++j)
        if (!(m >> j & 1u)) eq.push_back(loose[j]);
      if ((moved = attempt(eq))) break;
    }
    if (!moved) return;
  }
}

double worst_ratio(const InnerSdpSolution& sol) {
  double r = 0.0;
  for (const auto& x : sol.x_mu) r = std::max(r, verify_rank_one(x).first);
  for (const auto& b : sol.x_fu)
    for (const auto& x : b) r = std::max(r, verify_rank_one(x).first);
  return r;
}

// The walk can stop at a vertex of the optimal set that is not rank one; a few
// randomized walks from the solver's point usually find one that is.
void reduce_rank(const ChannelSet& ch, const NetworkConfig& c, InnerSdpSolution& sol) {
  const InnerSdpSolution start = sol;
  walk_rank(ch, c, sol, nullptr);
  double best = worst_ratio(sol);
  for (std::uint64_t seed = 1; seed <= 8 && best > kKeep; ++seed) {
    InnerSdpSolution s = start;
    std::mt19937_64 eng(seed);
    walk_rank(ch, c, s, &eng);
    const double r = worst_ratio(s);
    if (r < best) {
      best = r;
      sol = std::move(s);
    }
  }
}

}  // namespace

InnerSdp build_inner_sdp(const ChannelSet& ch, const NetworkConfig& c, double tau) {
  c.validate();
  ch.check(c);
  if (!(tau >= 0.0)) throw ConfigError("tau must be nonnegative");
  const int M = c.m_users, N = c.n_coop, K = c.k_users;

  InnerSdp s;
  auto& p = s.problem;
  s.mu_scale = c.p_m;
  s.fu_scale = c.p_f;
  for (int m = 0; m < M; ++m) s.y_mu.push_back(p.add_hermitian("X" + std::to_string(m), c.n_m));
  s.y_fu.resize(N);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k)
      s.y_fu[n].push_back(p.add_hermitian("X" + std::to_string(n) + "_" + std::to_string(k), c.n_f));
  s.zeta = p.add_scalar("zeta", true);
  const LinExpr zeta = p.scalar(s.zeta);

  // Tr(h^H h X) in X units
  auto tm = [&](const CRow& h, int m) { return s.mu_scale * p.trace_product(outer(h), s.y_mu[m]); };
  auto tf = [&](const CRow& h, int n, int k) { return s.fu_scale * p.trace_product(outer(h), s.y_fu[n][k]); };
  // FBS interference received through rows h_of(n)
  auto fbs_sum = [&](auto&& h_of) {
    LinExpr e;
    for (int n = 0; n < N; ++n)
      for (int k = 0; k < K; ++k) e += tf(h_of(n), n, k);
    return e;
  };

  for (int m = 0; m < M; ++m) s.psd_mu.push_back(p.add_psd(s.y_mu[m]));
  s.psd_fu.resize(N);
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) s.psd_fu[n].push_back(p.add_psd(s.y_fu[n][k]));

  // power
  {
    LinExpr tr;
    for (int m = 0; m < M; ++m) tr += p.trace(s.y_mu[m]);
    s.mbs_power = p.add_le(tr, zeta);
    for (int n = 0; n < N; ++n) {
      LinExpr f;
      for (int k = 0; k < K; ++k) f += p.trace(s.y_fu[n][k]);
      s.fbs_power.push_back(p.add_le(f, zeta));
    }
  }

  // MU QoS
  for (int m = 1; m < M; ++m) {
    LinExpr interf = fbs_sum([&](int n) { return ch.h_fbs_mu[n][m]; }) + zeta;
    for (int q = 0; q < M; ++q)
      if (q != m) interf += tm(ch.h_mu[m], q);
    p.add_ge(tm(ch.h_mu[m], m) - c.gamma_mu[m - 1] * interf);
  }

  // FU QoS
  for (int n = 0; n < N; ++n)
    for (int k = 0; k < K; ++k) {
      LinExpr interf = zeta;
      for (int t = 0; t < K; ++t)
        if (t != k) interf += tf(ch.h_fbs_fu[n][n][k], n, t);
      for (int q = 0; q < N; ++q)
        if (q != n)
          for (int t = 0; t < K; ++t) interf += tf(ch.h_fbs_fu[q][n][k], q, t);
      for (int m = 0; m < M; ++m) interf += tm(ch.h_mbs_fu[n][k], m);
      p.add_ge(tf(ch.h_fbs_fu[n][n][k], n, k) - c.gamma_fu[n][k] * interf);
    }

  // eavesdropper cap
  if (std::isfinite(tau)) {
    LinExpr b = fbs_sum([&](int n) { return ch.h_fbs_e[n]; }) + zeta;
    for (int m = 1; m < M; ++m) b += tm(ch.h_e, m);
    p.add_le(tm(ch.h_e, 0), tau * b);
  }

  // normalization: interference-plus-noise of MU 0 times zeta equals 1
  {
    LinExpr a = fbs_sum([&](int n) { return ch.h_fbs_mu[n][0]; }) + zeta;
    for (int m = 1; m < M; ++m) a += tm(ch.h_mu[0], m);
    p.add_eq(a - 1.0);
  }

  p.set_objective(tm(ch.h_mu[0], 0), conic::Sense::Maximize);
  return s;
}

std::pair<double, InnerSdpSolution> inner_value(const ChannelSet& ch, const NetworkConfig& c, double tau,
                                                double solver_tol) {
  const InnerSdp s = build_inner_sdp(ch, c, tau);
  auto r = conic::solve(s.problem, solver_tol);
  if (!r.optimal() && r.status != conic::Status::Infeasible) r = conic::solve(s.problem, solver_tol * 100.0);
  if (r.status == conic::Status::Infeasible) throw QosInfeasible("QoS targets cannot be met jointly");
  if (!r.optimal()) throw NumericalFailure("inner SDP: " + std::string(conic::to_string(r.status)));

  InnerSdpSolution sol;
  sol.tau = tau;
  sol.zeta = r.scalar(s.problem, s.zeta);
  for (std::size_t m = 0; m < s.y_mu.size(); ++m) {
    sol.x_mu.push_back(s.mu_scale * r.hermitian(s.problem, s.y_mu[m]));
    sol.g_mu.push_back(r.psd_dual(s.problem, s.psd_mu[m]) / s.mu_scale);
  }
  sol.x_fu.resize(s.y_fu.size());
  sol.g_fu.resize(s.y_fu.size());
  for (std::size_t n = 0; n < s.y_fu.size(); ++n)
    for (std::size_t k = 0; k < s.y_fu[n].size(); ++k) {
      sol.x_fu[n].push_back(s.fu_scale * r.hermitian(s.problem, s.y_fu[n][k]));
      sol.g_fu[n].push_back(r.psd_dual(s.problem, s.psd_fu[n][k]) / s.fu_scale);
    }
  reduce_rank(ch, c, sol);
  sol.objective = (ch.h_mu[0] * sol.x_mu[0] * ch.h_mu[0].adjoint()).value().real();
  return {sol.objective, std::move(sol)};
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double eps,
                      GoldenSearchTrace* trace) {
  if (!(lo < hi) || !(eps > 0.0)) throw ConfigError("golden section needs lo < hi and eps > 0");
  const double rho = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    const double v = f(x);
    if (trace) trace->evaluations.emplace_back(x, v);
    return v;
  };
  double a = lo, b = hi;
  double x1 = b - rho * (b - a), x2 = a + rho * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  if (trace) trace->brackets.emplace_back(a, b);
  while (b - a > eps) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - rho * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + rho * (b - a);
      f2 = eval(x2);
    }
    if (trace) trace->brackets.emplace_back(a, b);
  }
  return 0.5 * (a + b);
}

std::pair<double, bool> verify_rank_one(const CMat& x, double tol) {
  if (x.rows() == 0) return {0.0, true};
  Eigen::SelfAdjointEigenSolver<CMat> es(x, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double l1 = ev(ev.size() - 1);
  if (!(l1 > 0.0)) return {0.0, true};
  const double l2 = ev.size() > 1 ? std::max(0.0, ev(ev.size() - 2)) : 0.0;
  const double ratio = l2 / l1;
  return {ratio, ratio <= tol};
}

CVec rank_one_extract(const CMat& x, double zeta, int trials, const CandidateScore& score, std::uint64_t seed,
                      double rank_tol, bool* randomized) {
  if (!(zeta > 0.0)) throw DimensionError("zeta must be positive");
  const CMat w = x / zeta;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (w + w.adjoint()));
  const auto n = w.rows();
  const double l1 = std::max(0.0, es.eigenvalues()(n - 1));
  if (randomized) *randomized = false;
  if (verify_rank_one(w, rank_tol).second) return fix_phase(std::sqrt(l1) * es.eigenvectors().col(n - 1));

  if (randomized) *randomized = true;
  // W = U L U^H, draws U L^{1/2} g with g ~ CN(0, I)
  const CMat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const double power = w.trace().real();
  std::mt19937_64 eng(seed);
  boost::random::normal_distribution<double> g;
  std::optional<double> best_score;
  CVec best;
  for (int t = 0; t < trials; ++t) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = std::sqrt(0.5) * cplx(g(eng), g(eng));
    CVec cand = root * v;
    const double nrm = cand.norm();
    if (!(nrm > 0.0)) continue;
    cand *= std::sqrt(power) / nrm;
    const auto sc = score(cand);
    if (sc && (!best_score || *sc > *best_score)) {
      best_score = sc;
      best = cand;
    }
  }
  if (!best_score) throw NumericalFailure("no feasible randomized precoder");
  return best;
}

double complementarity_residual(const CMat& g, const CMat& x) { return (g * x).norm(); }

double KktReport::worst_complementarity() const {
  return complementarity.empty() ? 0.0 : *std::max_element(complementarity.begin(), complementarity.end());
}

double KktReport::worst_dual_eig() const {
  return dual_min_eig.empty() ? 0.0 : *std::min_element(dual_min_eig.begin(), dual_min_eig.end());
}

bool KktReport::pass(double tol) const {
  if (worst_complementarity() > tol || worst_dual_eig() < -tol || mbs_power_gap > tol) return false;
  for (double f : fbs_power_gap)
    if (f > tol) return false;
  return true;
}

KktReport verify_kkt(const InnerSdpSolution& sol, const NetworkConfig& c) {
  KktReport rep;
  auto add = [&](const CMat& g, const CMat& x) {
    rep.complementarity.push_back(complementarity_residual(g, x));
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (g + g.adjoint()), Eigen::EigenvaluesOnly);
    rep.dual_min_eig.push_back(es.eigenvalues()(0));
    rep.rank_ratio.push_back(verify_rank_one(x).first);
  };
  double tr = 0.0;
  for (std::size_t m = 0; m < sol.x_mu.size(); ++m) {
    add(sol.g_mu.at(m), sol.x_mu[m]);
    tr += sol.x_mu[m].trace().real();
  }
  rep.mbs_power_gap = std::abs(tr - c.p_m * sol.zeta) / (c.p_m * sol.zeta);
  for (std::size_t n = 0; n < sol.x_fu.size(); ++n) {
    double f = 0.0;
    for (std::size_t k = 0; k < sol.x_fu[n].size(); ++k) {
      add(sol.g_fu.at(n).at(k), sol.x_fu[n][k]);
      f += sol.x_fu[n][k].trace().real();
    }
    rep.fbs_power_gap.push_back(std::abs(f - c.p_f * sol.zeta) / (c.p_f * sol.zeta));
  }
  return rep;
}

double tau_max(const ChannelSet& ch, const NetworkConfig& c) { return ch.h_mu.at(0).squaredNorm() * c.p_m; }

double outer_value(const ChannelSet& ch, const NetworkConfig& c, double tau, double solver_tol) {
  try {
    return (1.0 + inner_value(ch, c, tau, solver_tol).first) / (1.0 + tau);
  } catch (const NumericalFailure&) {
    return kNegInf;
  }
}

namespace {

bool meets_qos(const ChannelSet& ch, const NetworkConfig& c, const BeamformingSolution& s) {
  const double slack = 1.0 - 1e-6;
  for (int m = 1; m < c.m_users; ++m)
    if (sinr_mu(ch, s, m) < c.gamma_mu[m - 1] * slack) return false;
  for (int n = 0; n < c.n_coop; ++n)
    for (int k = 0; k < c.k_users; ++k)
      if (sinr_fu(ch, s, n, k) < c.gamma_fu[n][k] * slack) return false;
  return true;
}

}  // namespace

BeamformingSolution extract_precoders(const ChannelSet& ch, const NetworkConfig& c, const InnerSdpSolution& sol,
                                      const JmfOptions& opts, const SolutionScore& objective) {
  BeamformingSolution out;
  auto& diag = out.diagnostics;
  auto principal = [&](const CMat& x) {
    return rank_one_extract(x, sol.zeta, 0, [](const CVec&) { return std::optional<double>(); }, 0, 1.0);
  };
  std::vector<std::pair<int, int>> pending;  // (n or -1, index)
  for (std::size_t m = 0; m < sol.x_mu.size(); ++m) {
    out.w_mu.push_back(principal(sol.x_mu[m]));
    const double r = verify_rank_one(sol.x_mu[m]).first;
    diag.max_rank_ratio = std::max(diag.max_rank_ratio, r);
    if (r > opts.rank_tol) pending.emplace_back(-1, static_cast<int>(m));
  }
  out.w_fu.resize(sol.x_fu.size());
  for (std::size_t n = 0; n < sol.x_fu.size(); ++n)
    for (std::size_t k = 0; k < sol.x_fu[n].size(); ++k) {
      out.w_fu[n].push_back(principal(sol.x_fu[n][k]));
      const double r = verify_rank_one(sol.x_fu[n][k]).first;
      diag.max_rank_ratio = std::max(diag.max_rank_ratio, r);
      if (r > opts.rank_tol) pending.emplace_back(static_cast<int>(n), static_cast<int>(k));
    }

  std::uint64_t seed = opts.randomization_seed;
  for (auto [n, i] : pending) {
    CVec& slot = n < 0 ? out.w_mu[i] : out.w_fu[n][i];
    const CMat& x = n < 0 ? sol.x_mu[i] : sol.x_fu[n][i];
    const CVec keep = slot;
    auto score = [&](const CVec& w) -> std::optional<double> {
      slot = w;
      if (!meets_qos(ch, c, out)) return std::nullopt;
      return objective ? objective(out) : secrecy_rate(ch, out);
    };
    const auto keep_score = score(keep);
    try {
      bool rnd = false;
      const CVec w = rank_one_extract(x, sol.zeta, opts.randomization_trials, score, seed++, opts.rank_tol, &rnd);
      // the principal eigenvector stays when no draw beats it
      slot = w;
      if (keep_score && *keep_score >= *score(w)) slot = keep;
      ++diag.randomized_blocks;
    } catch (const NumericalFailure&) {
      slot = keep;
      diag.solver_statuses.emplace_back("randomization_failed");
    }
  }
  return out;
}

JmfResult solve_stb_jmf_detailed(const ChannelSet& ch, const NetworkConfig& c, const JmfOptions& opts) {
  if (opts.grid_points < 2 || !(opts.search_eps > 0.0)) throw ConfigError("invalid STB-JMF search options");
  JmfResult res;
  std::map<double, std::pair<double, InnerSdpSolution>> cache;  // keyed by u = log(1 + tau)
  // Once the cap is slack at some tau, the solution is optimal without the cap,
  // so G stays at that value for every tau above its eavesdropper SINR.
  double flat_from = kInf, flat_g = 0.0;
  InnerSdpSolution flat_sol;
  auto f = [&](double u) {
    auto it = cache.find(u);
    if (it == cache.end()) {
      const double tau = std::expm1(u);
      double val = kNegInf;
      InnerSdpSolution sol;
      if (tau >= flat_from) {
        val = (1.0 + flat_g) / (1.0 + tau);
        sol = flat_sol;
      } else {
        try {
          auto [g, s] = inner_value(ch, c, tau, opts.solver_tol);
          val = (1.0 + g) / (1.0 + tau);
          const double r = eve_ratio(ch, s);
          if (tau > 0.0 && r < tau * (1.0 - 1e-4) && r < flat_from) {
            flat_from = std::max(r, 0.0);
            flat_g = g;
            flat_sol = s;
          }
          sol = std::move(s);
        } catch (const NumericalFailure&) {
        }
        ++res.sdp_solves;
      }
      it = cache.emplace(u, std::make_pair(val, std::move(sol))).first;
    }
    return it->second.first;
  };

  // QoS feasibility does not depend on tau: the first solve settles it (and throws)
  const double umax = std::log1p(tau_max(ch, c));
  const int G = opts.grid_points;
  std::vector<double> grid(G), vals(G);
  for (int i = 0; i < G; ++i) {
    grid[i] = umax * i / (G - 1);
    vals[i] = f(grid[i]);
    res.search.evaluations.emplace_back(grid[i], vals[i]);
  }
  const int best = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  if (!std::isfinite(vals[best])) throw NumericalFailure("inner SDP failed on the whole tau grid");
  const double lo = grid[std::max(0, best - 1)], hi = grid[std::min(G - 1, best + 1)];
  const double mid = golden_section(f, lo, hi, opts.search_eps, &res.search);
  f(mid);
  res.search.evaluations.emplace_back(mid, cache.at(mid).first);

  auto arg = std::max_element(cache.begin(), cache.end(),
                              [](const auto& a, const auto& b) { return a.second.first < b.second.first; });
  res.tau = std::expm1(arg->first);
  res.outer_value = arg->second.first;
  res.inner = arg->second.second;
  res.kkt = verify_kkt(res.inner, c);
  res.solution = extract_precoders(ch, c, res.inner, opts);
  auto& diag = res.solution.diagnostics;
  diag.iterations = res.sdp_solves;
  diag.objective = res.outer_value;
  for (const auto& [u, v] : res.search.evaluations) diag.trace.push_back(v);
  res.solution.ift_sum = interference_at_eve(ch, res.solution);
  return res;
}

BeamformingSolution solve_stb_jmf(const ChannelSet& ch, const NetworkConfig& c, const JmfOptions& opts) {
  return solve_stb_jmf_detailed(ch, c, opts).solution;
}

}  // namespace hetsec
