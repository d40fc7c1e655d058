#include "hetsec/conic/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <tuple>

#include "cones.hpp"
#include "hetsec/conic/embed.hpp"

namespace hetsec::conic {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::Unbounded:
      return "unbounded";
    case Status::NumericalFailure:
      return "numerical_failure";
  }
  return "?";
}

double SolveResult::scalar(const ConicProblem& p, VarId v) const {
  const auto& var = p.variable(v);
  if (var.kind != VarKind::Scalar) throw DimensionError(var.name + " is not a scalar");
  return primal(var.offset);
}

CVec SolveResult::vector(const ConicProblem& p, VarId v) const {
  const auto& var = p.variable(v);
  if (var.kind != VarKind::ComplexVector) throw DimensionError(var.name + " is not a vector");
  return unembed_vector(primal.segment(var.offset, 2 * var.dim));
}

CMat SolveResult::hermitian(const ConicProblem& p, VarId v) const {
  const auto& var = p.variable(v);
  if (var.kind != VarKind::Hermitian) throw DimensionError(var.name + " is not hermitian");
  return params_to_hermitian(primal.segment(var.offset, var.dim * var.dim), var.dim);
}

CMat SolveResult::psd_dual(const ConicProblem& p, int constraint) const {
  const auto* c = std::get_if<PsdMembership>(&p.constraints().at(constraint));
  if (!c) throw DimensionError("constraint is not a PSD membership");
  const int d = p.variable(c->var).dim;
  const RVec& z = duals.at(constraint);
  const RMat zm = Eigen::Map<const RMat>(z.data(), 2 * d, 2 * d);
  // <Z, embed(X)> = Tr(G X) with G twice the projection of Z.
  return 2.0 * real_symmetric_to_hermitian(0.5 * (zm + zm.transpose()));
}

namespace {

using detail::ConeDims;
using detail::Scaling;
using SpMat = Eigen::SparseMatrix<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Row of the cone map s = h - G x, kept as s = constant + sum coef * x.
struct Row {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;
};

Row to_row(const LinExpr& e) { return Row{e.terms(), e.constant()}; }

// min c^T x  s.t.  A x = b,  G x + s = h,  s in K
struct StandardForm {
  int n = 0;
  RVec c;
  double c0 = 0.0;
  double cost_scale = 1.0;  // c holds cost_scale * (column-scaled objective)
  double sign = 1.0;  // +1 minimize, -1 maximize (c holds the negated objective)
  RMat A;
  RVec b;
  SpMat G;
  RVec h;
  ConeDims dims;

  // nonzeros of G grouped per cone for assembling G^T W^T W G
  std::vector<std::vector<std::pair<int, double>>> lp_rows;
  struct SocBlock {
    std::vector<int> cols;
    RMat g;  // q x cols
  };
  std::vector<SocBlock> soc_blocks;
  struct PsdBlock {
    std::vector<int> cols;
    std::vector<std::vector<std::tuple<int, int, double>>> entries;  // per col: (i, j, g)
  };
  std::vector<PsdBlock> psd_blocks;

  // equilibration: x = col_scale .* x_hat, cone/equality rows multiplied by row/eq scale
  RVec col_scale, row_scale, eq_scale;

  // where each constraint's multiplier lives
  struct Slot {
    bool eq = false;
    int start = 0;
    int len = 0;
  };
  std::vector<Slot> slots;
};

// Rows of embed(X) for a hermitian block, in column-major order of the 2d x 2d matrix.
std::vector<Row> psd_rows(const Variable& var) {
  const int d = var.dim;
  const int s = 2 * d;
  std::vector<Row> rows(s * s);
  auto put = [&](int i, int j, int param, double coef) {
    rows[j * s + i].terms.emplace_back(var.offset + param, coef);
  };
  for (int a = 0; a < d; ++a) {
    put(a, a, a * d + a, 1.0);
    put(a + d, a + d, a * d + a, 1.0);
    for (int b = a + 1; b < d; ++b) {
      const int re = a * d + b;
      const int im = b * d + a;
      for (int off : {0, d}) {
        put(a + off, b + off, re, 1.0);
        put(b + off, a + off, re, 1.0);
      }
      // lower-left block holds Im X, upper-right -Im X
      put(a + d, b, im, 1.0);
      put(b + d, a, im, -1.0);
      put(a, b + d, im, -1.0);
      put(b, a + d, im, 1.0);
    }
  }
  return rows;
}

// Ruiz equilibration of [A; G]: columns freely, rows uniformly within each cone
// so the cones are left invariant. Rescales the rows in place.
void equilibrate(int n, std::vector<Row>& eq, std::vector<Row>& lp, std::vector<std::vector<Row>>& socs,
                 std::vector<std::vector<Row>>& psds, StandardForm& sf) {
  std::vector<std::vector<Row>*> groups;  // every group shares one row scale
  std::vector<std::vector<Row>> singles;
  singles.reserve(eq.size() + lp.size());
  for (auto& r : eq) singles.push_back({r});
  for (auto& r : lp) singles.push_back({r});
  for (auto& g : singles) groups.push_back(&g);
  for (auto& g : socs) groups.push_back(&g);
  for (auto& g : psds) groups.push_back(&g);

  RVec d = RVec::Ones(n);
  RVec e = RVec::Ones(static_cast<Eigen::Index>(groups.size()));
  for (int pass = 0; pass < 15; ++pass) {
    RVec cmax = RVec::Zero(n);
    RVec gmax = RVec::Zero(e.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (const auto& r : *groups[g])
        for (const auto& [k, v] : r.terms) {
          const double a = std::abs(v) * d(k) * e(g);
          cmax(k) = std::max(cmax(k), a);
          gmax(g) = std::max(gmax(g), a);
        }
    double worst = 0.0;
    for (int k = 0; k < n; ++k)
      if (cmax(k) > 0.0) {
        d(k) /= std::sqrt(cmax(k));
        worst = std::max(worst, std::abs(1.0 - cmax(k)));
      }
    for (Eigen::Index g = 0; g < e.size(); ++g)
      if (gmax(g) > 0.0) {
        e(g) /= std::sqrt(gmax(g));
        worst = std::max(worst, std::abs(1.0 - gmax(g)));
      }
    if (worst < 1e-2) break;
  }

  auto rescale = [&](Row& r, double eg) {
    for (auto& [k, v] : r.terms) v *= eg * d(k);
    r.constant *= eg;
  };
  std::size_t g = 0;
  sf.eq_scale.resize(static_cast<Eigen::Index>(eq.size()));
  for (std::size_t i = 0; i < eq.size(); ++i, ++g) {
    rescale(eq[i], e(g));
    sf.eq_scale(i) = e(g);
  }
  std::vector<double> rows;
  for (auto& r : lp) {
    rescale(r, e(g));
    rows.push_back(e(g++));
  }
  for (auto* blocks : {&socs, &psds})
    for (auto& blk : *blocks) {
      for (auto& r : blk) {
        rescale(r, e(g));
        rows.push_back(e(g));
      }
      ++g;
    }
  sf.row_scale = Eigen::Map<RVec>(rows.data(), static_cast<Eigen::Index>(rows.size()));
  sf.col_scale = d;
}

StandardForm build(const ConicProblem& p) {
  StandardForm sf;
  sf.n = p.param_count();
  const int n = sf.n;

  std::vector<Row> lp, eq;
  std::vector<std::vector<Row>> socs, psds;
  std::vector<int> psd_order;
  sf.slots.resize(p.constraints().size());

  for (const auto& v : p.variables())
    if (v.kind == VarKind::Scalar && v.nonneg) lp.push_back(Row{{{v.offset, 1.0}}, 0.0});

  // Multiplier positions are fixed after the layout is known; record indices first.
  std::vector<std::pair<int, int>> where(p.constraints().size());  // (kind, index)
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    const auto& c = p.constraints()[i];
    if (const auto* e = std::get_if<LinearEq>(&c)) {
      where[i] = {0, static_cast<int>(eq.size())};
      eq.push_back(to_row(e->expr));
    } else if (const auto* g = std::get_if<LinearIneq>(&c)) {
      where[i] = {1, static_cast<int>(lp.size())};
      lp.push_back(to_row(g->expr));
    } else if (const auto* s = std::get_if<SecondOrderCone>(&c)) {
      where[i] = {2, static_cast<int>(socs.size())};
      std::vector<Row> rows{to_row(s->t)};
      for (const auto& x : s->x) rows.push_back(to_row(x));
      socs.push_back(std::move(rows));
    } else if (const auto* m = std::get_if<PsdMembership>(&c)) {
      where[i] = {3, static_cast<int>(psds.size())};
      const auto& var = p.variable(m->var);
      psds.push_back(psd_rows(var));
      psd_order.push_back(2 * var.dim);
    }
  }

  sf.dims.lp = static_cast<int>(lp.size());
  for (const auto& s : socs) sf.dims.soc.push_back(static_cast<int>(s.size()));
  sf.dims.psd = psd_order;
  const int m = sf.dims.total();
  equilibrate(n, eq, lp, socs, psds, sf);

  for (std::size_t i = 0; i < where.size(); ++i) {
    auto [kind, idx] = where[i];
    auto& slot = sf.slots[i];
    if (kind == 0) {
      slot = {true, idx, 1};
    } else if (kind == 1) {
      slot = {false, idx, 1};
    } else if (kind == 2) {
      slot = {false, sf.dims.soc_offset(idx), sf.dims.soc[idx]};
    } else {
      slot = {false, sf.dims.psd_offset(idx), sf.dims.psd[idx] * sf.dims.psd[idx]};
    }
  }

  // objective
  sf.sign = p.sense() == Sense::Minimize ? 1.0 : -1.0;
  sf.c = RVec::Zero(n);
  for (const auto& [k, v] : p.objective().terms()) sf.c(k) += sf.sign * v * sf.col_scale(k);
  sf.c0 = p.objective().constant();
  const double cmax = sf.c.size() ? sf.c.cwiseAbs().maxCoeff() : 0.0;
  if (cmax > 0.0) {
    sf.cost_scale = 1.0 / cmax;
    sf.c *= sf.cost_scale;
  }

  // equalities: a^T x + a0 = 0  ->  A row a, b = -a0
  sf.A = RMat::Zero(static_cast<Eigen::Index>(eq.size()), n);
  sf.b.resize(static_cast<Eigen::Index>(eq.size()));
  for (std::size_t i = 0; i < eq.size(); ++i) {
    for (const auto& [k, v] : eq[i].terms) sf.A(i, k) += v;
    sf.b(i) = -eq[i].constant;
  }

  // cone rows: s = a0 + a^T x  ->  G row -a, h = a0
  std::vector<Eigen::Triplet<double>> trip;
  sf.h.resize(m);
  int row = 0;
  auto emit = [&](const Row& r) {
    for (const auto& [k, v] : r.terms) trip.emplace_back(row, k, -v);
    sf.h(row) = r.constant;
    ++row;
  };
  for (const auto& r : lp) {
    emit(r);
    std::vector<std::pair<int, double>> neg;
    for (const auto& [k, v] : r.terms) neg.emplace_back(k, -v);
    sf.lp_rows.push_back(std::move(neg));
  }
  for (const auto& rows : socs) {
    StandardForm::SocBlock blk;
    for (const auto& r : rows)
      for (const auto& t : r.terms) blk.cols.push_back(t.first);
    std::sort(blk.cols.begin(), blk.cols.end());
    blk.cols.erase(std::unique(blk.cols.begin(), blk.cols.end()), blk.cols.end());
    blk.g = RMat::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(blk.cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& [k, v] : rows[i].terms) {
        const auto it = std::lower_bound(blk.cols.begin(), blk.cols.end(), k);
        blk.g(static_cast<Eigen::Index>(i), it - blk.cols.begin()) -= v;
      }
      emit(rows[i]);
    }
    sf.soc_blocks.push_back(std::move(blk));
  }
  for (std::size_t k = 0; k < psds.size(); ++k) {
    const int s = psd_order[k];
    StandardForm::PsdBlock blk;
    std::vector<int> local(n, -1);
    for (int r = 0; r < s * s; ++r) {
      for (const auto& [col, v] : psds[k][r].terms) {
        if (local[col] < 0) {
          local[col] = static_cast<int>(blk.cols.size());
          blk.cols.push_back(col);
          blk.entries.emplace_back();
        }
        blk.entries[local[col]].emplace_back(r % s, r / s, -v);
      }
      emit(psds[k][r]);
    }
    sf.psd_blocks.push_back(std::move(blk));
  }
  sf.G.resize(m, n);
  sf.G.setFromTriplets(trip.begin(), trip.end());
  sf.G.makeCompressed();
  return sf;
}

// Solves [0 A^T G^T; A 0 0; G 0 -(W^T W)^{-1}] (x, y, z) = (bx, by, bz).
class Kkt {
 public:
  Kkt(const StandardForm& sf) : sf_(sf) {}

  bool factor(const Scaling& w) {
    w_ = &w;
    const int n = sf_.n;
    RMat H = RMat::Zero(n, n);
    const auto& dims = sf_.dims;
    for (int i = 0; i < dims.lp; ++i) {
      const double d2 = w.d(i) * w.d(i);
      const auto& r = sf_.lp_rows[i];
      for (const auto& [p, gp] : r)
        for (const auto& [q, gq] : r) H(p, q) += d2 * gp * gq;
    }
    for (std::size_t k = 0; k < dims.soc.size(); ++k) {
      const auto& blk = sf_.soc_blocks[k];
      const RVec& v = w.v[k];
      const int q = dims.soc[k];
      // W^2 = beta^2 (2 v v^T - J)^2
      RMat wm = 2.0 * v * v.transpose();
      wm(0, 0) -= 1.0;
      for (int i = 1; i < q; ++i) wm(i, i) += 1.0;
      wm *= w.beta[k];
      const RMat wg = wm * blk.g;
      const RMat hk = wg.transpose() * wg;
      for (std::size_t a = 0; a < blk.cols.size(); ++a)
        for (std::size_t b = 0; b < blk.cols.size(); ++b)
          H(blk.cols[a], blk.cols[b]) += hk(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    for (std::size_t k = 0; k < dims.psd.size(); ++k) {
      const auto& blk = sf_.psd_blocks[k];
      const RMat Q = w.r[k] * w.r[k].transpose();
      const auto nc = blk.cols.size();
      for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t b = a; b < nc; ++b) {
          // <G_a, Q G_b Q>
          double acc = 0.0;
          for (const auto& [i, j, ga] : blk.entries[a])
            for (const auto& [kk, l, gb] : blk.entries[b]) acc += ga * gb * Q(i, kk) * Q(l, j);
          H(blk.cols[a], blk.cols[b]) += acc;
          if (a != b) H(blk.cols[b], blk.cols[a]) += acc;
        }
      }
    }
    RMat K = H;
    K.noalias() += sf_.A.transpose() * sf_.A;
    if (!factor_spd(K, kfac_)) return false;
    if (sf_.A.rows() > 0) {
      kat_ = kfac_.solve(sf_.A.transpose());
      RMat S = sf_.A * kat_;
      if (!factor_spd(S, sfac_)) return false;
    }
    return true;
  }

  void solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& x, RVec& y, RVec& z) const {
    raw_solve(bx, by, bz, x, y, z);
    const double bnorm = std::max({1.0, bx.norm(), by.norm(), bz.norm()});
    double prev = kInf;
    // refine while the residual keeps shrinking
    for (int it = 0; it < 10; ++it) {
      RVec zz = z;
      w_->apply_wtw_inv(sf_.dims, zz);
      const RVec ex = bx - sf_.A.transpose() * y - sf_.G.transpose() * z;
      const RVec ey = by - sf_.A * x;
      const RVec ez = bz - (sf_.G * x - zz);
      const double err = std::sqrt(ex.squaredNorm() + ey.squaredNorm() + ez.squaredNorm());
      if (err <= 1e-14 * bnorm || err >= 0.5 * prev) break;
      prev = err;
      RVec cx, cy, cz;
      raw_solve(ex, ey, ez, cx, cy, cz);
      x += cx;
      y += cy;
      z += cz;
    }
  }

 private:
  static bool factor_spd(RMat& M, Eigen::LLT<RMat>& out) {
    const double scale = std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    for (double reg : {0.0, 1e-13, 1e-11, 1e-9}) {
      RMat T = M;
      T.diagonal().array() += reg * scale;
      out.compute(T);
      if (out.info() == Eigen::Success) return true;
    }
    return false;
  }

  void raw_solve(const RVec& bx, const RVec& by, const RVec& bz, RVec& x, RVec& y, RVec& z) const {
    RVec t = bz;
    w_->apply_wtw(sf_.dims, t);
    RVec r1 = bx + sf_.G.transpose() * t;
    if (sf_.A.rows() > 0) {
      r1 += sf_.A.transpose() * by;
      const RVec kr = kfac_.solve(r1);
      y = sfac_.solve(sf_.A * kr - by);
      x = kr - kat_ * y;
    } else {
      y.resize(0);
      x = kfac_.solve(r1);
    }
    z = sf_.G * x - bz;
    w_->apply_wtw(sf_.dims, z);
  }

  const StandardForm& sf_;
  const Scaling* w_ = nullptr;
  Eigen::LLT<RMat> kfac_;
  Eigen::LLT<RMat> sfac_;
  RMat kat_;
};

struct Iterate {
  RVec x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

struct Residuals {
  double pres = kInf, dres = kInf, gap = kInf, relgap = kInf;
  double pinf = kInf, dinf = kInf;
  double pcost = 0.0, dcost = 0.0;
};

class Ipm {
 public:
  Ipm(const StandardForm& sf, const SolveOptions& opts) : sf_(sf), opts_(opts), kkt_(sf) {
    resx0_ = std::max(1.0, sf.c.norm());
    resy0_ = std::max(1.0, sf.b.size() ? sf.b.norm() : 0.0);
    resz0_ = std::max(1.0, sf.h.norm());
  }

  SolveResult run() {
    const auto& dims = sf_.dims;
    const RVec e = detail::identity(dims);
    Iterate it;
    Status status = Status::NumericalFailure;

    if (!initial_point(it, e)) return finish(it, status, Residuals{}, 0);

    Residuals res;
    // best iterate seen, as a fallback when the iteration later loses accuracy
    Iterate best = it;
    Residuals best_res;
    double best_merit = kInf;
    int iter = 0;
    for (;; ++iter) {
      // residuals of the homogeneous embedding
      const RVec rx = sf_.A.transpose() * it.y + sf_.G.transpose() * it.z + sf_.c * it.tau;
      const RVec ry = sf_.A * it.x - sf_.b * it.tau;
      const RVec rz = it.s + sf_.G * it.x - sf_.h * it.tau;
      const double cx = sf_.c.dot(it.x);
      const double by = sf_.b.dot(it.y);
      const double hz = sf_.h.dot(it.z);
      const double rt = it.kappa + cx + by + hz;
      const double sz = it.s.dot(it.z);
      const double mu = (sz + it.tau * it.kappa) / (dims.degree() + 1);

      res = residuals(it, rx, ry, rz, cx, by, hz, sz);
      const double merit = std::max({res.pres, res.dres, std::min(res.relgap, res.gap * opts_.tol / opts_.abstol)});
      if (merit < best_merit) {
        best_merit = merit;
        best = it;
        best_res = res;
      }
      if (opts_.verbose)
        std::fprintf(stderr, "%3d pcost %+.6e dcost %+.6e gap %.2e pres %.2e dres %.2e tau %.2e kap %.2e\n", iter,
                     res.pcost, res.dcost, res.gap, res.pres, res.dres, it.tau, it.kappa);
      if (res.pres <= opts_.tol && res.dres <= opts_.tol &&
          (res.gap <= opts_.abstol || res.relgap <= opts_.tol)) {
        status = Status::Optimal;
        break;
      }
      if (res.pinf <= opts_.tol) {
        status = Status::Infeasible;
        break;
      }
      if (res.dinf <= opts_.tol) {
        status = Status::Unbounded;
        break;
      }
      if (iter >= opts_.max_iters) break;
      // lost accuracy past the best point, further steps only make it worse
      if (merit > 1e3 * best_merit && best_merit <= 1e3 * opts_.tol) break;

      if (!w_.compute(dims, it.s, it.z) || !kkt_.factor(w_)) break;
      const RVec& lam = w_.lambda;

      RVec u2x, u2y, u2z;
      {
        RVec hy = sf_.b;
        kkt_.solve(-sf_.c, hy, sf_.h, u2x, u2y, u2z);
      }
      const double p2 = sf_.c.dot(u2x) + sf_.b.dot(u2y) + sf_.h.dot(u2z);

      const RVec lamsq = detail::jordan_product(dims, lam, lam);
      RVec ds_aff, dz_aff;
      double dtau_aff = 0.0, dkappa_aff = 0.0;
      double sigma = 0.0;
      double alpha = 0.0;
      Iterate step;
      bool ok = true;

      for (int pass = 0; pass < 2 && ok; ++pass) {
        const double eta = pass == 0 ? 0.0 : sigma;
        const double ef = 1.0 - eta;
        RVec rho = -lamsq;
        double rho_t = -it.tau * it.kappa;
        if (pass == 1) {
          rho -= detail::jordan_product(dims, ds_aff, dz_aff);
          rho += sigma * mu * e;
          rho_t += -dtau_aff * dkappa_aff + sigma * mu;
        }
        const RVec ut = detail::jordan_solve(dims, lam, rho);
        RVec wiu = ut;
        w_.apply(dims, wiu, false, true);

        RVec u1x, u1y, u1z;
        kkt_.solve(-ef * rx, -ef * ry, -ef * rz - wiu, u1x, u1y, u1z);
        const double p1 = sf_.c.dot(u1x) + sf_.b.dot(u1y) + sf_.h.dot(u1z);
        const double den = it.kappa - it.tau * p2;
        if (!(std::abs(den) > 0.0) || !std::isfinite(den)) {
          ok = false;
          break;
        }
        const double dtau = (rho_t + it.tau * (ef * rt + p1)) / den;
        const double dkappa = -ef * rt - p1 - dtau * p2;
        step.x = u1x + dtau * u2x;
        step.y = u1y + dtau * u2y;
        step.z = u1z + dtau * u2z;
        RVec dzt = step.z;
        w_.apply(dims, dzt, true, true);
        const RVec dst = ut - dzt;
        step.s = dst;
        w_.apply(dims, step.s, false, true);
        step.tau = dtau;
        step.kappa = dkappa;

        double amax = std::min(detail::max_step(dims, lam, dst), detail::max_step(dims, lam, dzt));
        if (dtau < 0.0) amax = std::min(amax, -it.tau / dtau);
        if (dkappa < 0.0) amax = std::min(amax, -it.kappa / dkappa);
        if (pass == 0) {
          const double aa = std::min(1.0, amax);
          sigma = std::pow(1.0 - aa, 3);
          ds_aff = dst;
          dz_aff = dzt;
          dtau_aff = dtau;
          dkappa_aff = dkappa;
        } else {
          alpha = std::min(1.0, 0.99 * amax);
        }
        if (!std::isfinite(step.x.squaredNorm()) || !std::isfinite(step.z.squaredNorm())) ok = false;
      }
      if (!ok || alpha < 1e-12) break;

      it.x += alpha * step.x;
      it.y += alpha * step.y;
      it.z += alpha * step.z;
      it.s += alpha * step.s;
      it.tau += alpha * step.tau;
      it.kappa += alpha * step.kappa;
      symmetrize(it.s);
      symmetrize(it.z);
    }

    if (status == Status::NumericalFailure) {
      // Stalled close to the tolerance: accept the best iterate at reduced accuracy.
      it = best;
      res = best_res;
      const double loose = 1e3 * opts_.tol;
      if (res.pres <= loose && res.dres <= loose && (res.gap <= 1e3 * opts_.abstol || res.relgap <= loose))
        status = Status::Optimal;
    }
    return finish(it, status, res, iter);
  }

 private:
  void symmetrize(RVec& u) const {
    for (std::size_t k = 0; k < sf_.dims.psd.size(); ++k) {
      const int n = sf_.dims.psd[k];
      detail::Block b(u.data() + sf_.dims.psd_offset(static_cast<int>(k)), n, n);
      const RMat t = 0.5 * (b + b.transpose());
      b = t;
    }
  }

  bool initial_point(Iterate& it, const RVec& e) {
    const auto& dims = sf_.dims;
    Scaling id;
    id.d = RVec::Ones(dims.lp);
    for (int q : dims.soc) {
      id.beta.push_back(1.0);
      RVec v = RVec::Zero(q);
      v(0) = 1.0;
      id.v.push_back(v);
    }
    for (int n : dims.psd) {
      id.r.push_back(RMat::Identity(n, n));
      id.rinv.push_back(RMat::Identity(n, n));
    }
    id.lambda = e;
    w_ = id;
    if (!kkt_.factor(w_)) return false;

    RVec y0, z0;
    kkt_.solve(RVec::Zero(sf_.n), sf_.b, sf_.h, it.x, y0, z0);
    it.s = -z0;
    RVec x1;
    kkt_.solve(-sf_.c, RVec::Zero(sf_.b.size()), RVec::Zero(dims.total()), x1, it.y, it.z);
    symmetrize(it.s);
    symmetrize(it.z);

    const double ts = -detail::min_eigenvalue(dims, it.s);
    const double tz = -detail::min_eigenvalue(dims, it.z);
    if (ts >= -1e-8 * std::max(1.0, it.s.norm())) it.s += (1.0 + ts) * e;
    if (tz >= -1e-8 * std::max(1.0, it.z.norm())) it.z += (1.0 + tz) * e;
    it.tau = 1.0;
    it.kappa = 1.0;
    return it.x.allFinite() && it.z.allFinite() && it.s.allFinite();
  }

  Residuals residuals(const Iterate& it, const RVec& rx, const RVec& ry, const RVec& rz, double cx, double by,
                      double hz, double sz) const {
    Residuals r;
    r.pcost = cx / it.tau;
    r.dcost = -(by + hz) / it.tau;
    r.gap = sz / (it.tau * it.tau);
    if (r.pcost < 0.0)
      r.relgap = r.gap / -r.pcost;
    else if (r.dcost > 0.0)
      r.relgap = r.gap / r.dcost;
    // relative to the data and to the size of the terms that should cancel
    const double t = it.tau;
    const double ny = ry.size() ? ry.norm() / std::max(t * resy0_, (sf_.A * it.x).norm()) : 0.0;
    const double nz = rz.norm() / std::max({t * resz0_, (sf_.G * it.x).norm(), it.s.norm()});
    r.pres = std::max(ny, nz);
    const double atz = (sf_.A.transpose() * it.y).norm() + (sf_.G.transpose() * it.z).norm();
    r.dres = rx.norm() / std::max(t * resx0_, atz);
    if (by + hz < 0.0) {
      const RVec aty = sf_.A.transpose() * it.y + sf_.G.transpose() * it.z;
      r.pinf = aty.norm() / resx0_ / -(by + hz);
    }
    if (cx < 0.0) {
      const RVec gs = sf_.G * it.x + it.s;
      const double ax = sf_.b.size() ? (sf_.A * it.x).norm() / resy0_ : 0.0;
      r.dinf = std::max(ax, gs.norm() / resz0_) / -cx;
    }
    return r;
  }

  SolveResult finish(const Iterate& it, Status status, const Residuals& res, int iter) const {
    SolveResult out;
    out.status = status;
    out.stats.iterations = iter;
    out.stats.primal_residual = res.pres;
    out.stats.dual_residual = res.dres;
    out.stats.gap = res.gap / sf_.cost_scale;
    out.stats.relative_gap = res.relgap;
    const double tau = (status == Status::Infeasible || status == Status::Unbounded || it.tau <= 0.0) ? 1.0 : it.tau;
    RVec xs = it.x.size() == sf_.n ? RVec(it.x / tau) : RVec::Zero(sf_.n);
    const double cs = sf_.cost_scale;
    out.stats.primal_objective = sf_.sign * res.pcost / cs + sf_.c0;
    out.stats.dual_objective = sf_.sign * res.dcost / cs + sf_.c0;
    out.objective_value = sf_.sign * sf_.c.dot(xs) / cs + sf_.c0;
    out.primal = xs.cwiseProduct(sf_.col_scale);
    out.duals.resize(sf_.slots.size());
    for (std::size_t i = 0; i < sf_.slots.size(); ++i) {
      const auto& sl = sf_.slots[i];
      const RVec& src = sl.eq ? it.y : it.z;
      const RVec& sc = sl.eq ? sf_.eq_scale : sf_.row_scale;
      if (src.size() >= sl.start + sl.len)
        out.duals[i] = src.segment(sl.start, sl.len).cwiseProduct(sc.segment(sl.start, sl.len)) / (tau * cs);
      else
        out.duals[i] = RVec::Zero(sl.len);
    }
    return out;
  }

  const StandardForm& sf_;
  SolveOptions opts_;
  Kkt kkt_;
  Scaling w_;
  double resx0_, resy0_, resz0_;
};

}  // namespace

SolveResult solve(const ConicProblem& problem, const SolveOptions& opts) {
  const StandardForm sf = build(problem);
  Ipm ipm(sf, opts);
  return ipm.run();
}

}  // namespace hetsec::conic
