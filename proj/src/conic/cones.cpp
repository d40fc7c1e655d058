#include "cones.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hetsec::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double jdot(const RVec& a, const RVec& b) { return a(0) * b(0) - a.tail(a.size() - 1).dot(b.tail(b.size() - 1)); }

RVec jflip(RVec a) {
  a.tail(a.size() - 1) *= -1.0;
  return a;
}

// Smallest positive root of q(a) = (l0 + a d0)^2 - |l1 + a d1|^2, the point
// where the ray leaves the second-order cone.
double soc_step(const RVec& l, const RVec& d) {
  const auto n = l.size() - 1;
  const double qa = d(0) * d(0) - d.tail(n).squaredNorm();
  const double qb = l(0) * d(0) - l.tail(n).dot(d.tail(n));
  const double qc = l(0) * l(0) - l.tail(n).squaredNorm();
  if (qc <= 0.0) return 0.0;
  double best = kInf;
  const double scale = std::max({std::abs(qa), std::abs(qb), qc});
  if (std::abs(qa) <= 1e-300 * scale) {
    // linear: 2 qb a + qc = 0
    if (qb < 0.0) best = -qc / (2.0 * qb);
    return best;
  }
  const double disc = qb * qb - qa * qc;
  if (disc < 0.0) return kInf;  // q never vanishes
  const double sq = std::sqrt(disc);
  // roots = qc / (-qb +- sq), written to avoid cancellation
  for (double den : {-qb + sq, -qb - sq}) {
    if (den > 0.0) best = std::min(best, qc / den);
  }
  return best;
}

}  // namespace

int ConeDims::total() const {
  int t = lp;
  for (int q : soc) t += q;
  for (int s : psd) t += s * s;
  return t;
}

int ConeDims::degree() const { return lp + static_cast<int>(soc.size()) + std::accumulate(psd.begin(), psd.end(), 0); }

int ConeDims::soc_offset(int k) const {
  int off = lp;
  for (int i = 0; i < k; ++i) off += soc[i];
  return off;
}

int ConeDims::psd_offset(int k) const {
  int off = lp;
  for (int q : soc) off += q;
  for (int i = 0; i < k; ++i) off += psd[i] * psd[i];
  return off;
}

bool Scaling::compute(const ConeDims& dims, const RVec& s, const RVec& z) {
  const int m = dims.total();
  lambda.resize(m);
  d.resize(dims.lp);
  for (int i = 0; i < dims.lp; ++i) {
    if (!(s(i) > 0.0) || !(z(i) > 0.0)) return false;
    d(i) = std::sqrt(z(i) / s(i));
    lambda(i) = std::sqrt(s(i) * z(i));
  }

  const auto nsoc = dims.soc.size();
  beta.resize(nsoc);
  v.resize(nsoc);
  for (std::size_t k = 0; k < nsoc; ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    const RVec sk = s.segment(off, q);
    const RVec zk = z.segment(off, q);
    const double sn = jdot(sk, sk);
    const double zn = jdot(zk, zk);
    if (!(sn > 0.0) || !(zn > 0.0) || sk(0) <= 0.0 || zk(0) <= 0.0) return false;
    const RVec sb = sk / std::sqrt(sn);
    const RVec zb = zk / std::sqrt(zn);
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    // scaling point with P(w) s = z for the normalized pair
    const RVec wb = (zb + jflip(sb)) / (2.0 * gamma);
    RVec vk = wb;
    vk(0) += 1.0;
    vk /= std::sqrt(2.0 * (wb(0) + 1.0));
    beta[k] = std::pow(zn / sn, 0.25);
    v[k] = vk;
    // lambda = W s
    RVec ls = 2.0 * vk * vk.dot(sk) - jflip(sk);
    lambda.segment(off, q) = beta[k] * ls;
  }

  const auto npsd = dims.psd.size();
  r.resize(npsd);
  rinv.resize(npsd);
  for (std::size_t k = 0; k < npsd; ++k) {
    const int n = dims.psd[k];
    const int off = dims.psd_offset(static_cast<int>(k));
    const ConstBlock sk(s.data() + off, n, n);
    const ConstBlock zk(z.data() + off, n, n);
    Eigen::LLT<RMat> ls(0.5 * (sk + sk.transpose()));
    Eigen::LLT<RMat> lz(0.5 * (zk + zk.transpose()));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const RMat Ls = ls.matrixL();
    const RMat Lz = lz.matrixL();
    Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVec sv = svd.singularValues();
    if (!(sv.minCoeff() > 0.0)) return false;
    const RVec isq = sv.cwiseSqrt().cwiseInverse();
    r[k] = Lz * svd.matrixU() * isq.asDiagonal();
    rinv[k] = isq.asDiagonal() * svd.matrixV().transpose() * Ls.transpose();
    Block lk(lambda.data() + off, n, n);
    lk.setZero();
    lk.diagonal() = sv;
  }
  return true;
}

void Scaling::apply(const ConeDims& dims, RVec& u, bool trans, bool inverse) const {
  if (inverse)
    u.head(dims.lp).array() /= d.array();
  else
    u.head(dims.lp).array() *= d.array();

  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    auto seg = u.segment(off, q);
    const RVec& vk = v[k];
    if (!inverse) {
      const double vu = vk.dot(seg);
      RVec out = 2.0 * vu * vk - jflip(seg);
      seg = beta[k] * out;
    } else {
      // W^{-1} = (2 J v v^T J - J) / beta
      const RVec jv = jflip(vk);
      const double vu = jv.dot(seg);
      RVec out = 2.0 * vu * jv - jflip(seg);
      seg = out / beta[k];
    }
  }

  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    const int off = dims.psd_offset(static_cast<int>(k));
    Block uk(u.data() + off, n, n);
    const RMat& rk = inverse ? rinv[k] : r[k];
    // W: r^T U r, W^T: r U r^T, W^{-1}: rinv^T U rinv, W^{-T}: rinv U rinv^T
    RMat out;
    if (!trans)
      out = rk.transpose() * uk * rk;
    else
      out = rk * uk * rk.transpose();
    uk = out;
  }
}

void Scaling::apply_wtw(const ConeDims& dims, RVec& u) const {
  apply(dims, u, false, false);
  apply(dims, u, true, false);
}

void Scaling::apply_wtw_inv(const ConeDims& dims, RVec& u) const {
  apply(dims, u, true, true);
  apply(dims, u, false, true);
}

RVec jordan_product(const ConeDims& dims, const RVec& x, const RVec& y) {
  RVec out(x.size());
  out.head(dims.lp) = x.head(dims.lp).cwiseProduct(y.head(dims.lp));
  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    const auto xs = x.segment(off, q);
    const auto ys = y.segment(off, q);
    out(off) = xs.dot(ys);
    out.segment(off + 1, q - 1) = xs(0) * ys.tail(q - 1) + ys(0) * xs.tail(q - 1);
  }
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    const int off = dims.psd_offset(static_cast<int>(k));
    const ConstBlock xk(x.data() + off, n, n);
    const ConstBlock yk(y.data() + off, n, n);
    Block ok(out.data() + off, n, n);
    ok = 0.5 * (xk * yk + yk * xk);
  }
  return out;
}

RVec jordan_solve(const ConeDims& dims, const RVec& lambda, const RVec& y) {
  RVec x(y.size());
  x.head(dims.lp) = y.head(dims.lp).cwiseQuotient(lambda.head(dims.lp));
  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    const auto l = lambda.segment(off, q);
    const auto r = y.segment(off, q);
    const double det = l(0) * l(0) - l.tail(q - 1).squaredNorm();
    const double x0 = (l(0) * r(0) - l.tail(q - 1).dot(r.tail(q - 1))) / det;
    x(off) = x0;
    x.segment(off + 1, q - 1) = (r.tail(q - 1) - x0 * l.tail(q - 1)) / l(0);
  }
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    const int off = dims.psd_offset(static_cast<int>(k));
    const ConstBlock lk(lambda.data() + off, n, n);
    const ConstBlock yk(y.data() + off, n, n);
    Block xk(x.data() + off, n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) xk(i, j) = 2.0 * yk(i, j) / (lk(i, i) + lk(j, j));
  }
  return x;
}

RVec identity(const ConeDims& dims) {
  RVec e = RVec::Zero(dims.total());
  e.head(dims.lp).setOnes();
  for (std::size_t k = 0; k < dims.soc.size(); ++k) e(dims.soc_offset(static_cast<int>(k))) = 1.0;
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    Block ek(e.data() + dims.psd_offset(static_cast<int>(k)), n, n);
    ek.diagonal().setOnes();
  }
  return e;
}

double min_eigenvalue(const ConeDims& dims, const RVec& x) {
  double m = kInf;
  if (dims.lp > 0) m = x.head(dims.lp).minCoeff();
  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    m = std::min(m, x(off) - x.segment(off + 1, q - 1).norm());
  }
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    const ConstBlock xk(x.data() + dims.psd_offset(static_cast<int>(k)), n, n);
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (xk + xk.transpose()), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

double max_step(const ConeDims& dims, const RVec& lambda, const RVec& dx) {
  double a = kInf;
  for (int i = 0; i < dims.lp; ++i)
    if (dx(i) < 0.0) a = std::min(a, -lambda(i) / dx(i));
  for (std::size_t k = 0; k < dims.soc.size(); ++k) {
    const int off = dims.soc_offset(static_cast<int>(k));
    const int q = dims.soc[k];
    a = std::min(a, soc_step(lambda.segment(off, q), dx.segment(off, q)));
  }
  for (std::size_t k = 0; k < dims.psd.size(); ++k) {
    const int n = dims.psd[k];
    const int off = dims.psd_offset(static_cast<int>(k));
    const ConstBlock lk(lambda.data() + off, n, n);
    const ConstBlock dk(dx.data() + off, n, n);
    const RVec isq = lk.diagonal().cwiseSqrt().cwiseInverse();
    const RMat sym = isq.asDiagonal() * (0.5 * (dk + dk.transpose())) * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues()(0);
    if (mn < 0.0) a = std::min(a, -1.0 / mn);
  }
  return a;
}

}  // namespace hetsec::conic::detail
