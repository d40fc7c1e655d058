#pragma once

// Cone algebra for the interior-point solver. Internal header.
//
// Cone vectors are laid out as [nonneg | soc_1 | ... | psd_1 | ...]; a PSD
// block of order s occupies s*s entries holding the full symmetric matrix in
// column-major order, so the Euclidean inner product equals the trace inner
// product.

#include <vector>

#include "hetsec/types.hpp"

namespace hetsec::conic::detail {

struct ConeDims {
  int lp = 0;
  std::vector<int> soc;  // cone dimensions (t plus x)
  std::vector<int> psd;  // matrix orders

  int total() const;
  int degree() const;  // lp + #soc + sum(psd)
  int soc_offset(int k) const;
  int psd_offset(int k) const;
};

using Block = Eigen::Map<RMat>;
using ConstBlock = Eigen::Map<const RMat>;

/// Nesterov-Todd scaling W for a pair (s, z) of interior points, satisfying
/// W s = W^{-T} z = lambda. Per cone:
///   nonneg  W = diag(d), d = sqrt(z/s)
///   soc     W = beta (2 v v^T - J), symmetric
///   psd     W(U) = r^T U r, W^{-1}(U) = rinv^T U rinv, lambda diagonal
struct Scaling {
  RVec d;
  std::vector<double> beta;
  std::vector<RVec> v;
  std::vector<RMat> r;
  std::vector<RMat> rinv;
  RVec lambda;

  /// Returns false when s or z has left the cone interior numerically.
  bool compute(const ConeDims& dims, const RVec& s, const RVec& z);

  /// u := W u, W^T u, W^{-1} u or W^{-T} u.
  void apply(const ConeDims& dims, RVec& u, bool trans, bool inverse) const;
  /// u := W^T W u.
  void apply_wtw(const ConeDims& dims, RVec& u) const;
  /// u := (W^T W)^{-1} u.
  void apply_wtw_inv(const ConeDims& dims, RVec& u) const;
};

/// x o y, the Jordan product.
RVec jordan_product(const ConeDims& dims, const RVec& x, const RVec& y);
/// Solve lambda o x = y for x, with lambda in the scaled (diagonal PSD) form.
RVec jordan_solve(const ConeDims& dims, const RVec& lambda, const RVec& y);
/// Identity element of the cone.
RVec identity(const ConeDims& dims);
/// Smallest "eigenvalue" of x over all cones (x in int K iff result > 0).
double min_eigenvalue(const ConeDims& dims, const RVec& x);
/// Largest alpha with lambda + alpha * dx in K, lambda in scaled form;
/// +inf when unbounded.
double max_step(const ConeDims& dims, const RVec& lambda, const RVec& dx);

}  // namespace hetsec::conic::detail
