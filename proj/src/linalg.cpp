#include "hetsec/linalg.hpp"

#include <cmath>

namespace hetsec {

CMat stack_rows(const std::vector<CRow>& rows) {
  if (rows.empty()) return CMat();
  CMat g(static_cast<Eigen::Index>(rows.size()), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != g.cols()) throw DimensionError("rows of different length");
    g.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return g;
}

CMat null_space_basis(const CMat& g) {
  const auto r = g.rows();
  const auto n = g.cols();
  if (r >= n) throw DimensionError("matrix has no null space");
  if (r == 0) return CMat::Identity(n, n);
  Eigen::JacobiSVD<CMat> svd(g, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(r - 1) <= 1e-10 * std::max(1.0, sv(0))) throw DegenerateChannel("rank-deficient channel matrix");
  return svd.matrixV().rightCols(n - r);
}

CVec project_to_null_space(const CMat& g, const CVec& v) {
  const CMat V = null_space_basis(g);
  const CVec p = V * (V.adjoint() * v);
  const double nrm = p.norm();
  if (nrm <= 1e-12 * std::max(1.0, v.norm())) throw DegenerateChannel("vector orthogonal to the null space");
  return p / nrm;
}

CVec fix_phase(CVec v, double eps) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > eps) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return v;
}

}  // namespace hetsec
