#include "hetsec/conic/embed.hpp"

namespace hetsec::conic {

RVec embed_vector(const CVec& w) {
  RVec p(2 * w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    p(2 * i) = w(i).real();
    p(2 * i + 1) = w(i).imag();
  }
  return p;
}

CVec unembed_vector(const RVec& p) {
  if (p.size() % 2 != 0) throw DimensionError("interleaved complex vector needs even length");
  CVec w(p.size() / 2);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = cplx(p(2 * i), p(2 * i + 1));
  return w;
}

RVec hermitian_to_params(const CMat& x) {
  const auto d = x.rows();
  if (x.cols() != d) throw DimensionError("hermitian block must be square");
  RVec p(d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    p(a * d + a) = x(a, a).real();
    for (Eigen::Index b = a + 1; b < d; ++b) {
      p(a * d + b) = x(a, b).real();
      p(b * d + a) = x(a, b).imag();
    }
  }
  return p;
}

CMat params_to_hermitian(const RVec& p, int dim) {
  if (p.size() != static_cast<Eigen::Index>(dim) * dim)
    throw DimensionError("parameter count does not match hermitian size");
  CMat x(dim, dim);
  for (int a = 0; a < dim; ++a) {
    x(a, a) = p(a * dim + a);
    for (int b = a + 1; b < dim; ++b) {
      x(a, b) = cplx(p(a * dim + b), p(b * dim + a));
      x(b, a) = std::conj(x(a, b));
    }
  }
  return x;
}

RMat hermitian_to_real_symmetric(const CMat& x) {
  const auto d = x.rows();
  RMat s(2 * d, 2 * d);
  s.topLeftCorner(d, d) = x.real();
  s.bottomRightCorner(d, d) = x.real();
  s.bottomLeftCorner(d, d) = x.imag();
  s.topRightCorner(d, d) = -x.imag();
  return s;
}

CMat real_symmetric_to_hermitian(const RMat& s) {
  if (s.rows() != s.cols() || s.rows() % 2 != 0)
    throw DimensionError("embedded block must be square with even size");
  const auto d = s.rows() / 2;
  const RMat re = 0.5 * (s.topLeftCorner(d, d) + s.bottomRightCorner(d, d));
  const RMat im = 0.5 * (s.bottomLeftCorner(d, d) - s.topRightCorner(d, d));
  CMat x(d, d);
  x.real() = re;
  x.imag() = im;
  return x;
}

}  // namespace hetsec::conic
