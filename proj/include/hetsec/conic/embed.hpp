#pragma once

// Complex-to-real parameterizations used by the conic layer.
//
// Complex vector w of length d -> 2d reals, interleaved:
//   (Re w0, Im w0, Re w1, Im w1, ...)
//
// Hermitian X of size d -> d*d reals p, row-major slots p[a*d + b]:
//   a == b : X_aa                (real diagonal)
//   a <  b : Re X_ab
//   a >  b : Im X_ba             (imaginary part of the upper entry X_ba, b < a)
// so X_ab = p[a*d+b] + i p[b*d+a] for a < b.
//
// PSD membership of X is imposed on the real symmetric 2d x 2d matrix
//   [ Re X  -Im X ]
//   [ Im X   Re X ]
// whose spectrum is that of X with every eigenvalue doubled in multiplicity.

#include "hetsec/types.hpp"

namespace hetsec::conic {

RVec embed_vector(const CVec& w);
CVec unembed_vector(const RVec& p);

RVec hermitian_to_params(const CMat& x);
CMat params_to_hermitian(const RVec& p, int dim);

RMat hermitian_to_real_symmetric(const CMat& x);
/// Inverse of hermitian_to_real_symmetric; averages the two copies, so it is
/// also the orthogonal projection of an arbitrary symmetric 2d x 2d matrix onto
/// the embedded subspace.
CMat real_symmetric_to_hermitian(const RMat& s);

}  // namespace hetsec::conic
