#pragma once

#include <vector>

#include "hetsec/types.hpp"

namespace hetsec {

/// Stack row vectors into a matrix.
CMat stack_rows(const std::vector<CRow>& rows);

/// Orthonormal basis (columns) of the null space of a full-row-rank matrix g,
/// n x (n - rows). Throws DegenerateChannel when g is rank deficient and
/// DimensionError when g has no null space.
CMat null_space_basis(const CMat& g);

/// Unit vector along the projection of v onto the null space of g; throws
/// DegenerateChannel when the projection vanishes.
CVec project_to_null_space(const CMat& g, const CVec& v);

/// Rotate v so its first entry with magnitude above `eps` is real and positive.
CVec fix_phase(CVec v, double eps = 1e-12);

}  // namespace hetsec
