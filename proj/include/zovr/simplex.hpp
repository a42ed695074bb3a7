#ifndef ZOVR_SIMPLEX_HPP
#define ZOVR_SIMPLEX_HPP

#include "zovr/core.hpp"

namespace zovr {

/// Euclidean projection onto {y : sum y = 1, y >= 0} by sorting and
/// thresholding.
Vector project_simplex(const Vector& v);

}  // namespace zovr

#endif  // ZOVR_SIMPLEX_HPP
