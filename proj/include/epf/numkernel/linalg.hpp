#pragma once

#include "epf/numkernel/matrix.hpp"

namespace epf::numkernel {

// Standard matrix product; throws ShapeError when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

// Returns beta minimizing ||a * beta - y||^2. Rank-deficient systems get the
// minimum-norm solution (complete orthogonal decomposition).
Matrix least_squares(const Matrix& a, const Matrix& y);

Vector least_squares(const Matrix& a, const Vector& y);

}  // namespace epf::numkernel
