#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace epf::numkernel {

// Dense row-major matrix of doubles. Row-major keeps the storage order equal
// to the serialized `values` layout.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Builds a matrix from nested rows; every row must have the same length.
Matrix from_rows(const std::vector<std::vector<double>>& rows);

// Copies a column of doubles into a vector.
Vector to_vector(std::span<const double> values);

std::vector<double> flatten(const Matrix& m);
Matrix unflatten(std::size_t rows, std::size_t cols, std::span<const double> values);

bool all_finite(const Matrix& m);

}  // namespace epf::numkernel
