#include "epf/numkernel/matrix.hpp"

#include "epf/errors.hpp"

#include <cmath>

namespace epf::numkernel {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return Matrix(0, 0);
    }
    const auto cols = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw ShapeError("ragged rows: row " + std::to_string(r) + " has " +
                             std::to_string(rows[r].size()) + " values, expected " +
                             std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

Vector to_vector(std::span<const double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = values[i];
    }
    return v;
}

std::vector<double> flatten(const Matrix& m) {
    return std::vector<double>(m.data(), m.data() + m.size());
}

Matrix unflatten(std::size_t rows, std::size_t cols, std::span<const double> values) {
    if (values.size() != rows * cols) {
        throw ShapeError("value count " + std::to_string(values.size()) + " != " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::copy(values.begin(), values.end(), m.data());
    return m;
}

bool all_finite(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!std::isfinite(m.data()[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace epf::numkernel
