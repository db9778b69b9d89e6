#include "epf/numkernel/linalg.hpp"

#include "epf/errors.hpp"

#include <string>

namespace epf::numkernel {

namespace {

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: " + dims(a) + " * " + dims(b));
    }
    Matrix out = a * b;
    return out;
}

Matrix least_squares(const Matrix& a, const Matrix& y) {
    if (a.rows() < 1 || y.rows() != a.rows()) {
        throw ShapeError("least_squares: design " + dims(a) + ", response " + dims(y));
    }
    // Column-major copy: Eigen's orthogonal decompositions are tuned for it.
    const Eigen::MatrixXd design = a;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    const Eigen::MatrixXd rhs = y;
    Matrix beta = cod.solve(rhs);
    return beta;
}

Vector least_squares(const Matrix& a, const Vector& y) {
    Matrix rhs = y;
    Matrix beta = least_squares(a, rhs);
    return beta.col(0);
}

}  // namespace epf::numkernel
