#pragma once

// Textbook routines on nested std::vector, kept apart from the library's
// Eigen-based kernels so that oracles never share code with what they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace epf::oracles::naive {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major

// Gaussian elimination with partial pivoting.
inline Vec solve(Mat a, Vec b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-300) throw std::runtime_error("naive::solve: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least squares through the normal equations X'X b = X'y.
inline Vec ols(const Mat& x, const Vec& y) {
    const std::size_t p = x.front().size();
    Mat xtx(p, Vec(p, 0.0));
    Vec xty(p, 0.0);
    for (std::size_t r = 0; r < x.size(); ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            xty[i] += x[r][i] * y[r];
            for (std::size_t j = 0; j < p; ++j) xtx[i][j] += x[r][i] * x[r][j];
        }
    }
    return solve(xtx, xty);
}

// Modified Gram-Schmidt on the columns of x (n x p, n >= p).
inline Mat orthonormal_columns(Mat x) {
    const std::size_t n = x.size(), p = x.front().size();
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += x[r][j] * x[r][k];
            for (std::size_t r = 0; r < n; ++r) x[r][j] -= dot * x[r][k];
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) norm += x[r][j] * x[r][j];
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < n; ++r) x[r][j] /= norm;
    }
    return x;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Student-t CDF by composite Simpson integration of the density from 0.
inline double student_t_cdf(double t, double df) {
    const double log_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) - 0.5 * std::log(df * M_PI);
    auto pdf = [&](double u) { return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(u * u / df)); };
    const double a = std::abs(t);
    const int n = 20000;  // even
    const double h = a / n;
    double s = pdf(0.0) + pdf(a);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * pdf(k * h);
    const double half = s * h / 3.0;
    return t >= 0 ? 0.5 + half : 0.5 - half;
}

// Oracle inputs come from a small LCG, independent of the library RNG.
class Lcg {
public:
    explicit Lcg(std::uint64_t seed) : state_(seed * 2862933555777941757ULL + 3037000493ULL) {}
    double uniform() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state_ >> 11) * (1.0 / 9007199254740992.0);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Box-Muller.
    double normal() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace epf::oracles::naive
