#include "cases.hpp"
#include "naive.hpp"

#include "epf/explain/shap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace epf::oracles {

namespace {

using naive::Lcg;
using numkernel::Matrix;
using numkernel::Vector;

void keep_worst(Outcome& worst, double gap, const std::string& where) {
    if (!(gap <= worst.deviation)) worst = {gap, where};
}

// Nonlinear test model with pairwise interactions; width is free.
double model(const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += std::sin(0.7 * (j + 1) * x[j]);
    for (std::size_t j = 0; j + 1 < x.size(); ++j) s += 0.5 * x[j] * x[j + 1];
    return std::tanh(0.3 * s) + 0.1 * s;
}

explain::Predictor predictor() {
    return [](const Matrix& m) {
        Vector out(m.rows());
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::vector<double> x(m.row(r).begin(), m.row(r).end());
            out(r) = model(x);
        }
        return out;
    };
}

// Mean model output with the features in `present` taken from the instance.
double value(const std::vector<std::vector<double>>& bg, const std::vector<double>& inst, unsigned present) {
    double s = 0.0;
    for (auto x : bg) {
        for (std::size_t j = 0; j < x.size(); ++j)
            if (present >> j & 1u) x[j] = inst[j];
        s += model(x);
    }
    return s / bg.size();
}

struct Instance {
    std::vector<std::vector<double>> bg;
    std::vector<double> x;
    Matrix bg_matrix;
    Vector x_vector;
};

Instance draw(Lcg& g, std::size_t d, std::size_t rows) {
    Instance in;
    in.bg.assign(rows, std::vector<double>(d));
    in.bg_matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < d; ++j) in.bg_matrix(r, j) = in.bg[r][j] = g.normal();
    in.x.resize(d);
    in.x_vector.resize(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) in.x_vector(j) = in.x[j] = g.uniform(-2.0, 2.0);
    return in;
}

// Marginal contributions averaged over every feature ordering.
std::vector<double> permutation_shapley(const Instance& in) {
    const std::size_t d = in.x.size();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(d, 0.0);
    double count = 0.0;
    do {
        unsigned present = 0;
        double before = value(in.bg, in.x, present);
        for (auto j : order) {
            present |= 1u << j;
            const double after = value(in.bg, in.x, present);
            phi[j] += after - before;
            before = after;
        }
        count += 1.0;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& p : phi) p /= count;
    return phi;
}

// Subset weights |S|! (d - |S| - 1)! / d! evaluated in floating point.
std::vector<double> subset_shapley(const Instance& in) {
    const std::size_t d = in.x.size();
    std::vector<double> v(1u << d);
    for (unsigned s = 0; s < v.size(); ++s) v[s] = value(in.bg, in.x, s);
    std::vector<double> fact(d + 1, 1.0);
    for (std::size_t k = 1; k <= d; ++k) fact[k] = fact[k - 1] * k;
    std::vector<double> phi(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
        for (unsigned s = 0; s < v.size(); ++s) {
            if (s >> j & 1u) continue;
            const auto size = static_cast<std::size_t>(__builtin_popcount(s));
            phi[j] += fact[size] * fact[d - size - 1] / fact[d] * (v[s | 1u << j] - v[s]);
        }
    return phi;
}

Outcome kernel_vs_enumeration(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (std::size_t d = 2; d <= 10; ++d) {
        const auto in = draw(g, d, 12);
        const auto oracle = d <= 6 ? permutation_shapley(in) : subset_shapley(in);
        const auto ex = explain::kernel_shap(predictor(), in.x_vector, {in.bg_matrix},
                                             {.n_coalitions = std::max((std::size_t{1} << d) - 2, d + 2), .seed = seed});
        for (std::size_t j = 0; j < d; ++j)
            keep_worst(worst, std::abs(ex.phi[j] - oracle[j]), "d " + std::to_string(d) + " feature " + std::to_string(j));
    }
    return worst;
}

// Sampled coalitions still distribute exactly f(x) - E f.
Outcome efficiency(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 10; ++trial) {
        const auto in = draw(g, 14, 20);
        const auto ex = explain::kernel_shap(predictor(), in.x_vector, {in.bg_matrix},
                                             {.n_coalitions = 300, .seed = seed + trial});
        const double total = std::accumulate(ex.phi.begin(), ex.phi.end(), 0.0);
        const double want = model(in.x) - value(in.bg, in.x, 0);
        keep_worst(worst, std::abs(total - want), "trial " + std::to_string(trial));
    }
    return worst;
}

// f = x0 x1 + 0 x2 + x3: phi0 = phi1 for a symmetric instance and background, phi2 = 0.
Outcome symmetry_dummy(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    const explain::Predictor f = [](const Matrix& m) {
        Vector out(m.rows());
        for (Eigen::Index r = 0; r < m.rows(); ++r) out(r) = m(r, 0) * m(r, 1) + m(r, 3);
        return out;
    };
    for (int trial = 0; trial < 10; ++trial) {
        Matrix bg(8, 4);
        for (Eigen::Index r = 0; r < 8; ++r) {
            const double shared = g.normal();
            bg.row(r) << shared, shared, g.normal(), g.normal();
        }
        Vector x(4);
        const double shared = g.uniform(-2.0, 2.0);
        x << shared, shared, g.uniform(-2.0, 2.0), g.uniform(-2.0, 2.0);
        const auto ex = explain::kernel_shap(f, x, {bg}, {.n_coalitions = 14, .seed = seed});
        keep_worst(worst, std::abs(ex.phi[0] - ex.phi[1]), "symmetry, trial " + std::to_string(trial));
        keep_worst(worst, std::abs(ex.phi[2]), "dummy, trial " + std::to_string(trial));
    }
    return worst;
}

Outcome linear_closed_form(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index d = 20;
        Vector beta(d);
        for (Eigen::Index j = 0; j < d; ++j) beta(j) = g.uniform(-3.0, 3.0);
        const explain::Predictor f = [beta](const Matrix& m) { return Vector(m * beta); };
        Matrix bg(30, d);
        for (Eigen::Index k = 0; k < bg.size(); ++k) bg.data()[k] = g.normal();
        Vector x(d);
        for (Eigen::Index j = 0; j < d; ++j) x(j) = g.uniform(-2.0, 2.0);
        const auto ex = explain::kernel_shap(f, x, {bg}, {.n_coalitions = 2048, .seed = seed + trial});
        const Vector mean = bg.colwise().mean().transpose();
        for (Eigen::Index j = 0; j < d; ++j)
            keep_worst(worst, std::abs(ex.phi[j] - beta(j) * (x(j) - mean(j))), "trial " + std::to_string(trial));
    }
    return worst;
}

}  // namespace

void add_explain_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"explain.kernel_vs_enumeration", "explain", 61,
                     "permutation average for d <= 6, subset formula for d <= 10; full coalition budget", 1e-3,
                     kernel_vs_enumeration});
    cases.push_back({"explain.efficiency", "explain", 62, "sum of attributions equals f(x) minus the base value",
                     1e-9, efficiency});
    cases.push_back({"explain.symmetry_dummy", "explain", 63, "interchangeable features tie; unused feature is zero",
                     1e-9, symmetry_dummy});
    cases.push_back({"explain.linear_closed_form", "explain", 64, "beta_j (x_j - background mean_j) at d = 20", 1e-3,
                     linear_closed_form});
}

}  // namespace epf::oracles
