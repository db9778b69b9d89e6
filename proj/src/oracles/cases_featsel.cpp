#include "cases.hpp"
#include "naive.hpp"

#include "epf/featsel/elm.hpp"
#include "epf/featsel/genetic.hpp"
#include "epf/featsel/lasso.hpp"
#include "epf/featsel/pearson.hpp"
#include "epf/featsel/svr.hpp"
#include "epf/featsel/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace epf::oracles {

namespace {

using featsel::Bits;
using naive::Lcg;
using numkernel::Matrix;
using numkernel::Vector;

Matrix gaussian(Lcg& g, Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = g.normal();
    return m;
}

naive::Mat to_rows(const Matrix& m) {
    naive::Mat out(static_cast<std::size_t>(m.rows()), naive::Vec(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

void keep_worst(Outcome& worst, double gap, const std::string& where) {
    if (!(gap <= worst.deviation)) worst = {gap, where};
}

Outcome pearson_case(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(g.uniform() * 50);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = g.normal();
            y[i] = 0.5 * x[i] + g.normal();
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < n; ++i) mx += x[i] / n, my += y[i] / n;
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        keep_worst(worst, std::abs(featsel::pearson(x, y) - sxy / std::sqrt(sxx * syy)), "trial " + std::to_string(trial));
    }
    return worst;
}

// Output weights are the least-squares fit on the frozen hidden layer.
Outcome elm_case(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix x = gaussian(g, 40, 10);
        Vector y(40);
        for (Eigen::Index r = 0; r < 40; ++r) y(r) = std::sin(x(r, 0)) + 0.3 * x(r, 3) + 0.1 * g.normal();
        numkernel::Rng rng(seed + trial);
        featsel::ElmModel elm(10, 6, rng);
        Bits mask(10, 0);
        mask[0] = mask[3] = mask[5] = mask[8] = 1;
        elm.fit(mask, x, y);
        naive::Mat hidden(40, naive::Vec(6));
        for (int r = 0; r < 40; ++r) {
            for (int j = 0; j < 6; ++j) {
                double z = elm.hidden_bias()(0, j);
                for (int i = 0; i < 10; ++i) {
                    if (mask[i]) z += x(r, i) * elm.input_weights()(i, j);
                }
                hidden[r][j] = naive::sigmoid(z);
            }
        }
        const auto w2 = naive::ols(hidden, naive::Vec(y.begin(), y.end()));
        const Vector got = elm.predict(x);
        for (int r = 0; r < 40; ++r) {
            double want = 0.0;
            for (int j = 0; j < 6; ++j) want += hidden[r][j] * w2[j];
            keep_worst(worst, std::abs(got(r) - want), "trial " + std::to_string(trial) + " row " + std::to_string(r));
        }
    }
    return worst;
}

// Replays the swarm with the documented update and draw order and compares every evaluated position.
Outcome pso_velocity(std::uint64_t seed) {
    featsel::PsoConfig cfg;
    cfg.particles = 3;
    cfg.iterations = 8;
    cfg.c1 = 0.9;
    cfg.c2 = 0.6;
    cfg.inertia = 0.7;
    cfg.max_velocity = 0.3;
    const double lo = -2.0, hi = 3.0;
    const std::size_t dims = 3;
    auto sphere = [](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - 0.5 * j) * (x[j] - 0.5 * j);
        return s;
    };
    std::vector<std::vector<double>> visited;
    numkernel::Rng rng(seed);
    featsel::pso_minimize(
        [&](std::span<const double> x) {
            visited.emplace_back(x.begin(), x.end());
            return sphere(x);
        },
        dims, lo, hi, cfg, rng);

    numkernel::Rng replay(seed);
    struct P {
        std::vector<double> x, v, p;
        double pf;
    };
    std::vector<P> swarm(cfg.particles);
    std::vector<std::vector<double>> expected;
    std::vector<double> best;
    double best_f = std::numeric_limits<double>::infinity();
    for (auto& q : swarm) {
        for (std::size_t j = 0; j < dims; ++j) {
            q.x.push_back(lo + (hi - lo) * replay.uniform());
            q.v.push_back((-(hi - lo) + 2 * (hi - lo) * replay.uniform()) * 0.1);
        }
        q.p = q.x;
        expected.push_back(q.x);
        q.pf = sphere(q.x);
        if (q.pf < best_f) best_f = q.pf, best = q.x;
    }
    const double vmax = cfg.max_velocity * (hi - lo);
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const auto gbest = best;
        for (auto& q : swarm) {
            bool moved = false;
            for (std::size_t j = 0; j < dims; ++j) {
                const double r1 = replay.uniform(), r2 = replay.uniform();
                double v = cfg.inertia * q.v[j] + cfg.c1 * r1 * (q.p[j] - q.x[j]) + cfg.c2 * r2 * (gbest[j] - q.x[j]);
                v = std::min(vmax, std::max(-vmax, v));
                q.v[j] = v;
                if (v != 0.0) q.x[j] += v, moved = true;
            }
            if (!moved) continue;
            expected.push_back(q.x);
            const double f = sphere(q.x);
            if (f < q.pf) q.pf = f, q.p = q.x;
            if (f < best_f) best_f = f, best = q.x;
        }
    }
    if (visited.size() != expected.size()) {
        return {std::numeric_limits<double>::infinity(),
                std::to_string(visited.size()) + " evaluations, expected " + std::to_string(expected.size())};
    }
    Outcome worst;
    for (std::size_t k = 0; k < visited.size(); ++k)
        for (std::size_t j = 0; j < dims; ++j)
            keep_worst(worst, std::abs(visited[k][j] - expected[k][j]), "evaluation " + std::to_string(k));
    return worst;
}

Bits planted(std::size_t dims, std::size_t k, Lcg& g) {
    Bits b(dims, 0);
    std::size_t set = 0;
    while (set < k) {
        const auto j = static_cast<std::size_t>(g.uniform() * dims);
        if (!b[j]) b[j] = 1, ++set;
    }
    return b;
}

featsel::MaskFitness missing_bits(const Bits& target) {
    return [target](const Bits& b) {
        double miss = 0;
        for (std::size_t j = 0; j < b.size(); ++j) miss += target[j] && !b[j];
        return miss;
    };
}

// Count of seeds (out of 10) that miss the planted mask or break the search contract.
template <class Search>
Outcome planted_recovery(std::uint64_t seed, Search search) {
    Outcome out;
    for (std::uint64_t s = 0; s < 10; ++s) {
        Lcg g(seed + s);
        const auto target = planted(62, 30, g);
        numkernel::Rng rng(seed + s);
        const auto r = search(target, rng);
        bool ok = r.best == target && std::count(r.best.begin(), r.best.end(), 1) == 30;
        for (std::size_t i = 1; i < r.history.size(); ++i) ok = ok && r.history[i] <= r.history[i - 1];
        if (!ok) {
            out.deviation += 1.0;
            out.detail += "seed " + std::to_string(seed + s) + " ";
        }
    }
    return out;
}

double primal(const Vector& w, double b, const Matrix& x, const Vector& y, double c, double eps) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double f = b;
        for (Eigen::Index j = 0; j < x.cols(); ++j) f += w(j) * x(i, j);
        loss += std::max(0.0, std::abs(y(i) - f) - eps);
    }
    return 0.5 * w.squaredNorm() + c * loss;
}

// Zooming grid over w; for fixed w the objective is convex piecewise linear in b with kinks at y_i - w.x_i +- eps.
double svr_grid(const Matrix& x, const Vector& y, double c, double eps) {
    auto best_b = [&](const Vector& w) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double base = y(i) - x.row(i).dot(w);
            best = std::min({best, primal(w, base - eps, x, y, c, eps), primal(w, base + eps, x, y, c, eps)});
        }
        return best;
    };
    Vector center = Vector::Zero(2);
    double half = 20.0, best = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 40; ++level) {
        Vector incumbent = center;
        for (int a = -40; a <= 40; ++a) {
            for (int bb = -40; bb <= 40; ++bb) {
                Vector w(2);
                w << center(0) + half * a / 40.0, center(1) + half * bb / 40.0;
                const double f = best_b(w);
                if (f < best) best = f, incumbent = w;
            }
        }
        center = incumbent;
        half *= 0.25;
    }
    return best;
}

Outcome svr_case(std::uint64_t seed) {
    Outcome worst;
    for (std::uint64_t s = 0; s < 10; ++s) {
        Lcg g(seed + s);
        const auto n = static_cast<Eigen::Index>(4 + static_cast<int>(g.uniform() * 5));
        const Matrix x = gaussian(g, n, 2);
        Vector y(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = 1.5 * x(i, 0) + 1.5 * x(i, 1) + 0.8 * g.normal();
        const double c = g.uniform(0.5, 2.5), eps = g.uniform(0.0, 0.3);
        const auto model = featsel::svr_fit(x, y, {.c = c, .epsilon = eps});
        const double oracle = svr_grid(x, y, c, eps);
        const double got = primal(model.w, model.b, x, y, c, eps);
        keep_worst(worst, std::abs(got - oracle) / std::max(1.0, oracle), "instance " + std::to_string(seed + s));
    }
    return worst;
}

Outcome lasso_case(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    const auto q = naive::orthonormal_columns(to_rows(gaussian(g, 30, 5)));
    Matrix qm(30, 5);
    Vector y(30);
    for (int r = 0; r < 30; ++r) {
        for (int c = 0; c < 5; ++c) qm(r, c) = q[r][c];
        y(r) = 3.0 * g.normal();
    }
    for (double lambda : {0.0, 0.5, 1.0, 2.5, 6.0}) {
        const auto fit = featsel::lasso_fit(qm, y, lambda);
        for (int j = 0; j < 5; ++j) {
            double z = 0.0;
            for (int r = 0; r < 30; ++r) z += q[r][j] * y(r);
            const double gamma = lambda / 2.0;
            const double want = z > gamma ? z - gamma : (z < -gamma ? z + gamma : 0.0);
            keep_worst(worst, std::abs(fit.beta(j) - want), "orthonormal lambda " + std::to_string(lambda));
        }
    }
    const Matrix x = gaussian(g, 60, 6);
    Vector t(60);
    for (int r = 0; r < 60; ++r) t(r) = g.normal();
    const auto ols = naive::ols(to_rows(x), naive::Vec(t.begin(), t.end()));
    const auto fit = featsel::lasso_fit(x, t, 0.0);
    for (int j = 0; j < 6; ++j) keep_worst(worst, std::abs(fit.beta(j) - ols[j]), "lambda 0 versus OLS");
    return worst;
}

Outcome rfe_case(std::uint64_t seed) {
    Outcome out;
    for (std::uint64_t s = 0; s < 10; ++s) {
        Lcg g(seed + s);
        featsel::SelectionData d{gaussian(g, 120, 62), Vector(120)};
        for (int r = 0; r < 120; ++r) d.y(r) = 3.0 * d.x(r, 1) + 0.01 * g.normal();
        const auto r = featsel::rfe_svr_select(d, 30, 4);
        if (!r.mask.bits[1] || r.mask.count() != 30) {
            out.deviation += 1.0;
            out.detail += "seed " + std::to_string(seed + s) + " ";
        }
    }
    return out;
}

}  // namespace

void add_featsel_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"featsel.pearson", "featsel", 21, "two-pass covariance over standard deviations", 1e-12,
                     pearson_case});
    cases.push_back({"featsel.elm_output_weights", "featsel", 22,
                     "normal equations on a scalar-loop sigmoid hidden layer", 1e-8, elm_case});
    cases.push_back({"featsel.pso_velocity", "featsel", 23,
                     "replay of v <- w v + c1 r1 (p - x) + c2 r2 (g - x), x <- x + v", 1e-12, pso_velocity});
    cases.push_back({"featsel.pso_planted_mask", "featsel", 24, "planted 30-of-62 mask under a missing-bit fitness",
                     0.0, [](std::uint64_t seed) {
                         return planted_recovery(seed, [](const Bits& target, numkernel::Rng& rng) {
                             featsel::PsoConfig cfg;
                             cfg.iterations = 500;
                             return featsel::pso_search(62, missing_bits(target), cfg, rng);
                         });
                     }});
    cases.push_back({"featsel.ga_workflow", "featsel", 25,
                     "planted 30-of-62 mask under a missing-bit fitness; monotone elitist history", 0.0,
                     [](std::uint64_t seed) {
                         return planted_recovery(seed, [](const Bits& target, numkernel::Rng& rng) {
                             featsel::GaConfig cfg;
                             cfg.stall_limit = 2000;
                             return featsel::ga_search(62, missing_bits(target), cfg, rng);
                         });
                     }});
    cases.push_back({"featsel.svr_primal", "featsel", 26, "zooming grid over w with exact line search in b", 1e-4,
                     svr_case});
    cases.push_back({"featsel.lasso_soft_threshold", "featsel", 27,
                     "soft-thresholded projections on a Gram-Schmidt basis; normal equations at lambda 0", 1e-6,
                     lasso_case});
    cases.push_back({"featsel.rfe_planted_feature", "featsel", 28, "single relevant feature F2 must survive", 0.0,
                     rfe_case});
}

}  // namespace epf::oracles
