#include "epf/featsel/svr.hpp"

#include "epf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace epf::featsel {

double SvrModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return x.dot(w) + b; }

Vector SvrModel::predict(const Matrix& x) const {
    Vector out = x * w;
    out.array() += b;
    return out;
}

double SvrModel::primal_objective() const { return 0.5 * w.squaredNorm() + c * (xi.sum() + xi_star.sum()); }

double svr_primal_objective(const Vector& w, double b, const Matrix& x, const Vector& y, double c, double epsilon) {
    double slack = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        slack += std::max(0.0, std::abs(y(i) - x.row(i).dot(w) - b) - epsilon);
    }
    return 0.5 * w.squaredNorm() + c * slack;
}

namespace {

double median(Vector v) {
    std::sort(v.data(), v.data() + v.size());
    const auto n = v.size();
    return n % 2 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

void fill_slacks(SvrModel& m, const Matrix& x, const Vector& y) {
    const Vector f = m.predict(x);
    m.xi = (y - f).array() - m.epsilon;
    m.xi = m.xi.cwiseMax(0.0);
    m.xi_star = (f - y).array() - m.epsilon;
    m.xi_star = m.xi_star.cwiseMax(0.0);
}

}  // namespace

SvrModel svr_fit(const Matrix& x, const Vector& y, const SvrConfig& config) {
    if (x.rows() != y.size() || y.size() == 0) {
        throw ShapeError("svr_fit: need one target per row");
    }
    if (config.c < 0 || config.epsilon < 0) {
        throw ConfigError("svr_fit: C and epsilon must be non-negative");
    }
    const Eigen::Index n = y.size();
    SvrModel model;
    model.c = config.c;
    model.epsilon = config.epsilon;
    if (config.c == 0.0) {
        model.w = Vector::Zero(x.cols());
        model.b = median(y);
        fill_slacks(model, x, y);
        return model;
    }

    // Variables t < n are alpha_t (sign +1), t >= n are alpha*_{t-n} (sign -1).
    const Matrix k = x * x.transpose();
    const Eigen::Index l = 2 * n;
    const double cap = config.c;
    const double tau = 1e-12;
    auto sign = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
    auto kk = [&](Eigen::Index s, Eigen::Index t) { return k(s % n, t % n); };
    std::vector<double> alpha(static_cast<std::size_t>(l), 0.0), grad(static_cast<std::size_t>(l));
    for (Eigen::Index t = 0; t < n; ++t) {
        grad[static_cast<std::size_t>(t)] = config.epsilon - y(t);
        grad[static_cast<std::size_t>(t + n)] = config.epsilon + y(t);
    }
    auto at_upper = [&](Eigen::Index t) { return alpha[static_cast<std::size_t>(t)] >= cap; };
    auto at_lower = [&](Eigen::Index t) { return alpha[static_cast<std::size_t>(t)] <= 0.0; };

    std::size_t iter = 0;
    for (;; ++iter) {
        // Maximal violating index i over I_up.
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < l; ++t) {
            const double g = grad[static_cast<std::size_t>(t)];
            if (sign(t) > 0 ? !at_upper(t) : !at_lower(t)) {
                if (-sign(t) * g >= gmax) {
                    gmax = -sign(t) * g;
                    i = t;
                }
            }
        }
        // Second-order choice of j over I_low.
        double gmax2 = -std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        double best_obj = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < l; ++t) {
            if (sign(t) > 0 ? at_lower(t) : at_upper(t)) {
                continue;
            }
            const double szg = sign(t) * grad[static_cast<std::size_t>(t)];
            gmax2 = std::max(gmax2, szg);
            const double diff = gmax + szg;
            if (i >= 0 && diff > 0) {
                double quad = kk(i, i) + kk(t, t) - 2.0 * kk(i, t);
                if (quad <= 0) quad = tau;
                const double obj = -(diff * diff) / quad;
                if (obj <= best_obj) {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        const double violation = gmax + gmax2;
        if (violation < config.tolerance || i < 0 || j < 0) {
            break;
        }
        if (iter >= config.max_iterations) {
            throw SolverError("svr_fit: no convergence after " + std::to_string(config.max_iterations) + " iterations",
                              violation);
        }

        auto& ai = alpha[static_cast<std::size_t>(i)];
        auto& aj = alpha[static_cast<std::size_t>(j)];
        const double old_i = ai, old_j = aj;
        const double qij = sign(i) * sign(j) * kk(i, j);
        const double gi = grad[static_cast<std::size_t>(i)], gj = grad[static_cast<std::size_t>(j)];
        if (sign(i) != sign(j)) {
            double quad = kk(i, i) + kk(j, j) + 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (-gi - gj) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0) {
                if (aj < 0) { aj = 0; ai = diff; }
            } else if (ai < 0) {
                ai = 0;
                aj = -diff;
            }
            if (diff > 0) {
                if (ai > cap) { ai = cap; aj = cap - diff; }
            } else if (aj > cap) {
                aj = cap;
                ai = cap + diff;
            }
        } else {
            double quad = kk(i, i) + kk(j, j) - 2.0 * qij;
            if (quad <= 0) quad = tau;
            const double delta = (gi - gj) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > cap) {
                if (ai > cap) { ai = cap; aj = sum - cap; }
            } else if (aj < 0) {
                aj = 0;
                ai = sum;
            }
            if (sum > cap) {
                if (aj > cap) { aj = cap; ai = sum - cap; }
            } else if (ai < 0) {
                ai = 0;
                aj = sum;
            }
        }
        const double di = ai - old_i, dj = aj - old_j;
        for (Eigen::Index t = 0; t < l; ++t) {
            grad[static_cast<std::size_t>(t)] +=
                sign(t) * (sign(i) * kk(i, t) * di + sign(j) * kk(j, t) * dj);
        }
    }
    model.iterations = iter;

    // Bias: average over free variables, else the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (Eigen::Index t = 0; t < l; ++t) {
        const double yg = sign(t) * grad[static_cast<std::size_t>(t)];
        if (at_upper(t)) {
            if (sign(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (sign(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    Vector coef(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        coef(t) = alpha[static_cast<std::size_t>(t)] - alpha[static_cast<std::size_t>(t + n)];
    }
    model.w = x.transpose() * coef;
    model.b = -rho;
    fill_slacks(model, x, y);
    return model;
}

RfeResult rfe_svr_select(const SelectionData& data, std::size_t k, std::size_t drop_per_round,
                         const SvrConfig& config) {
    const std::size_t d = data.features();
    if (k == 0 || k > d || drop_per_round == 0) {
        throw ConfigError("rfe: need 0 < k <= features and drop_per_round > 0");
    }
    Matrix z = data.x;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        const double mean = z.col(j).mean();
        z.col(j).array() -= mean;
        const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(z.rows()));
        if (sd > 0) z.col(j) /= sd; else z.col(j).setZero();
    }
    Vector t = data.y.array() - data.y.mean();
    const double ysd = std::sqrt(t.squaredNorm() / static_cast<double>(t.size()));
    if (ysd > 0) t /= ysd;

    std::vector<std::size_t> alive(d);
    std::iota(alive.begin(), alive.end(), std::size_t{0});
    RfeResult result;
    std::vector<double> scores(d, 0.0);
    std::size_t round = 0;
    while (alive.size() > k) {
        ++round;
        Matrix sub(z.rows(), static_cast<Eigen::Index>(alive.size()));
        for (std::size_t c = 0; c < alive.size(); ++c) {
            sub.col(static_cast<Eigen::Index>(c)) = z.col(static_cast<Eigen::Index>(alive[c]));
        }
        const auto model = svr_fit(sub, t, config);
        std::vector<std::size_t> order(alive.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double wa = std::abs(model.w(static_cast<Eigen::Index>(a)));
            const double wb = std::abs(model.w(static_cast<Eigen::Index>(b)));
            return wa < wb || (wa == wb && alive[a] > alive[b]);
        });
        const std::size_t drop = std::min(drop_per_round, alive.size() - k);
        std::vector<std::size_t> dropped;
        for (std::size_t r = 0; r < drop; ++r) {
            dropped.push_back(alive[order[r]]);
        }
        for (auto f : dropped) {
            result.elimination_order.push_back(f);
            scores[f] = static_cast<double>(round);
            alive.erase(std::find(alive.begin(), alive.end(), f));
        }
    }
    Bits bits(d, 0);
    for (auto f : alive) {
        bits[f] = 1;
        scores[f] = static_cast<double>(round + 1);
    }
    result.mask = FeatureMask::from_bits(bits, "rfe-svr");
    result.mask.scores = scores;
    return result;
}

}  // namespace epf::featsel
