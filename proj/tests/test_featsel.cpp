#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/featsel/select.hpp"
#include "epf/numkernel/linalg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace epf;
using namespace epf::featsel;
using numkernel::Rng;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
    Matrix m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
    return m;
}

Bits planted_first(std::size_t dims, std::size_t k) {
    Bits b(dims, 0);
    std::fill(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(k), 1);
    return b;
}

// Number of planted bits missing from a candidate; 0 only for the planted mask.
MaskFitness hamming_to(const Bits& target) {
    return [target](const Bits& b) {
        double miss = 0;
        for (std::size_t j = 0; j < b.size(); ++j) miss += (target[j] && !b[j]) ? 1.0 : 0.0;
        return miss;
    };
}

SelectionData synthetic_selection(std::uint64_t seed, std::size_t days = 300) {
    Rng rng(seed);
    const auto data = dataio::synth_generate(rng, days);
    return SelectionData::from_table(data.table, {0, days}, "target");
}

// y = 3 * F2 + tiny noise, other features independent noise.
SelectionData planted_f2(std::uint64_t seed, std::size_t n = 120) {
    Rng rng(seed);
    SelectionData d;
    d.x = random_matrix(static_cast<Eigen::Index>(n), 62, rng);
    d.y = 3.0 * d.x.col(1);
    for (Eigen::Index i = 0; i < d.y.size(); ++i) d.y(i) += 0.01 * rng.normal();
    return d;
}

}  // namespace

TEST_CASE("pearson correlation") {
    const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
    // Oracle: n sum(xy) - sum x sum y over the root of the variance terms.
    const double n = 3, sx = 6, sy = 7, sxy = 1 + 4 + 12, sxx = 14, syy = 21;
    const double oracle = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(pearson(x, y) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(pearson(x, y) == doctest::Approx(0.9820).epsilon(1e-4));
    const std::vector<double> c{5, 5, 5};
    CHECK(pearson(c, y) == 0.0);
    CHECK_THROWS_AS(pearson(x, c), DegenerateError);
}

TEST_CASE("pearson_select ranks by absolute correlation") {
    Rng rng(1);
    SelectionData d;
    d.x = random_matrix(80, 62, rng);
    d.y = random_matrix(80, 1, rng).col(0);
    d.x.col(10) = d.y;
    d.x.col(40) = -d.y;
    d.x.col(50).setConstant(2.0);
    const auto mask = pearson_select(d);
    CHECK(mask.count() == 30);
    CHECK(mask.bits[10]);
    CHECK(mask.bits[40]);
    CHECK_FALSE(mask.bits[50]);
    CHECK(mask.scores[10] == doctest::Approx(1.0));
    CHECK(mask.scores[40] == doctest::Approx(-1.0));

    // Ties go to the lower index.
    SelectionData tie;
    tie.x = Matrix::Zero(10, 62);
    tie.y = random_matrix(10, 1, rng).col(0);
    for (int j = 0; j < 62; ++j) tie.x.col(j) = tie.y;
    const auto tied = pearson_select(tie, 30);
    for (int j = 0; j < 62; ++j) CHECK(tied.bits[j] == (j < 30));
}

TEST_CASE("elm interpolates with many hidden units and is seeded") {
    Rng rng(2);
    const Matrix x = random_matrix(20, 5, rng);
    const Vector y = random_matrix(20, 1, rng).col(0);
    Rng a(7), b(7);
    ElmModel m1(5, 40, a), m2(5, 40, b);
    const Bits all(5, 1);
    m1.fit(all, x, y);
    m2.fit(all, x, y);
    CHECK(m1.mse(x, y) < 1e-8);
    CHECK(m1.output_weights() == m2.output_weights());
    CHECK(m1.input_weights() == m2.input_weights());
    const Matrix frozen = m1.input_weights();
    m1.fit(Bits{1, 0, 1, 0, 0}, x, y);
    CHECK(m1.input_weights() == frozen);
    CHECK_THROWS_AS(m1.fit(Bits(5, 0), x, y), ConfigError);
}

TEST_CASE("elm approaches least squares on a linear task") {
    Rng rng(3);
    const Matrix x = random_matrix(250, 4, rng) * 0.5;
    Vector beta(4);
    beta << 0.4, -0.2, 0.1, 0.3;
    Vector y = x * beta;
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.05 * rng.normal();
    const Matrix xt = x.topRows(200), xv = x.bottomRows(50);
    const Vector yt = y.head(200), yv = y.tail(50);
    Matrix design(200, 5);
    design << xt, Matrix::Ones(200, 1);
    Matrix design_v(50, 5);
    design_v << xv, Matrix::Ones(50, 1);
    const Vector ols = numkernel::least_squares(design, yt);
    const double ols_mse = (design_v * ols - yv).squaredNorm() / 50.0;
    Rng elm_rng(4);
    ElmModel elm(4, 50, elm_rng);
    elm.fit(Bits(4, 1), xt, yt);
    const double elm_mse = elm.mse(xv, yv);
    CHECK(elm_mse < 1e-2);
    CHECK(elm_mse < 10.0 * ols_mse);
}

TEST_CASE("repair keeps exactly k bits by priority") {
    Bits b{1, 1, 1, 0, 0};
    const std::vector<double> pr{0.1, 0.9, 0.5, 0.7, 0.0};
    repair_to_k(b, pr, 2);
    CHECK(b == Bits{0, 1, 1, 0, 0});
    Bits c{0, 0, 0, 0, 1};
    repair_to_k(c, pr, 3);
    CHECK(c == Bits{0, 1, 0, 1, 1});
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        Bits r(62);
        for (auto& v : r) v = rng.bernoulli(0.5);
        random_repair(r, 30, rng);
        CHECK(popcount(r) == 30);
    }
}

TEST_CASE("pso recovers a planted mask on a rigged fitness") {
    const auto target = planted_first(62, 30);
    PsoConfig cfg;
    cfg.iterations = 500;
    cfg.particles = 20;
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto r = pso_search(62, hamming_to(target), cfg, rng);
        CHECK(popcount(r.best) == 30);
        recovered += r.best == target ? 1 : 0;
        for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    }
    CHECK(recovered == 10);
}

TEST_CASE("pso with zero coefficients freezes the swarm") {
    PsoConfig cfg;
    cfg.inertia = cfg.c1 = cfg.c2 = 0.0;
    cfg.iterations = 50;
    std::size_t calls = 0;
    const auto target = planted_first(62, 30);
    auto counted = [&](const Bits& b) {
        ++calls;
        return hamming_to(target)(b);
    };
    Rng rng(6);
    const auto r = pso_search(62, counted, cfg, rng);
    CHECK(calls <= cfg.particles);
    CHECK(r.history.front() == r.history.back());
    CHECK(r.best_fitness == r.history.front());
}

TEST_CASE("continuous pso minimizes the sphere function") {
    PsoConfig cfg;
    cfg.iterations = 1000;
    Rng rng(8);
    const auto r = pso_minimize([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; }, 2, -5, 5,
                                cfg, rng);
    CHECK(std::sqrt(r.best_value) < 1e-3);
}

TEST_CASE("ga recovers a planted mask on one-max") {
    const auto target = planted_first(62, 30);
    GaConfig cfg;
    cfg.stall_limit = 2000;
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto r = ga_search(62, hamming_to(target), cfg, rng);
        CHECK(popcount(r.best) == 30);
        recovered += r.best == target ? 1 : 0;
        for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
    }
    CHECK(recovered == 10);
}

TEST_CASE("ga without crossover or mutation leaves an identical population unchanged") {
    GaConfig cfg;
    cfg.crossover = cfg.mutation = 0.0;
    cfg.population = 10;
    cfg.generations = 30;
    Rng rng(9);
    Bits b(62, 0);
    random_repair(b, 30, rng);
    const std::vector<Bits> pop(10, b);
    const auto r = ga_search(62, hamming_to(planted_first(62, 30)), cfg, rng, pop);
    CHECK(r.best == b);
    CHECK(r.evaluations == 1);
}

namespace {

// Convex in b: minimum at a breakpoint y_i - w.x_i +- eps.
double best_over_b(const Vector& w, const Matrix& x, const Vector& y, double c, double eps) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (double s : {-eps, eps}) {
            best = std::min(best, svr_primal_objective(w, y(i) - x.row(i).dot(w) + s, x, y, c, eps));
        }
    }
    return best;
}

// Brute-force grid over (w1, w2) with repeated zooming around the incumbent.
double grid_oracle(const Matrix& x, const Vector& y, double c, double eps) {
    Vector center = Vector::Zero(2);
    double half = 20.0, best = std::numeric_limits<double>::infinity();
    const int steps = 40;
    for (int level = 0; level < 40; ++level) {
        Vector incumbent = center;
        for (int a = -steps; a <= steps; ++a) {
            for (int b = -steps; b <= steps; ++b) {
                Vector w(2);
                w << center(0) + half * a / steps, center(1) + half * b / steps;
                const double f = best_over_b(w, x, y, c, eps);
                if (f < best) {
                    best = f;
                    incumbent = w;
                }
            }
        }
        center = incumbent;
        half *= 0.25;
    }
    return best;
}

}  // namespace

TEST_CASE("svr primal objective matches a grid oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(100 + seed);
        const auto n = static_cast<Eigen::Index>(4 + rng.below(5));
        const Matrix x = random_matrix(n, 2, rng);
        Vector y = x * Vector::Constant(2, 1.5);
        for (Eigen::Index i = 0; i < n; ++i) y(i) += 0.8 * rng.normal();
        const double c = 0.5 + rng.uniform(0.0, 2.0), eps = rng.uniform(0.0, 0.3);
        const auto model = svr_fit(x, y, {.c = c, .epsilon = eps});
        const double oracle = grid_oracle(x, y, c, eps);
        INFO("seed " << seed);
        CHECK(std::abs(model.primal_objective() - oracle) <= 1e-4 * std::max(1.0, oracle));
        CHECK(model.primal_objective() == doctest::Approx(svr_primal_objective(model.w, model.b, x, y, c, eps)));
        CHECK((model.xi.array() >= 0).all());
        CHECK((model.xi_star.array() >= 0).all());
        const Vector f = model.predict(x);
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(std::abs(y(i) - f(i)) <= eps + model.xi(i) + model.xi_star(i) + 1e-9);
        }
    }
}

TEST_CASE("svr special cases") {
    Rng rng(11);
    const Matrix x = random_matrix(10, 2, rng);
    Vector y = Vector::Constant(10, 3.0);
    for (Eigen::Index i = 0; i < 10; ++i) y(i) += 0.01 * rng.uniform(-1, 1);
    auto flat = svr_fit(x, y, {.c = 10.0, .epsilon = 0.1});
    CHECK(flat.w.norm() < 1e-9);
    CHECK(flat.xi.sum() + flat.xi_star.sum() < 1e-12);

    Matrix line(8, 1);
    for (int i = 0; i < 8; ++i) line(i, 0) = i * 0.5;
    const Vector twice = 2.0 * line.col(0);
    auto fit = svr_fit(line, twice, {.c = 1000.0, .epsilon = 0.1});
    CHECK(std::abs(fit.w(0) - 2.0) < 0.1);
    CHECK(fit.xi.sum() + fit.xi_star.sum() < 1e-9);

    auto zero = svr_fit(x, x.col(0), {.c = 0.0});
    CHECK(zero.w.isZero(0.0));

    CHECK_THROWS_AS(svr_fit(random_matrix(30, 3, rng), random_matrix(30, 1, rng).col(0),
                            {.c = 100.0, .epsilon = 0.0, .tolerance = 1e-6, .max_iterations = 2}),
                    SolverError);
}

TEST_CASE("rfe keeps a planted feature and is deterministic") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = planted_f2(seed);
        const auto r = rfe_svr_select(d, 30, 4);
        CHECK(r.mask.count() == 30);
        CHECK(r.mask.bits[1]);
        CHECK(r.elimination_order.size() == 32);
        if (seed == 0) {
            CHECK(rfe_svr_select(d, 30, 4).elimination_order == r.elimination_order);
        }
    }
    const auto all = rfe_svr_select(planted_f2(1), 62);
    CHECK(all.mask.count() == 62);
    CHECK(all.elimination_order.empty());
}

TEST_CASE("rfe keeps at least one copy of a duplicated relevant feature") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto d = planted_f2(seed);
        d.x.col(20) = d.x.col(1);
        const auto r = rfe_svr_select(d, 30, 4);
        CHECK((r.mask.bits[1] || r.mask.bits[20]));
    }
}

TEST_CASE("lasso at zero penalty equals least squares") {
    Rng rng(12);
    const Matrix x = random_matrix(60, 6, rng);
    const Vector y = random_matrix(60, 1, rng).col(0);
    const auto fit = lasso_fit(x, y, 0.0);
    CHECK(fit.converged);
    CHECK((fit.beta - numkernel::least_squares(x, y)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lasso is all zero above lambda_max") {
    Rng rng(13);
    const Matrix x = random_matrix(40, 5, rng);
    const Vector y = random_matrix(40, 1, rng).col(0);
    const double lmax = lasso_lambda_max(x, y);
    CHECK(lmax == doctest::Approx(2.0 * (x.transpose() * y).cwiseAbs().maxCoeff()));
    CHECK(lasso_fit(x, y, lmax).beta.isZero(0.0));
    CHECK_FALSE(lasso_fit(x, y, 0.99 * lmax).beta.isZero(0.0));
}

TEST_CASE("lasso on an orthonormal design is the soft-thresholded OLS") {
    Rng rng(14);
    const Eigen::HouseholderQR<Matrix> qr(random_matrix(30, 5, rng));
    const Matrix q = qr.householderQ() * Matrix::Identity(30, 5);
    const Vector y = 3.0 * random_matrix(30, 1, rng).col(0);
    const Vector ols = q.transpose() * y;
    for (double lambda : {0.0, 0.5, 1.0, 2.5, 6.0}) {
        const auto fit = lasso_fit(q, y, lambda);
        for (Eigen::Index j = 0; j < 5; ++j) {
            CHECK(std::abs(fit.beta(j) - soft_threshold(ols(j), lambda / 2.0)) < 1e-6);
        }
    }
}

TEST_CASE("lasso nonzero count is non-increasing along a lambda grid") {
    const auto d = synthetic_selection(15, 200);
    Matrix z = d.x;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        z.col(j).array() -= z.col(j).mean();
        z.col(j) /= std::sqrt(z.col(j).squaredNorm() / static_cast<double>(z.rows()));
    }
    const Vector t = d.y.array() - d.y.mean();
    const double lmax = lasso_lambda_max(z, t);
    std::size_t prev = 63;
    for (int g = 0; g < 10; ++g) {
        const double lambda = lmax * std::pow(10.0, -3.0 + g / 3.0);
        const auto fit = lasso_fit(z, t, lambda);
        const auto nz = static_cast<std::size_t>((fit.beta.array() != 0.0).count());
        CHECK(nz <= prev);
        prev = nz;
    }
}

TEST_CASE("lasso_select pads to k from the path") {
    auto d = planted_f2(16);
    const auto mask = lasso_select(d, 1e5, 30);
    CHECK(mask.count() == 30);
    CHECK(mask.bits[1]);
    CHECK(mask.method == "lasso");
}

TEST_CASE("all selectors give 30 features and do not all agree on the synthetic fixture") {
    const auto d = synthetic_selection(17, 300);
    SelectorConfig cfg;
    cfg.pso.iterations = 60;
    cfg.ga.generations = 60;
    cfg.ga.population = 20;
    cfg.rfe_drop_per_round = 4;
    std::vector<FeatureMask> masks;
    Rng rng(18);
    for (auto s : {Selector::kPearson, Selector::kPso, Selector::kGa, Selector::kRfe, Selector::kLasso}) {
        masks.push_back(select_features(s, d, cfg, rng));
        CHECK(masks.back().count() == 30);
    }
    bool all_same = true;
    for (const auto& m : masks) all_same = all_same && m.bits == masks.front().bits;
    CHECK_FALSE(all_same);
    // Planted features F2, F17, F35 are found by the correlation and Lasso filters.
    for (std::size_t f : {1u, 16u, 34u}) {
        CHECK(masks[0].bits[f]);
        CHECK(masks[4].bits[f]);
    }
    const auto table = checkmark_table(masks);
    CHECK(table.find("F62") != std::string::npos);
    CHECK(table.find("✓") != std::string::npos);
}

TEST_CASE("feature mask json round trip") {
    auto m = FeatureMask::from_bits(planted_first(62, 30), "pc");
    m.scores.assign(62, 0.25);
    const auto back = mask_from_json(to_json(m));
    CHECK(back == m);
    CHECK(to_json(m).at("selected").at(0) == "F1");
    CHECK_THROWS_AS(mask_from_json(nlohmann::json{{"method", "x"}, {"selected", {"F99"}}}), SchemaError);
    CHECK_THROWS_AS(FeatureMask::from_bits(Bits(10, 1), "x"), ShapeError);
    CHECK(selector_from_string("LASSO") == Selector::kLasso);
    CHECK_THROWS_AS(selector_from_string("boruta"), ConfigError);
}
