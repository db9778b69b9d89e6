#include "epf/dataio/normalize.hpp"
#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/explain/blackbox.hpp"
#include "epf/explain/shap.hpp"
#include "epf/explain/surrogate.hpp"
#include "epf/featsel/pearson.hpp"
#include "epf/models/pipeline.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace epf;
using namespace epf::explain;
using numkernel::Rng;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal();
    return m;
}

Vector random_vector(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

Predictor linear(Vector beta, double bias = 0.0) {
    return [beta = std::move(beta), bias](const Matrix& x) -> Vector {
        return (x * beta).array() + bias;
    };
}

// Products, a sine and a hinge: none of it additive.
Predictor tangled() {
    return [](const Matrix& x) {
        Vector out(x.rows());
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            double s = 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                s += std::sin(x(r, j) * (j + 1)) + 0.3 * x(r, j) * x(r, (j + 1) % x.cols());
            }
            out(r) = s + std::max(0.0, x(r, 0) - x(r, x.cols() - 1));
        }
        return out;
    };
}

double phi_sum(const ShapExplanation& e) { return std::accumulate(e.phi.begin(), e.phi.end(), 0.0); }

// Independent check for one feature: average marginal contribution over all d! orderings.
double permutation_shapley(const Predictor& f, const Vector& x, const Background& bg, std::size_t j) {
    const auto d = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    double total = 0.0;
    double count = 0.0;
    do {
        std::vector<std::uint8_t> present(d, 0);
        for (const auto k : order) {
            if (k == j) break;
            present[k] = 1;
        }
        const double without = coalition_value(f, x, bg, present);
        present[j] = 1;
        total += coalition_value(f, x, bg, present) - without;
        count += 1.0;
    } while (std::next_permutation(order.begin(), order.end()));
    return total / count;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
    const double rho = featsel::pearson(x, y);
    return rho * rho;
}

}  // namespace

TEST_CASE("background sampling") {
    Rng data_rng(1);
    const Matrix train = random_matrix(data_rng, 400, 3);
    Rng a(7);
    Rng b(7);
    const auto bg = sample_background(train, 100, a);
    CHECK(bg.rows.rows() == 100);
    CHECK(bg.rows == sample_background(train, 100, b).rows);
    // Distinct rows kept in training order.
    std::vector<double> first;
    for (Eigen::Index r = 0; r < bg.rows.rows(); ++r) first.push_back(bg.rows(r, 0));
    std::size_t matched = 0;
    for (Eigen::Index r = 0, k = 0; r < train.rows() && k < bg.rows.rows(); ++r) {
        if (train.row(r) == bg.rows.row(k)) {
            ++matched;
            ++k;
        }
    }
    CHECK(matched == 100);
    Rng c(7);
    CHECK(sample_background(train.topRows(40), 100, c).rows == train.topRows(40));
    CHECK_THROWS_AS(sample_background(Matrix(0, 3), 10, c), ShapeError);
}

TEST_CASE("constant model gives zero attributions") {
    Rng rng(2);
    const Background bg{random_matrix(rng, 20, 4)};
    const Vector x = random_vector(rng, 4);
    const Predictor f = [](const Matrix& m) { return Vector::Constant(m.rows(), 4.25); };
    for (const auto& e : {exact_shapley(f, x, bg), kernel_shap(f, x, bg, {.n_coalitions = 14})}) {
        CHECK(e.base == doctest::Approx(4.25).epsilon(1e-14));
        for (const double p : e.phi) CHECK(std::abs(p) < 1e-12);
    }
}

TEST_CASE("linear model attributions are beta times distance from the background mean") {
    Rng rng(3);
    SUBCASE("two features, 3 x1 + 2 x2") {
        const Background bg{random_matrix(rng, 100, 2)};
        const Vector x = random_vector(rng, 2);
        const Vector mean = bg.rows.colwise().mean();
        const auto e = kernel_shap(linear(Vector{{3.0, 2.0}}), x, bg);
        CHECK(std::abs(e.phi[0] - 3.0 * (x(0) - mean(0))) < 1e-3);
        CHECK(std::abs(e.phi[1] - 2.0 * (x(1) - mean(1))) < 1e-3);
    }
    SUBCASE("sampled coalitions, twenty features") {
        const Background bg{random_matrix(rng, 50, 20)};
        const Vector beta = random_vector(rng, 20);
        const Vector mean = bg.rows.colwise().mean();
        for (int trial = 0; trial < 5; ++trial) {
            const Vector x = random_vector(rng, 20);
            const auto e = kernel_shap(linear(beta, 1.5), x, bg, {.n_coalitions = 200, .seed = 9});
            CHECK(e.coalitions == 200);
            for (Eigen::Index j = 0; j < 20; ++j) {
                CHECK(std::abs(e.phi[static_cast<std::size_t>(j)] - beta(j) * (x(j) - mean(j))) < 1e-3);
            }
        }
    }
}

TEST_CASE("exact shapley agrees with the permutation definition") {
    Rng rng(4);
    const Background bg{random_matrix(rng, 8, 5)};
    const auto f = tangled();
    for (int trial = 0; trial < 3; ++trial) {
        const Vector x = random_vector(rng, 5);
        const auto e = exact_shapley(f, x, bg);
        for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(e.phi[j] - permutation_shapley(f, x, bg, j)) < 1e-10);
        CHECK(std::abs(phi_sum(e) - (e.prediction - e.base)) < 1e-10);
    }
}

TEST_CASE("kernel shap with full enumeration matches exact shapley") {
    Rng rng(5);
    const auto f = tangled();
    for (Eigen::Index d = 2; d <= 10; ++d) {
        const Background bg{random_matrix(rng, 10, d)};
        const Vector x = random_vector(rng, d);
        const auto exact = exact_shapley(f, x, bg);
        const auto kernel = kernel_shap(f, x, bg);
        CHECK(kernel.coalitions == (std::size_t{1} << d) - 2);
        CHECK(std::abs(kernel.base - exact.base) < 1e-12);
        CHECK(std::abs(phi_sum(kernel) - (kernel.prediction - kernel.base)) < 1e-10);
        double worst = 0.0;
        for (std::size_t j = 0; j < exact.phi.size(); ++j) worst = std::max(worst, std::abs(kernel.phi[j] - exact.phi[j]));
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("efficiency holds under coalition sampling") {
    Rng rng(6);
    const Background bg{random_matrix(rng, 10, 16)};
    const auto f = tangled();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Vector x = random_vector(rng, 16);
        const auto e = kernel_shap(f, x, bg, {.n_coalitions = 300, .seed = seed});
        CHECK(std::abs(phi_sum(e) - (e.prediction - e.base)) < 1e-9);
    }
}

TEST_CASE("symmetry and dummy axioms") {
    Rng rng(7);
    Matrix rows = random_matrix(rng, 12, 4);
    rows.col(1) = rows.col(0);  // features 0 and 1 interchangeable in every row
    const Background bg{rows};
    // Symmetric in x0, x1; ignores x3.
    const Predictor f = [](const Matrix& m) {
        Vector out(m.rows());
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            out(r) = m(r, 0) * m(r, 1) + std::sin(m(r, 0) + m(r, 1)) * m(r, 2) + m(r, 2) * m(r, 2);
        }
        return out;
    };
    const Vector x{{0.7, 0.7, -1.2, 3.0}};
    for (const auto& e : {exact_shapley(f, x, bg), kernel_shap(f, x, bg)}) {
        CHECK(std::abs(e.phi[0] - e.phi[1]) < 1e-10);
        CHECK(std::abs(e.phi[3]) < 1e-10);
        CHECK(std::abs(e.phi[2]) > 1e-3);
    }
    const auto sampled = kernel_shap(f, x, bg, {.n_coalitions = 6, .seed = 3});
    CHECK(std::abs(sampled.phi[3]) < 1e-9);
}

TEST_CASE("explainer argument checks") {
    Rng rng(8);
    const Background bg16{random_matrix(rng, 3, 16)};
    CHECK_THROWS_AS(exact_shapley(linear(Vector::Ones(16)), Vector::Zero(16), bg16), FeasibilityError);
    CHECK_NOTHROW(exact_shapley(linear(Vector::Ones(15)), Vector::Zero(15), Background{random_matrix(rng, 2, 15)}));
    CHECK_THROWS_AS(kernel_shap(linear(Vector::Ones(16)), Vector::Zero(16), bg16, {.n_coalitions = 17}), ConfigError);
    CHECK_NOTHROW(kernel_shap(linear(Vector::Ones(16)), Vector::Zero(16), bg16, {.n_coalitions = 18}));
    CHECK_THROWS_AS(kernel_shap(linear(Vector::Ones(3)), Vector::Zero(4), Background{random_matrix(rng, 3, 3)}),
                    ShapeError);
    CHECK_THROWS_AS(exact_shapley(linear(Vector::Ones(3)), Vector::Zero(3), Background{Matrix(0, 3)}), ShapeError);
}

TEST_CASE("sampled kernel shap is seed-deterministic") {
    Rng rng(9);
    const Background bg{random_matrix(rng, 10, 12)};
    const Vector x = random_vector(rng, 12);
    const auto a = kernel_shap(tangled(), x, bg, {.n_coalitions = 100, .seed = 4});
    const auto b = kernel_shap(tangled(), x, bg, {.n_coalitions = 100, .seed = 4});
    CHECK(a.phi == b.phi);
}

TEST_CASE("importance ranking") {
    std::vector<ShapExplanation> ex(2);
    ex[0].phi = {0.5, -2.0, 0.5, 0.0};
    ex[1].phi = {-0.5, 1.0, 0.5, 0.1};
    const auto ranking = importance_ranking(ex, {"a", "b", "c", "d"});
    REQUIRE(ranking.size() == 4);
    CHECK(ranking[0].name == "b");
    CHECK(ranking[0].mean_abs_phi == doctest::Approx(1.5));
    CHECK(ranking[1].name == "a");  // tie with c, lower index first
    CHECK(ranking[2].name == "c");
    CHECK(ranking[3].name == "d");
    const auto j = to_json(ranking);
    CHECK(j[0]["feature"] == "b");
    CHECK(j[0]["rank"] == 1);
    CHECK_THROWS_AS(importance_ranking({}, {}), ShapeError);
}

TEST_CASE("dependence export") {
    Rng rng(10);
    const Background bg{random_matrix(rng, 30, 3)};
    std::vector<ShapExplanation> ex;
    for (int i = 0; i < 40; ++i) {
        Vector x = random_vector(rng, 3);
        x(2) = 1.0;  // constant across explanations
        ex.push_back(kernel_shap(linear(Vector{{3.0, -2.0, 1.0}}), x, bg));
    }
    const std::vector<std::string> names{"F1", "F2", "F3"};
    const auto dep = dependence_export(ex, names, "F1", std::string_view("F3"));
    REQUIRE(dep.rows.size() == 40);
    std::vector<double> value, phi;
    for (const auto& r : dep.rows) {
        value.push_back(r.value);
        phi.push_back(r.phi);
        CHECK(r.interaction_value == 1.0);
    }
    CHECK(r_squared(value, phi) > 0.999);
    const auto csv = dep.to_csv();
    CHECK(csv.rfind("feature,value,phi,interaction_value\nF1,", 0) == 0);
    CHECK_THROWS_AS(dependence_export(ex, names, "F9"), SchemaError);
    CHECK_THROWS_AS(dependence_export(ex, names, "F1", std::string_view("F9")), SchemaError);
}

TEST_CASE("default interaction partner tracks attribution correlation") {
    Rng rng(11);
    const Background bg{random_matrix(rng, 30, 3)};
    // phi_0 = x0 * x2 - mean term, so x2 moves the attributions of x0; x1 does not.
    const Predictor f = [](const Matrix& m) {
        Vector out(m.rows());
        for (Eigen::Index r = 0; r < m.rows(); ++r) out(r) = m(r, 0) * (2.0 + m(r, 2)) + 0.1 * m(r, 1);
        return out;
    };
    std::vector<ShapExplanation> ex;
    for (int i = 0; i < 60; ++i) {
        Vector x = random_vector(rng, 3);
        x(0) = 1.0 + std::abs(x(0));
        ex.push_back(exact_shapley(f, x, bg));
    }
    CHECK(dependence_export(ex, {"a", "b", "c"}, "a").interaction == "c");
}

namespace {

featsel::SelectionData linear_selection(Rng& rng, std::size_t n, double noise) {
    featsel::SelectionData data{Matrix(static_cast<Eigen::Index>(n), 62), Vector(static_cast<Eigen::Index>(n))};
    for (std::size_t r = 0; r < n; ++r) {
        for (Eigen::Index j = 0; j < 62; ++j) data.x(static_cast<Eigen::Index>(r), j) = rng.uniform();
        const auto row = data.x.row(static_cast<Eigen::Index>(r));
        data.y(static_cast<Eigen::Index>(r)) = 0.6 * row(0) - 0.3 * row(4) + 0.2 * row(9) + 0.1 + noise * rng.normal();
    }
    return data;
}

featsel::FeatureMask first_ten() {
    featsel::Bits bits(62, false);
    for (std::size_t j = 0; j < 10; ++j) bits[j] = true;
    return featsel::FeatureMask::from_bits(bits, "none");
}

}  // namespace

TEST_CASE("surrogate svr on a linear target is close to least squares") {
    Rng rng(12);
    const auto data = linear_selection(rng, 300, 0.02);
    const auto mask = first_ten();
    const auto model = fit_surrogate_svr(data, mask);
    CHECK(model.names.front() == "F1");
    CHECK(model.columns.size() == 10);

    // Least squares on the same chronological split, through a different solver.
    const auto [train, validation] = featsel::chronological_split(data, 0.8);
    Matrix a(static_cast<Eigen::Index>(train.rows()), 11);
    a.leftCols(10) = train.x.leftCols(10);
    a.col(10).setOnes();
    const Vector coef = a.householderQr().solve(train.y);
    const Vector fitted = validation.x.leftCols(10) * coef.head(10);
    const double ols_mse = ((fitted.array() + coef(10)).matrix() - validation.y).squaredNorm() /
                           static_cast<double>(validation.rows());
    CHECK(model.validation_mse <= 2.0 * ols_mse);
    CHECK(model.epsilon == 0.01);

    const auto again = fit_surrogate_svr(data, mask);
    CHECK(again.svr.w == model.svr.w);
    CHECK(again.c == model.c);
    CHECK(to_json(again) == to_json(model));
}

TEST_CASE("surrogate grid edge cases") {
    Rng rng(13);
    const auto data = linear_selection(rng, 120, 0.05);
    SurrogateGrid one;
    one.c = {10.0};
    one.epsilon = {0.1};
    const auto model = fit_surrogate_svr(data, first_ten(), one);
    CHECK(model.c == 10.0);
    CHECK(model.epsilon == 0.1);
    SurrogateGrid empty;
    empty.c.clear();
    CHECK_THROWS_AS(fit_surrogate_svr(data, first_ten(), empty), ConfigError);
    CHECK_THROWS_AS(fit_surrogate_svr(data, featsel::FeatureMask::from_bits(featsel::Bits(62, false), "none")),
                    ConfigError);
}

TEST_CASE("planted dominant feature ranks first") {
    // No seasonality and no lagged price, so the target is driven by the
    // planted features with F35 carrying the largest coefficient.
    dataio::SynthConfig config;
    config.annual_amplitude = 0.0;
    config.weekly_amplitude = 0.0;
    config.lagged_price_feature = false;
    config.planted = {{1, 3.0}, {16, 2.0}, {34, 8.0}};
    for (std::uint64_t seed = 14; seed < 17; ++seed) {
        CAPTURE(seed);
        Rng rng(seed);
        const auto table = dataio::synth_generate(rng, 300, config).table;
        const auto params = dataio::fit_normalizer(table, {0, 240});
        const auto normalized = dataio::apply_normalizer(table, params);
        const auto data = featsel::SelectionData::from_table(normalized, {0, 300}, "target");
        const auto train = data.head(239);
        const auto test = data.tail_from(239);
        const auto model = fit_surrogate_svr(train, featsel::pearson_select(train));
        Rng bg_rng(0);
        const auto bg = sample_background(model.project(train.x), 100, bg_rng);
        const Matrix xt = model.project(test.x);
        std::vector<ShapExplanation> ex;
        for (Eigen::Index r = 0; r < xt.rows(); ++r) {
            ex.push_back(kernel_shap(model.predictor(), xt.row(r).transpose(), bg, {.n_coalitions = 256}));
        }
        CHECK(importance_ranking(ex, model.names).front().name == "F35");
    }
}

TEST_CASE("trained bundles explain through the black-box view") {
    Rng rng(15);
    const auto table = dataio::synth_generate(rng, 120).table;
    auto spec = models::build("M1", models::desk_sizing());
    spec.train.max_epochs = 2;
    const auto plan = splits::walk_forward_folds(table.rows(), 20, 10);
    auto bundle = std::make_shared<models::ModelBundle>(
        models::train_model(spec, table, plan.folds.front(), 1, 0, {}, nullptr));
    const auto recent = dataio::slice_rows(table, {0, plan.folds.front().test.begin});
    const auto view = bundle_view(bundle, recent);
    CHECK(view.names.size() == 30);
    CHECK(view.predictor(view.instance.transpose())(0) == doctest::Approx(bundle->predict(recent)).epsilon(1e-12));
    const Matrix bg_rows = feature_rows(recent, view.names, {recent.rows() - 6, recent.rows() - 1});
    const auto e = kernel_shap(view.predictor, view.instance, Background{bg_rows}, {.n_coalitions = 64});
    CHECK(std::abs(phi_sum(e) - (e.prediction - e.base)) < 1e-9);
}
