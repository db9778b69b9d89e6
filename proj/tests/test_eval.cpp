#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/eval/experiment.hpp"
#include "epf/numkernel/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace epf;
using namespace epf::eval;
using numkernel::Rng;

namespace {

std::vector<double> draw(Rng& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("metrics on hand-computed cases") {
    const std::vector<double> y{100}, f{50};
    const auto r = metrics(y, f);
    CHECK(r.mae == 50.0);
    CHECK(r.rmse == 50.0);
    CHECK(*r.mape == 50.0);
    CHECK(r.smape == doctest::Approx(200.0 / 3.0).epsilon(1e-14));
    CHECK(metrics(std::vector<double>{1}, std::vector<double>{0}, {.mape = true}).smape == 200.0);
    const auto same = metrics(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
    CHECK(same.mae == 0.0);
    CHECK(same.rmse == 0.0);
    CHECK(*same.mape == 0.0);
    CHECK(same.smape == 0.0);
    CHECK(same.n == 3);
}

TEST_CASE("metrics match direct evaluation on random vectors") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 1 + rng.below(40);
        const auto y = draw(rng, n, 5, 120), f = draw(rng, n, -20, 150);
        double mae = 0, mse = 0, mape = 0, smape = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double diff = y[k] - f[k];
            mae += std::fabs(diff);
            mse += diff * diff;
            mape += std::fabs(diff / y[k]);
            smape += 2.0 * std::fabs(diff) / (std::fabs(y[k]) + std::fabs(f[k]));
        }
        const auto r = metrics(y, f);
        CHECK(std::abs(r.mae - mae / n) < 1e-10);
        CHECK(std::abs(r.rmse - std::sqrt(mse / n)) < 1e-10);
        CHECK(std::abs(*r.mape - 100 * mape / n) < 1e-10);
        CHECK(std::abs(r.smape - 100 * smape / n) < 1e-10);
    }
}

TEST_CASE("metric invariants on random instances") {
    Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = 1 + rng.below(30);
        const auto y = draw(rng, n, -50, 100), f = draw(rng, n, -50, 100);
        const auto a = metrics(y, f, {.mape = false});
        const auto b = metrics(f, y, {.mape = false});
        CHECK(a.smape == doctest::Approx(b.smape).epsilon(1e-14));
        CHECK(a.rmse >= a.mae - 1e-12);
        CHECK(a.smape <= 200.0 + 1e-12);
        CHECK_FALSE(a.mape.has_value());
        const double c = rng.uniform(0.1, 10.0);
        std::vector<double> ys = y, fs = f;
        for (auto& v : ys) v *= c;
        for (auto& v : fs) v *= c;
        const auto s = metrics(ys, fs, {.mape = false});
        CHECK(s.mae == doctest::Approx(c * a.mae));
        CHECK(s.rmse == doctest::Approx(c * a.rmse));
        CHECK(s.smape == doctest::Approx(a.smape));
    }
}

TEST_CASE("metric zero handling") {
    const std::vector<double> y{0, 2, 4}, f{1, 2, 3};
    CHECK_THROWS_AS(metrics(y, f), DegenerateError);
    const auto no_mape = metrics(y, f, {.mape = false});
    CHECK_FALSE(no_mape.mape);
    CHECK(no_mape.smape == doctest::Approx(100.0 * (2.0 + 0.0 + 1.0 / 3.5) / 3.0));
    const auto tolerant = metrics(y, f, {.mape = true, .tolerate_zeros = true});
    CHECK(tolerant.mape_excluded == 1);
    CHECK(*tolerant.mape == doctest::Approx(100.0 * 0.25 / 2.0));
    const std::vector<double> z{0, 1};
    CHECK_THROWS_AS(metrics(z, z, {.mape = false}), DegenerateError);
    CHECK(metrics(z, z, {.mape = false, .tolerate_zeros = true}).smape_excluded == 1);
    CHECK_THROWS_AS(metrics(std::vector<double>{}, std::vector<double>{}), ShapeError);
    CHECK_THROWS_AS(metrics(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("dm statistic matches a hand computation") {
    Rng rng(3);
    const std::size_t t = 200;
    std::vector<double> e1(t), e2(t);
    for (std::size_t k = 0; k < t; ++k) {
        e2[k] = rng.normal();
        e1[k] = (std::fabs(e2[k]) + 1.0 + 0.3 * rng.normal()) * (rng.bernoulli(0.5) ? 1 : -1);
    }
    double dbar = 0;
    std::vector<double> d(t);
    for (std::size_t k = 0; k < t; ++k) dbar += (d[k] = std::fabs(e1[k]) - std::fabs(e2[k])) / t;
    double var = 0;
    for (double v : d) var += (v - dbar) * (v - dbar) / t;
    const double raw = dbar / std::sqrt(var / t);
    const auto r = dm_test(e1, e2);
    CHECK(r.raw_statistic == doctest::Approx(raw).epsilon(1e-12));
    CHECK(r.statistic == doctest::Approx(raw * std::sqrt((t - 1.0) / t)).epsilon(1e-12));
    CHECK(r.statistic > 0);
    CHECK(r.favors() == "F2");
    CHECK(r.p_value < 0.01);
    const auto other = dm_test(e1, e2, DmSide::kF1Better);
    CHECK(other.p_value == doctest::Approx(1.0 - r.p_value));
    CHECK(other.directional_p() == doctest::Approx(r.p_value));
}

TEST_CASE("dm p-values follow the Student-t table") {
    // T = 10 gives 9 degrees of freedom; the one-sided 5% and 1% critical values are 1.833113 and 2.821438.
    // Build d with a chosen mean and unit population variance: statistic = mean * sqrt(T) * sqrt(9/10).
    for (auto [crit, p] : {std::pair{1.833113, 0.05}, std::pair{2.821438, 0.01}}) {
        const double mean = crit / (std::sqrt(10.0) * std::sqrt(0.9));
        std::vector<double> e1(10), e2(10, 5.0);
        for (int k = 0; k < 10; ++k) e1[k] = 5.0 + mean + (k % 2 ? 1.0 : -1.0);
        const auto r = dm_test(e1, e2);
        CHECK(r.statistic == doctest::Approx(crit).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(p).epsilon(1e-5));
    }
}

TEST_CASE("dm antisymmetry and degenerate input") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> e1(60), e2(60);
        for (auto& v : e1) v = rng.normal();
        for (auto& v : e2) v = 1.3 * rng.normal();
        CHECK(std::abs(dm_test(e1, e2).statistic + dm_test(e2, e1).statistic) < 1e-12);
    }
    std::vector<double> e(20, 1.0);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = rng.normal();
    CHECK_THROWS_AS(dm_test(e, e), DegenerateError);
    std::vector<double> mirrored = e;
    for (auto& v : mirrored) v = -v;
    CHECK_THROWS_AS(dm_test(mirrored, e), DegenerateError);
    CHECK_THROWS_AS(dm_test(std::vector<double>(9, 1.0), std::vector<double>(9, 2.0)), ShapeError);
    CHECK_THROWS_AS(dm_test(std::vector<double>(12, 1.0), std::vector<double>(11, 2.0)), ShapeError);
}

TEST_CASE("dm rejection rate under the null") {
    Rng rng(5);
    int rejected = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> e1(200), e2(200);
        for (auto& v : e1) v = rng.normal();
        for (auto& v : e2) v = rng.normal();
        rejected += dm_test(e1, e2).p_value < 0.05 ? 1 : 0;
    }
    CHECK(rejected >= 30);
    CHECK(rejected <= 70);
}

TEST_CASE("significance stars and matrix layout") {
    CHECK(significance_stars(0.005) == "***");
    CHECK(significance_stars(0.03) == "**");
    CHECK(significance_stars(0.07) == "*");
    CHECK(significance_stars(0.12) == "#");
    CHECK(significance_stars(0.2).empty());
    Rng rng(6);
    std::vector<std::vector<double>> errors(3, std::vector<double>(100));
    for (std::size_t m = 0; m < 3; ++m) {
        for (auto& v : errors[m]) v = (1.0 + m) * rng.normal();
    }
    errors.push_back(errors[0]);
    const auto mat = dm_matrix({"A", "B", "C", "D"}, errors);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(mat.statistic[i][j] == doctest::Approx(-mat.statistic[j][i]));
            if (i != j) CHECK(mat.p_values[i][j] == doctest::Approx(mat.p_values[j][i]));
        }
    }
    CHECK(mat.statistic[0][2] < 0);
    CHECK_FALSE(mat.errors[0][3].empty());
    const auto csv = mat.to_csv();
    CHECK(csv.rfind("F1\\F2,A,B,C,D\n", 0) == 0);
    CHECK(csv.find("n/a") != std::string::npos);
    CHECK(csv.find("***") != std::string::npos);
}

TEST_CASE("describe statistics") {
    std::vector<double> v{4, 1, 10, 7, 2, 9, 3, 8, 6, 5};
    const auto s = describe(v);
    CHECK(s.count == 10);
    CHECK(s.mean == 5.5);
    CHECK(s.p50 == 5.5);
    CHECK(s.min == 1);
    CHECK(s.max == 10);
    CHECK(s.p25 == doctest::Approx(3.25));
    CHECK(s.p75 == doctest::Approx(7.75));
    CHECK(s.std == doctest::Approx(std::sqrt(82.5 / 9.0)));
    const auto one = describe(std::vector<double>{3.5});
    CHECK(one.std == 0.0);
    CHECK(one.mean == 3.5);
    CHECK(one.p25 == 3.5);
    CHECK_THROWS_AS(describe(std::vector<double>{}), ShapeError);
    const auto j = to_json(s);
    CHECK(j.at("25%") == 3.25);
}

namespace {

struct Fixture {
    dataio::TimeSeriesTable table;
    splits::SplitPlan plan;
};

Fixture small_fixture() {
    Rng rng(7);
    Fixture f{dataio::synth_generate(rng, 160).table, {}};
    f.plan = splits::walk_forward_folds(f.table.rows(), 16, 8);
    return f;
}

models::ModelSpec quick(std::string_view id) {
    auto spec = models::build(id, models::desk_sizing());
    spec.train.max_epochs = 3;
    spec.narmax.lags = {1};
    return spec;
}

}  // namespace

TEST_CASE("experiments aggregate runs deterministically") {
    const auto fx = small_fixture();
    const auto spec = quick("M1");
    const auto single = run_experiments(spec, fx.table, fx.plan, {.experiments = 1, .base_seed = 4});
    REQUIRE(single.runs.size() == 1);
    CHECK(single.stats.at("smape").mean == single.runs[0].metrics.smape);
    CHECK(single.stats.at("smape").std == 0.0);

    std::size_t callbacks = 0;
    ExperimentOptions opts{.experiments = 2, .base_seed = 4};
    opts.on_run = [&](models::ModelRun& run) {
        ++callbacks;
        CHECK(run.bundles.size() == fx.plan.folds.size());
    };
    const auto a = run_experiments(spec, fx.table, fx.plan, opts);
    const auto b = run_experiments(spec, fx.table, fx.plan, {.experiments = 2, .base_seed = 4});
    CHECK(callbacks == 2);
    CHECK(a.stats == b.stats);
    CHECK(a.runs[0].seed == 4);
    CHECK(a.runs[1].seed == 5);
    CHECK(a.runs[0].predicted == single.runs[0].predicted);
    CHECK(a.runs[0].predicted != a.runs[1].predicted);
    CHECK(a.dates.size() == a.rows.size());
}

TEST_CASE("failed runs are listed and the report covers the rest") {
    const auto fx = small_fixture();
    ExperimentOptions bad{.experiments = 2};
    bad.pipeline.target = "missing";
    const auto failed = run_experiments(quick("M6"), fx.table, fx.plan, bad);
    CHECK(failed.runs.empty());
    CHECK(failed.failures.size() == 2);
    CHECK(failed.stats.empty());

    const auto m0 = run_experiments(quick("M0"), fx.table, fx.plan, {.experiments = 1});
    const auto m6 = run_experiments(quick("M6"), fx.table, fx.plan, {.experiments = 2});
    const auto report = build_report({m0, m6, failed}, {{"note", "test"}});
    CHECK(report.dm.models == std::vector<std::string>{"M0", "M6"});
    const auto stats = report.stats_csv();
    CHECK(stats.rfind("model,metric,count,mean,std,min,25%,50%,75%,max\n", 0) == 0);
    CHECK(stats.find("M6,smape,2,") != std::string::npos);
    const auto preds = report.predictions_csv();
    CHECK(preds.rfind("row,date,actual,M0,M6\n", 0) == 0);
    const auto lines = std::count(preds.begin(), preds.end(), '\n');
    CHECK(static_cast<std::size_t>(lines) == m0.rows.size() + 1);
    const auto j = report.to_json();
    CHECK(j.at("models").size() == 3);
    CHECK(j.at("models").at(2).at("failures").size() == 2);
    CHECK(report.runs_csv().find("M6,1,") != std::string::npos);
}
