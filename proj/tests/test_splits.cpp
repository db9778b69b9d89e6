#include "epf/dataio/catalog.hpp"
#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/splits/splits.hpp"

#include <doctest.h>

using namespace epf;
using namespace epf::splits;
using dataio::RowRange;

namespace {

dataio::TimeSeriesTable counting_table(std::size_t rows) {
    dataio::TimeSeriesTable t;
    std::vector<double> a(rows), b(rows), y(rows);
    const auto start = std::chrono::sys_days{std::chrono::year{2021} / 1 / 1};
    for (std::size_t r = 0; r < rows; ++r) {
        t.stamps.push_back({std::chrono::year_month_day{start + std::chrono::days{static_cast<int>(r)}}, -1});
        a[r] = static_cast<double>(r);
        b[r] = 100.0 + static_cast<double>(r);
        y[r] = -static_cast<double>(r);
    }
    t.add_column("F1", a);
    t.add_column("F2", b);
    t.add_column("target", y);
    return t;
}

}  // namespace

TEST_CASE("initial division") {
    auto d = initial_division(100);
    CHECK(d.train == RowRange{0, 80});
    CHECK(d.validation == RowRange{80, 90});
    CHECK(d.test == RowRange{90, 100});
    d = initial_division(101);
    CHECK(d.train == RowRange{0, 80});
    CHECK(d.validation == RowRange{80, 90});
    CHECK(d.test == RowRange{90, 101});
    CHECK_THROWS_AS(initial_division(10), ConfigError);
}

TEST_CASE("walk-forward folds roll forward one day") {
    const auto plan = walk_forward_folds(100, 10, 1);
    REQUIRE(plan.folds.size() == 10);
    CHECK(plan.folds[0].train == RowRange{0, 80});
    CHECK(plan.folds[0].validation == RowRange{80, 90});
    CHECK(plan.folds[0].test == RowRange{90, 91});
    CHECK(plan.folds[1].train == RowRange{0, 81});
    CHECK(plan.folds[1].validation == RowRange{81, 91});
    CHECK(plan.folds[1].test == RowRange{91, 92});
    CHECK_THROWS_AS(walk_forward_folds(100, 0, 1), ConfigError);
    CHECK_THROWS_AS(walk_forward_folds(100, 95, 1), ConfigError);
    CHECK_THROWS_AS(walk_forward_folds(20, 2, 1), ConfigError);
}

TEST_CASE("walk-forward plans satisfy the fold invariants") {
    numkernel::Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 50 + rng.below(400);
        const std::size_t val = 1 + rng.below(n / 10);
        const std::size_t test = 1 + rng.below(12);
        const auto plan = walk_forward_folds(n, val, test);
        const auto div = initial_division(n);
        std::vector<int> seen(n, 0);
        std::size_t prev_train = 0, prev_test_end = div.test.begin;
        for (std::size_t k = 0; k < plan.folds.size(); ++k) {
            const auto& f = plan.folds[k];
            CHECK(f.train.begin == 0);
            CHECK(f.train.end == f.validation.begin);
            CHECK(f.validation.end == f.test.begin);
            CHECK(f.validation.size() == val);
            CHECK(f.train.size() >= prev_train);
            CHECK(f.test.begin == prev_test_end);
            if (k + 1 < plan.folds.size()) {
                CHECK(f.test.size() == test);
            } else {
                CHECK(f.test.size() <= test);
            }
            prev_train = f.train.size();
            prev_test_end = f.test.end;
            for (auto r = f.test.begin; r < f.test.end; ++r) ++seen[r];
        }
        CHECK(prev_test_end == n);
        for (std::size_t r = 0; r < n; ++r) {
            CHECK(seen[r] == (r >= div.test.begin ? 1 : 0));
        }
    }
}

TEST_CASE("split plan json round trip") {
    const auto plan = walk_forward_folds(120, 12, 3);
    const auto j = to_json(plan);
    CHECK(j.at("folds").at(0).at("val") == nlohmann::json::array({96, 108}));
    CHECK(plan_from_json(j) == plan);
    CHECK_THROWS_AS(plan_from_json(nlohmann::json::object()), ConfigError);
}

TEST_CASE("windowize") {
    auto t = counting_table(15);
    auto w = windowize(t, {"F1", "F2"}, "target", 14);
    REQUIRE(w.size() == 1);
    CHECK(w.inputs[0].rows() == 14);
    CHECK(w.inputs[0].cols() == 2);
    CHECK(w.targets[0] == -14.0);

    t = counting_table(3);
    w = windowize(t, {"F1"}, "target", 1);
    REQUIRE(w.size() == 2);
    CHECK(w.inputs[0](0, 0) == 0.0);
    CHECK(w.inputs[1](0, 0) == 1.0);
    CHECK(w.targets[1] == -2.0);
    CHECK_THROWS_AS(windowize(t, {"F1"}, "target", 3), ConfigError);
    CHECK_THROWS_AS(windowize(t, {"F1"}, "target", 0), ConfigError);
    CHECK_THROWS_AS(windowize(t, {"F9"}, "target", 1), SchemaError);

    numkernel::Rng rng(2);
    const auto data = dataio::synth_generate(rng, 40);
    std::vector<std::string> thirty;
    for (std::size_t i = 0; i < 30; ++i) thirty.push_back(dataio::feature_id(2 * i));
    const auto masked = windowize(data.table, thirty, "target", 14);
    CHECK(masked.inputs[0].rows() == 14);
    CHECK(masked.inputs[0].cols() == 30);
}

TEST_CASE("windows never include their own target row") {
    const auto t = counting_table(60);
    for (std::size_t window = 1; window < 20; ++window) {
        const auto w = windowize(t, {"F1"}, "target", window);
        CHECK(w.size() == 60 - window);
        for (std::size_t i = 0; i < w.size(); ++i) {
            // F1 holds the row index, so the last input row must precede the target row.
            CHECK(w.inputs[i](static_cast<Eigen::Index>(window) - 1, 0) < static_cast<double>(w.target_rows[i]));
            CHECK(w.inputs[i](0, 0) == static_cast<double>(w.target_rows[i] - window));
        }
    }
}

TEST_CASE("select_targets keeps samples by target row") {
    const auto w = windowize(counting_table(30), {"F1"}, "target", 5);
    const auto sub = select_targets(w, {10, 13});
    CHECK(sub.target_rows == std::vector<std::size_t>{10, 11, 12});
    CHECK(sub.targets == std::vector<double>{-10, -11, -12});
}
