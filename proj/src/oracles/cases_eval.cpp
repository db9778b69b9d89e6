#include "cases.hpp"
#include "naive.hpp"

#include "epf/eval/dm.hpp"
#include "epf/eval/metrics.hpp"

#include <cmath>
#include <string>

namespace epf::oracles {

namespace {

using naive::Lcg;

void keep_worst(Outcome& worst, double gap, const std::string& where) {
    if (!(gap <= worst.deviation)) worst = {gap, where};
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

std::vector<double> prices(Lcg& g, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = g.uniform(5.0, 120.0) * (g.uniform() < 0.1 ? -1.0 : 1.0);
    return v;
}

Outcome metric_formulas(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 100);
        const auto y = prices(g, n), f = prices(g, n);
        double ae = 0, se = 0, ape = 0, sape = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = std::abs(y[k] - f[k]);
            ae += e;
            se += e * e;
            ape += e / std::abs(y[k]);
            sape += e / ((std::abs(y[k]) + std::abs(f[k])) / 2.0);
        }
        const auto m = eval::metrics(y, f);
        const std::string at = "vector " + std::to_string(trial);
        keep_worst(worst, rel(m.mae, ae / n), at + " MAE");
        keep_worst(worst, rel(m.rmse, std::sqrt(se / n)), at + " RMSE");
        keep_worst(worst, rel(*m.mape, 100.0 * ape / n), at + " MAPE");
        keep_worst(worst, rel(m.smape, 100.0 * sape / n), at + " SMAPE");
    }
    return worst;
}

// Number of instances violating SMAPE symmetry, RMSE >= MAE or the SMAPE range.
Outcome metric_invariants(std::uint64_t seed) {
    Lcg g(seed);
    Outcome out;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(g.uniform() * 30);
        const auto y = prices(g, n), f = prices(g, n);
        const auto a = eval::metrics(y, f), b = eval::metrics(f, y);
        const bool ok = a.smape == b.smape && a.rmse >= a.mae && a.smape >= 0.0 && a.smape <= 200.0;
        if (!ok) {
            out.deviation += 1.0;
            if (out.detail.empty()) out.detail = "first at instance " + std::to_string(trial);
        }
    }
    return out;
}

Outcome dm_statistic(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 10 + static_cast<std::size_t>(g.uniform() * 200);
        std::vector<double> e1(n), e2(n);
        for (std::size_t k = 0; k < n; ++k) e1[k] = g.normal() * 1.2, e2[k] = g.normal();
        const double t = static_cast<double>(n);
        double mean = 0.0, var = 0.0;
        for (std::size_t k = 0; k < n; ++k) mean += (std::abs(e1[k]) - std::abs(e2[k])) / t;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(e1[k]) - std::abs(e2[k]) - mean;
            var += d * d / t;
        }
        const double stat = mean / std::sqrt(var / t) * std::sqrt((t - 1.0) / t);
        const auto up = eval::dm_test(e1, e2, eval::DmSide::kF2Better);
        const auto down = eval::dm_test(e1, e2, eval::DmSide::kF1Better);
        const std::string at = "series " + std::to_string(trial);
        keep_worst(worst, rel(up.statistic, stat), at + " statistic");
        keep_worst(worst, std::abs(up.p_value - (1.0 - naive::student_t_cdf(stat, t - 1.0))), at + " upper p");
        keep_worst(worst, std::abs(down.p_value - naive::student_t_cdf(stat, t - 1.0)), at + " lower p");
    }
    return worst;
}

Outcome dm_antisymmetry(std::uint64_t seed) {
    Lcg g(seed);
    Outcome worst;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> e1(60), e2(60);
        for (std::size_t k = 0; k < 60; ++k) e1[k] = g.normal(), e2[k] = 1.3 * g.normal();
        const auto ab = eval::dm_test(e1, e2), ba = eval::dm_test(e2, e1);
        keep_worst(worst, std::abs(ab.statistic + ba.statistic), "pair " + std::to_string(trial));
        const auto ba_lower = eval::dm_test(e2, e1, eval::DmSide::kF1Better);
        keep_worst(worst, std::abs(ab.p_value - ba_lower.p_value), "pair " + std::to_string(trial) + " p");
    }
    return worst;
}

// |rejection rate - 0.05| at the 5% level under i.i.d. equal-accuracy errors.
Outcome dm_null_rate(std::uint64_t seed) {
    Lcg g(seed);
    int rejected = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> e1(200), e2(200);
        for (std::size_t k = 0; k < 200; ++k) e1[k] = g.normal(), e2[k] = g.normal();
        rejected += eval::dm_test(e1, e2).p_value < 0.05;
    }
    const double rate = rejected / 1000.0;
    return {std::abs(rate - 0.05), "rejection rate " + std::to_string(rate)};
}

}  // namespace

void add_eval_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"eval.metric_formulas", "eval", 51, "scalar-loop MAE, RMSE, MAPE and SMAPE", 1e-10,
                     metric_formulas});
    cases.push_back({"eval.metric_invariants", "eval", 52, "SMAPE symmetry, RMSE >= MAE, SMAPE in [0, 200]", 0.0,
                     metric_invariants});
    cases.push_back({"eval.dm_statistic", "eval", 53,
                     "corrected statistic by hand; p-value by Simpson integration of the t density", 1e-6,
                     dm_statistic});
    cases.push_back({"eval.dm_antisymmetry", "eval", 54, "swapping forecasts negates the statistic", 1e-12,
                     dm_antisymmetry});
    cases.push_back({"eval.dm_null_calibration", "eval", 55, "1000 null trials at T = 200", 0.02, dm_null_rate});
}

}  // namespace epf::oracles
