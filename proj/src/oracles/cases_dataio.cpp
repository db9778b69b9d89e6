#include "cases.hpp"
#include "naive.hpp"

#include "epf/dataio/normalize.hpp"
#include "epf/dataio/preprocess.hpp"

#include <cmath>
#include <string>

namespace epf::oracles {

namespace {

Outcome flow_deviation(std::uint64_t seed) {
    Outcome worst;
    auto track = [&](double got, double want, const std::string& label) {
        const double gap = std::abs(got - want);
        if (!(gap <= worst.deviation)) worst = {gap, label};
    };
    std::vector<double> cap(24), flow(24);
    for (int i = 0; i < 24; ++i) cap[i] = 100.0 + 7.0 * i;
    track(dataio::flow_deviation(cap, cap), 0.0, "zero case");
    for (int i = 0; i < 24; ++i) flow[i] = cap[i] + 5.0;
    track(dataio::flow_deviation(flow, cap), 5.0, "constant offset 5");
    flow = cap;
    flow[13] += 24.0;
    track(dataio::flow_deviation(flow, cap), std::sqrt(24.0), "single hour 24");

    naive::Lcg g(seed);
    for (int trial = 0; trial < 50; ++trial) {
        double sq = 0.0;
        for (int i = 0; i < 24; ++i) {
            cap[i] = g.uniform(0.0, 3000.0);
            flow[i] = g.uniform(0.0, 3000.0);
            sq += (flow[i] - cap[i]) * (flow[i] - cap[i]);
        }
        const double want = std::sqrt(sq / 24.0);
        const double got = dataio::flow_deviation(flow, cap);
        const double gap = std::abs(got - want) / std::max(1.0, want);
        if (!(gap <= worst.deviation)) worst = {gap, "random day " + std::to_string(trial)};
    }
    return worst;
}

Outcome min_max(std::uint64_t seed) {
    naive::Lcg g(seed);
    dataio::TimeSeriesTable t;
    const std::size_t n = 80;
    for (std::size_t r = 0; r < n; ++r) t.stamps.push_back({});
    for (int c = 0; c < 3; ++c) {
        std::vector<double> col(n);
        for (auto& v : col) v = g.uniform(-50.0, 200.0);
        t.add_column("c" + std::to_string(c), col);
    }
    const dataio::RowRange fit{0, 60};
    const auto params = dataio::fit_normalizer(t, fit);
    const auto out = dataio::apply_normalizer(t, params);
    Outcome worst;
    for (int c = 0; c < 3; ++c) {
        const auto& raw = t.columns[c];
        double lo = raw[0], hi = raw[0];
        for (std::size_t r = 0; r < 60; ++r) {
            lo = std::min(lo, raw[r]);
            hi = std::max(hi, raw[r]);
        }
        for (std::size_t r = 0; r < 60; ++r) {
            const double gap = std::abs(out.columns[c][r] - (raw[r] - lo) / (hi - lo));
            if (!(gap <= worst.deviation)) worst = {gap, "column " + std::to_string(c) + " row " + std::to_string(r)};
        }
    }
    return worst;
}

}  // namespace

void add_dataio_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"dataio.flow_deviation", "dataio", 11,
                     "analytic cases 0, 5 and sqrt(24) plus a direct root-mean-square loop", 1e-12, flow_deviation});
    cases.push_back({"dataio.min_max_scaling", "dataio", 12, "(x - min) / (max - min) over the fit rows", 1e-12,
                     min_max});
}

}  // namespace epf::oracles
