#include "cases.hpp"
#include "naive.hpp"

#include "epf/models/narmax.hpp"

#include <cmath>
#include <string>

namespace epf::oracles {

namespace {

using naive::Lcg;

// Linear ARX fit (no residual terms) against normal equations on a hand-built design.
Outcome narmax_arx(std::uint64_t seed) {
    Outcome worst;
    for (std::uint64_t s = 0; s < 5; ++s) {
        Lcg g(seed + s);
        const std::size_t n = 120, exo = 3;
        numkernel::Matrix x(n, exo);
        std::vector<double> y(n, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t j = 0; j < exo; ++j) x(t, j) = g.normal();
            if (t >= 2) y[t] = 1.0 + 0.5 * y[t - 1] - 0.2 * y[t - 2] + 0.8 * x(t, 0) - 0.4 * x(t, 2) + 0.3 * g.normal();
        }
        const models::NarmaxOrder order{.ny = 2, .nx = 1, .ne = 0, .degree = 1};
        const dataio::RowRange rows{2, 100};
        const auto model = models::narmax_fit(y, x, rows, order);

        auto regressors = [&](std::size_t t) {
            naive::Vec r{1.0, y[t - 1], y[t - 2]};
            for (std::size_t j = 0; j < exo; ++j) r.push_back(x(t, j));
            return r;
        };
        naive::Mat design;
        naive::Vec target;
        for (std::size_t t = rows.begin; t < rows.end; ++t) {
            design.push_back(regressors(t));
            target.push_back(y[t]);
        }
        const auto beta = naive::ols(design, target);
        for (std::size_t t = 2; t < n; ++t) {
            const auto r = regressors(t);
            double want = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) want += r[k] * beta[k];
            const double gap = std::abs(model.predict(y, x, t) - want);
            if (!(gap <= worst.deviation)) worst = {gap, "seed " + std::to_string(seed + s) + " t " + std::to_string(t)};
        }
    }
    return worst;
}

}  // namespace

void add_models_cases(std::vector<OracleCase>& cases) {
    cases.push_back({"models.narmax_arx", "models", 41,
                     "normal equations on intercept, two autoregressive lags and current exogenous inputs", 1e-8,
                     narmax_arx});
}

}  // namespace epf::oracles
