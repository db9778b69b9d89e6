#include "epf/eval/experiment.hpp"

#include "epf/errors.hpp"

#include <cstdio>
#include <sstream>

namespace epf::eval {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::vector<double> ExperimentResult::mean_prediction() const {
    if (runs.empty()) return {};
    std::vector<double> mean(runs.front().predicted.size(), 0.0);
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += r.predicted[i];
    }
    for (auto& v : mean) v /= static_cast<double>(runs.size());
    return mean;
}

ExperimentResult run_experiments(const models::ModelSpec& spec, const dataio::TimeSeriesTable& table,
                                 const splits::SplitPlan& plan, const ExperimentOptions& options) {
    std::vector<std::uint64_t> seeds = options.seeds;
    if (seeds.empty()) {
        for (std::size_t k = 0; k < options.experiments; ++k) seeds.push_back(options.base_seed + k);
    }
    if (seeds.empty()) {
        throw ConfigError("run_experiments: need at least one experiment");
    }
    ExperimentResult out;
    out.id = spec.id;
    out.name = spec.name;
    for (const std::uint64_t seed : seeds) {
        try {
            auto run = models::run_model(spec, table, plan, seed, options.pipeline);
            if (out.rows.empty()) {
                out.rows = run.rows();
                out.actual = run.actual();
                for (auto r : out.rows) out.dates.push_back(dataio::to_string(table.stamps[r]));
            }
            RunRecord rec{seed, metrics(run.actual(), run.predicted(), options.metrics), run.predicted()};
            if (options.on_run) options.on_run(run);
            out.runs.push_back(std::move(rec));
        } catch (const Error& e) {
            out.failures.push_back({seed, e.what()});
        }
    }
    if (!out.runs.empty()) {
        std::vector<double> mae, rmse, mape, smape;
        for (const auto& r : out.runs) {
            mae.push_back(r.metrics.mae);
            rmse.push_back(r.metrics.rmse);
            smape.push_back(r.metrics.smape);
            if (r.metrics.mape) mape.push_back(*r.metrics.mape);
        }
        out.stats["mae"] = describe(mae);
        out.stats["rmse"] = describe(rmse);
        out.stats["smape"] = describe(smape);
        if (!mape.empty()) out.stats["mape"] = describe(mape);
    }
    return out;
}

ForecastReport build_report(std::vector<ExperimentResult> results, nlohmann::json config) {
    ForecastReport report;
    report.models = std::move(results);
    report.config = std::move(config);
    std::vector<std::string> ids;
    std::vector<std::vector<double>> errors;
    for (const auto& m : report.models) {
        const auto mean = m.mean_prediction();
        if (mean.empty()) continue;
        std::vector<double> e(mean.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = mean[i] - m.actual[i];
        if (!errors.empty() && errors.front().size() != e.size()) {
            throw ShapeError("build_report: models were evaluated on different test rows");
        }
        ids.push_back(m.id);
        errors.push_back(std::move(e));
    }
    if (ids.size() >= 2 && errors.front().size() >= 10) {
        report.dm = dm_matrix(ids, errors);
    } else {
        report.dm.models = ids;
    }
    return report;
}

std::string ForecastReport::stats_csv() const {
    std::ostringstream csv;
    csv << "model,metric,count,mean,std,min,25%,50%,75%,max\n";
    for (const auto& m : models) {
        for (const char* metric : {"mae", "rmse", "mape", "smape"}) {
            const auto it = m.stats.find(metric);
            if (it == m.stats.end()) continue;
            const auto& s = it->second;
            csv << m.id << ',' << metric << ',' << s.count << ',' << fmt(s.mean) << ',' << fmt(s.std) << ','
                << fmt(s.min) << ',' << fmt(s.p25) << ',' << fmt(s.p50) << ',' << fmt(s.p75) << ',' << fmt(s.max)
                << '\n';
        }
    }
    return csv.str();
}

std::string ForecastReport::runs_csv() const {
    std::ostringstream csv;
    csv << "model,seed,mae,rmse,mape,smape,n\n";
    for (const auto& m : models) {
        for (const auto& r : m.runs) {
            csv << m.id << ',' << r.seed << ',' << fmt(r.metrics.mae) << ',' << fmt(r.metrics.rmse) << ','
                << (r.metrics.mape ? fmt(*r.metrics.mape) : "") << ',' << fmt(r.metrics.smape) << ','
                << r.metrics.n << '\n';
        }
    }
    return csv.str();
}

std::string ForecastReport::predictions_csv() const {
    std::ostringstream csv;
    const ExperimentResult* ref = nullptr;
    csv << "row,date,actual";
    std::vector<std::vector<double>> means;
    for (const auto& m : models) {
        auto mean = m.mean_prediction();
        if (mean.empty()) continue;
        if (!ref) ref = &m;
        csv << ',' << m.id;
        means.push_back(std::move(mean));
    }
    csv << '\n';
    if (!ref) return csv.str();
    for (std::size_t i = 0; i < ref->rows.size(); ++i) {
        csv << ref->rows[i] << ',' << ref->dates[i] << ',' << fmt(ref->actual[i]);
        for (const auto& mean : means) csv << ',' << fmt(mean[i]);
        csv << '\n';
    }
    return csv.str();
}

nlohmann::json ForecastReport::to_json() const {
    nlohmann::json out{{"config", config}, {"dm", dm.to_json()}};
    nlohmann::json list = nlohmann::json::array();
    for (const auto& m : models) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& r : m.runs) runs.push_back({{"seed", r.seed}, {"metrics", eval::to_json(r.metrics)}});
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& f : m.failures) failures.push_back({{"seed", f.seed}, {"error", f.message}});
        nlohmann::json stats = nlohmann::json::object();
        for (const auto& [k, s] : m.stats) stats[k] = eval::to_json(s);
        list.push_back({{"id", m.id},
                        {"name", m.name},
                        {"runs", runs},
                        {"failures", failures},
                        {"stats", stats},
                        {"rows", m.rows},
                        {"dates", m.dates},
                        {"actual", m.actual},
                        {"mean_prediction", m.mean_prediction()}});
    }
    out["models"] = list;
    return out;
}

}  // namespace epf::eval
