// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Pass criterion numbers as arguments to run a subset.

#include "epf/cli/commands.hpp"
#include "epf/cli/config.hpp"
#include "epf/dataio/synth.hpp"
#include "epf/errors.hpp"
#include "epf/eval/dm.hpp"
#include "epf/featsel/select.hpp"
#include "epf/models/pipeline.hpp"
#include "epf/neural/lstm.hpp"
#include "epf/oracles/harness.hpp"
#include "epf/splits/splits.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace epf;
namespace fs = std::filesystem;

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    std::string title;
    std::function<Verdict()> check;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Runs named oracle cases; all must pass.
Verdict oracle_cases(const std::vector<std::string>& names) {
    const auto cases = oracles::all_cases();
    Verdict v{true, ""};
    for (const auto& name : names) {
        const auto it = std::find_if(cases.begin(), cases.end(), [&](const auto& c) { return c.name == name; });
        if (it == cases.end()) return {false, "missing oracle case " + name};
        oracles::Outcome out;
        try {
            out = it->run(it->seed);
        } catch (const std::exception& e) {
            return {false, name + " threw: " + e.what()};
        }
        const bool ok = std::isfinite(out.deviation) && out.deviation <= it->tolerance;
        v.pass = v.pass && ok;
        if (!v.detail.empty()) v.detail += "; ";
        v.detail += name + " " + fmt(out.deviation) + (ok ? " <= " : " > ") + fmt(it->tolerance);
        if (!ok && !out.detail.empty()) v.detail += " (" + out.detail + ")";
    }
    return v;
}

Verdict merge(Verdict a, const Verdict& b) {
    a.pass = a.pass && b.pass;
    a.detail += "; " + b.detail;
    return a;
}

fs::path scratch(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("epf_acceptance_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Verdict selection_beats_full_encoder() {
    const auto config = cli::load_config(fs::path(EPF_TEST_DATA) / "acceptance_sweep.json");
    const auto dir = scratch("sweep");
    eval::ForecastReport report;
    cli::evaluate(config, dir, &report);
    fs::remove_all(dir);
    std::map<std::string, double> smape;
    for (const auto& m : report.models) {
        if (!m.failures.empty()) return {false, m.id + " had " + std::to_string(m.failures.size()) + " failed runs"};
        smape[m.id] = m.stats.at("smape").mean;
    }
    if (!smape.count("M6")) return {false, "M6 missing from the report"};
    std::string best = "M1";
    for (const char* id : {"M2", "M3", "M4", "M5"})
        if (smape.at(id) < smape.at(best)) best = id;
    std::string detail = "mean SMAPE over 5 seeds:";
    for (const auto& [id, s] : smape) detail += " " + id + " " + fmt(s);
    detail += "; best selector model " + best;
    return {smape.at(best) < smape.at("M6"), detail};
}

Verdict lstm_gradients() {
    auto v = oracle_cases({"neural.lstm_gradient", "neural.lstm_gradient_literal_output"});
    numkernel::Rng rng(5);
    numkernel::Matrix x(7, 4);
    for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = 10.0 * rng.normal();
    const auto states = neural::lstm_forward(neural::LstmParams::zeros(4, 3), x);
    const bool zero = states.hidden.isZero(0.0) && states.cell.isZero(0.0);
    return merge(v, {zero, std::string("zero-parameter states ") + (zero ? "identically zero" : "nonzero")});
}

Verdict dm_calibration() {
    auto v = oracle_cases({"eval.dm_null_calibration", "eval.dm_antisymmetry", "eval.dm_statistic"});
    const std::vector<double> same(30, 1.5), short_series(5, 1.0);
    bool degenerate = false, too_short = false;
    try {
        eval::dm_test(same, same);
    } catch (const DegenerateError&) {
        degenerate = true;
    }
    try {
        eval::dm_test(short_series, short_series);
    } catch (const ShapeError&) {
        too_short = true;
    }
    return merge(v, {degenerate && too_short, std::string("degenerate input ") +
                                                  (degenerate && too_short ? "raises typed errors" : "not rejected")});
}

Verdict selector_oracles() {
    auto v = oracle_cases({"featsel.pso_planted_mask", "featsel.ga_workflow", "featsel.rfe_planted_feature",
                           "featsel.lasso_soft_threshold"});
    numkernel::Rng rng(0);
    const auto table = dataio::synth_generate(rng, 400).table;
    const auto division = splits::initial_division(table.rows());
    const auto data = featsel::SelectionData::from_table(table, division.train, "target");
    featsel::SelectorConfig config;
    config.pso.iterations = 50;
    config.ga.generations = 30;
    config.ga.population = 20;
    config.rfe_drop_per_round = 4;
    std::set<std::vector<std::string>> distinct;
    std::string counts;
    bool thirty = true;
    for (auto s : {featsel::Selector::kPearson, featsel::Selector::kPso, featsel::Selector::kGa,
                   featsel::Selector::kRfe, featsel::Selector::kLasso}) {
        numkernel::Rng srng(7);
        const auto mask = featsel::select_features(s, data, config, srng);
        thirty = thirty && mask.count() == 30;
        distinct.insert(mask.selected());
        counts += " " + std::string(featsel::to_string(s)) + "=" + std::to_string(mask.count());
    }
    return merge(v, {thirty && distinct.size() > 1,
                     "popcounts" + counts + ", " + std::to_string(distinct.size()) + " distinct masks"});
}

// A fold's normalizer, mask and bundle must not move when later rows change.
Verdict no_leakage() {
    numkernel::Rng rng(12);
    const auto table = dataio::synth_generate(rng, 220).table;
    const auto plan = splits::walk_forward_folds(table.rows(), 20, 10);
    std::string detail;
    bool pass = true;
    for (const std::size_t f : {std::size_t{0}, plan.folds.size() / 2}) {
        const auto& fold = plan.folds[f];
        auto future = table, later = table;
        numkernel::Rng noise(99 + f);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            for (std::size_t t = fold.test.begin; t < table.rows(); ++t) future.columns[c][t] = 1e3 * noise.normal();
            for (std::size_t t = fold.validation.begin; t < table.rows(); ++t) later.columns[c][t] += 50.0;
        }
        for (const char* id : {"M0", "M1", "M2", "M3", "M4", "M5", "M6", "M7", "M8", "M9"}) {
            auto spec = models::build(id, models::desk_sizing());
            spec.train.max_epochs = 3;
            spec.train.patience = 2;
            spec.selection.pso.iterations = 10;
            spec.selection.ga.generations = 10;
            spec.selection.ga.population = 10;
            spec.selection.rfe_drop_per_round = 8;
            auto base = models::train_model(spec, table, fold, 5, f);
            auto moved = models::train_model(spec, future, fold, 5, f);
            auto shifted = models::train_model(spec, later, fold, 5, f);
            const bool bundle_same = models::to_json(base).dump() == models::to_json(moved).dump();
            const bool fit_same = base.normalizer == shifted.normalizer && base.mask == shifted.mask;
            if (!bundle_same || !fit_same) {
                pass = false;
                detail += std::string(" ") + id + "@fold" + std::to_string(f) + (bundle_same ? "" : " bundle") +
                          (fit_same ? "" : " normalizer/mask");
            }
        }
    }
    return {pass, pass ? "10 models x 2 folds: bundles byte-identical, normalizer and mask unchanged"
                       : "changed:" + detail};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[fs::relative(e.path(), root).string()] =
            std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return files;
}

Verdict deterministic_evaluate() {
    auto config = cli::load_config(fs::path(EPF_TEST_DATA) / "determinism.json");
    const auto a = scratch("det_a"), b = scratch("det_b");
    cli::evaluate(config, a);
    cli::evaluate(config, b);
    const auto fa = read_tree(a), fb = read_tree(b);
    fs::remove_all(a);
    fs::remove_all(b);
    std::string differing;
    for (const auto& [name, body] : fa) {
        const auto it = fb.find(name);
        if (it == fb.end() || it->second != body) differing += " " + name;
    }
    const bool pass = !fa.empty() && fa.size() == fb.size() && differing.empty();
    return {pass, std::to_string(fa.size()) + " report files" +
                      (differing.empty() ? " byte-identical across two runs" : ", differing:" + differing)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "feature selection beats the all-feature encoder-decoder", selection_beats_full_encoder},
        {2, "LSTM gradient check and zero-parameter forward", lstm_gradients},
        {3, "metric exactness and invariants",
         [] { return oracle_cases({"eval.metric_formulas", "eval.metric_invariants"}); }},
        {4, "Diebold-Mariano calibration, antisymmetry, degenerate input", dm_calibration},
        {5, "selector oracles and mask divergence", selector_oracles},
        {6, "SVR primal against the grid oracle", [] { return oracle_cases({"featsel.svr_primal"}); }},
        {7, "kernel SHAP against enumeration and axioms",
         [] {
             return oracle_cases({"explain.kernel_vs_enumeration", "explain.efficiency", "explain.symmetry_dummy",
                                  "explain.linear_closed_form"});
         }},
        {8, "no leakage from future rows", no_leakage},
        {9, "flow deviation analytic cases", [] { return oracle_cases({"dataio.flow_deviation"}); }},
        {10, "byte-identical evaluate reports", deterministic_evaluate},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.number)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += v.pass ? 0 : 1;
        std::printf("%s criterion %d: %s [%s] (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.number, c.title.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
