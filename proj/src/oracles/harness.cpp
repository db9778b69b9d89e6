#include "epf/oracles/harness.hpp"

#include "cases.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

namespace epf::oracles {

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

CaseResult execute(const OracleCase& c) {
    CaseResult r{c.name, c.module, c.procedure, c.seed, c.tolerance, 0.0, false, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto outcome = c.run(c.seed);
        r.deviation = outcome.deviation;
        r.detail = outcome.detail;
        r.passed = std::isfinite(outcome.deviation) && outcome.deviation <= c.tolerance;
    } catch (const std::exception& e) {
        r.deviation = std::numeric_limits<double>::infinity();
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

bool OracleReport::passed() const { return failures() == 0 && !results.empty(); }

std::size_t OracleReport::failures() const {
    std::size_t n = 0;
    for (const auto& r : results) n += r.passed ? 0 : 1;
    return n;
}

std::string OracleReport::to_text() const {
    std::ostringstream out;
    for (const auto& r : results) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << "  max deviation " << sci(r.deviation) << " (tolerance "
            << sci(r.tolerance) << ", seed " << r.seed << ")";
        if (!r.detail.empty()) out << "  " << r.detail;
        out << '\n';
    }
    out << results.size() - failures() << "/" << results.size() << " oracle cases passed\n";
    return out.str();
}

std::string OracleReport::to_junit() const {
    std::map<std::string, std::vector<const CaseResult*>> suites;
    for (const auto& r : results) suites[r.module].push_back(&r);
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<testsuites name=\"oracles\" tests=\"" << results.size() << "\" failures=\"" << failures() << "\">\n";
    for (const auto& [module, cases] : suites) {
        std::size_t failed = 0;
        double seconds = 0.0;
        for (const auto* c : cases) {
            failed += c->passed ? 0 : 1;
            seconds += c->seconds;
        }
        out << "  <testsuite name=\"" << xml_escape(module) << "\" tests=\"" << cases.size() << "\" failures=\""
            << failed << "\" time=\"" << seconds << "\">\n";
        for (const auto* c : cases) {
            out << "    <testcase classname=\"oracles." << xml_escape(module) << "\" name=\"" << xml_escape(c->name)
                << "\" time=\"" << c->seconds << "\">\n";
            out << "      <properties><property name=\"procedure\" value=\"" << xml_escape(c->procedure)
                << "\"/><property name=\"seed\" value=\"" << c->seed << "\"/><property name=\"max_deviation\" value=\""
                << sci(c->deviation) << "\"/><property name=\"tolerance\" value=\"" << sci(c->tolerance)
                << "\"/></properties>\n";
            if (!c->passed) {
                out << "      <failure message=\"deviation " << sci(c->deviation) << " exceeds " << sci(c->tolerance)
                    << "\">" << xml_escape(c->detail) << "</failure>\n";
            }
            out << "    </testcase>\n";
        }
        out << "  </testsuite>\n";
    }
    out << "</testsuites>\n";
    return out.str();
}

std::vector<OracleCase> all_cases() {
    std::vector<OracleCase> cases;
    add_dataio_cases(cases);
    add_neural_cases(cases);
    add_featsel_cases(cases);
    add_models_cases(cases);
    add_eval_cases(cases);
    add_explain_cases(cases);
    return cases;
}

OracleReport run_oracles(const std::optional<std::string>& filter, std::size_t jobs) {
    std::vector<OracleCase> selected;
    for (auto& c : all_cases()) {
        if (!filter || filter->empty() || c.module == *filter) selected.push_back(std::move(c));
    }
    OracleReport report;
    report.results.resize(selected.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < selected.size(); i = next++) report.results[i] = execute(selected[i]);
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::max<std::size_t>(1, std::min(jobs, selected.size())); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return report;
}

}  // namespace epf::oracles
