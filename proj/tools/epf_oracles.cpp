// epf_oracles: runs the oracle registry and reports one line per case.

#include "epf/oracles/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Oracle and property-check suite"};
    std::optional<std::string> filter;
    std::size_t jobs = 1;
    std::string junit, text;
    bool list = false;
    app.add_option("--filter", filter, "Run only the cases of this module");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--junit", junit, "Write a JUnit XML report here");
    app.add_option("--text", text, "Write the text report here");
    app.add_flag("--list", list, "List the cases and exit");
    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& c : epf::oracles::all_cases()) {
            std::cout << c.name << "  tol " << c.tolerance << "  seed " << c.seed << "  " << c.procedure << '\n';
        }
        return 0;
    }
    const auto report = epf::oracles::run_oracles(filter, jobs);
    if (report.results.empty()) {
        std::cerr << "no oracle case matches module '" << filter.value_or("") << "'\n";
        return 2;
    }
    const std::string body = report.to_text();
    std::cout << body;
    if (!text.empty()) std::ofstream(text) << body;
    if (!junit.empty()) std::ofstream(junit) << report.to_junit();
    if (report.passed()) return 0;
    std::cerr << "failing cases:";
    for (const auto& r : report.results)
        if (!r.passed) std::cerr << ' ' << r.name;
    std::cerr << '\n';
    return 1;
}
