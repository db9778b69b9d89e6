#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace epf::oracles {

struct Outcome {
    double deviation = 0.0;  // worst gap between oracle and artifact
    std::string detail;      // where the worst gap occurred
};

/// One oracle comparison: `run(seed)` builds the oracle result and the
/// artifact result and reports their largest deviation. A case passes when
/// the deviation is finite and at most `tolerance`.
struct OracleCase {
    std::string name;       // "<module>.<what>"
    std::string module;     // numkernel, dataio, neural, featsel, models, eval, explain
    std::uint64_t seed = 0;
    std::string procedure;  // the independent computation used as oracle
    double tolerance = 0.0;
    std::function<Outcome(std::uint64_t seed)> run;
};

struct CaseResult {
    std::string name;
    std::string module;
    std::string procedure;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    double deviation = 0.0;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct OracleReport {
    std::vector<CaseResult> results;  // registry order

    bool passed() const;
    std::size_t failures() const;
    // One line per case plus a summary line.
    std::string to_text() const;
    // JUnit-style XML, one testsuite per module.
    std::string to_junit() const;
};

// Every registered case.
std::vector<OracleCase> all_cases();

/// Runs the cases whose module equals `filter` (all when empty) on up to
/// `jobs` threads. Each case owns its seed, so results do not depend on
/// scheduling. An exception inside a case counts as a failure.
OracleReport run_oracles(const std::optional<std::string>& filter = std::nullopt, std::size_t jobs = 1);

}  // namespace epf::oracles
