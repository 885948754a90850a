#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dpp {

// One line of a validation report. Informational entries are reported but do
// not decide the suite verdict.
struct SuiteEntry {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;
    std::string criterion;  // human-readable pass rule
    bool pass = true;
    bool informational = false;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<SuiteEntry> entries;
    bool pass() const;
};

// Sizes default to the acceptance settings; 0 keeps the default.
struct SuiteOptions {
    std::uint64_t seed = 7;
    std::size_t samples = 0;  // draws or paths
    double dt = 0.0;
};

const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const SuiteOptions& options);

}  // namespace dpp
