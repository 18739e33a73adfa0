#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fann::acceptance {

struct Config {
    std::uint64_t seed = 20240611;
    /// Multiplier on the Frechet bisection tolerance; the canary trips when it is large.
    double tol_scale = 1.0;
    /// Curve-test budget for eager builds.
    double budget = 1e8;
    /// Path to the fann executable; when set, exit codes and CLI determinism are checked too.
    std::string cli;
    /// Criteria to run (0 is the canary); empty runs everything.
    std::vector<int> only;
};

struct Result {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

/// Runs the selected suites in id order. Progress lines with timings go to log.
std::vector<Result> run(const Config& config, std::ostream* log = nullptr);

/// Machine-readable summary without timings, so equal seeds give equal bytes.
std::string report_json(const Config& config, const std::vector<Result>& results);

bool all_passed(const std::vector<Result>& results);

} // namespace fann::acceptance
