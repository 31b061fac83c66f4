#pragma once

#include <string>
#include <vector>

namespace fastscat {

/// One acceptance check: oracle comparison at a pinned tolerance.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the acceptance criteria (all when `criteria` is empty) against
/// the shipped desk configuration. Heavy artifacts (generated mesh,
/// trained models) are cached under `work_dir` so re-runs are fast.
/// Every tolerance is pinned in this translation unit.
std::vector<CriterionResult> run_acceptance(const std::string& work_dir,
                                            const std::vector<int>& criteria = {},
                                            bool verbose = true);

/// Prints one pass/fail line per criterion; returns the failure count.
int report_acceptance(const std::vector<CriterionResult>& results);

} // namespace fastscat
