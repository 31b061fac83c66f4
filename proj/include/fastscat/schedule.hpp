#pragma once

#include "fastscat/translation.hpp"

namespace fastscat {

/// Per-class translation counts driving worker assignment. Entries hold
/// the ids of the box pairs using the class (or its symmetry equivalents).
struct TranslationWorkload {
    struct Entry {
        Eigen::Vector3i representative;
        std::vector<int> pair_ids; // canonical (target, source) order
    };
    std::vector<Entry> entries;

    int total() const {
        int n = 0;
        for (const auto& e : entries) n += static_cast<int>(e.pair_ids.size());
        return n;
    }
};

TranslationWorkload make_workload(const FarInteractions& far);

/// Worker assignment produced by the three-step strategy:
///   1. classes taken by ascending count, their translations dealt to
///      workers round-robin; ends (without adding the candidate class)
///      once remaining translations < sum_j (max_i t_i - t_j);
///   2. remaining classes flattened in ascending-count order top up
///      workers from the smallest t_j, skipping the argmax worker, each
///      receiving strictly fewer than max t_i - t_j translations;
///   3. the residual is dealt one by one to the current argmin worker.
/// Ties everywhere break by ascending lexicographic class vector, then
/// ascending worker index. Deterministic.
struct Schedule {
    int workers = 1;
    std::vector<std::vector<int>> assignments; // per worker, in assignment order
    std::vector<int> assigned_step;            // per pair id: 1, 2 or 3
    std::vector<int> assigned_worker;          // per pair id

    std::vector<int> counts() const {
        std::vector<int> t(assignments.size());
        for (size_t i = 0; i < assignments.size(); ++i)
            t[i] = static_cast<int>(assignments[i].size());
        return t;
    }
    int total() const {
        int n = 0;
        for (const auto& a : assignments) n += static_cast<int>(a.size());
        return n;
    }
};

Schedule build_schedule(const TranslationWorkload& workload, int workers);

} // namespace fastscat
