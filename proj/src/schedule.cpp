#include "fastscat/schedule.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace fastscat {

namespace {

bool lex_less(const Eigen::Vector3i& a, const Eigen::Vector3i& b) {
    return std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z());
}

int imbalance(const std::vector<int>& t) {
    const int tmax = *std::max_element(t.begin(), t.end());
    int sum = 0;
    for (int ti : t) sum += tmax - ti;
    return sum;
}

} // namespace

TranslationWorkload make_workload(const FarInteractions& far) {
    TranslationWorkload w;
    w.entries.resize(far.classes.size());
    for (size_t c = 0; c < far.classes.size(); ++c)
        w.entries[c].representative = far.classes[c].representative;
    for (size_t p = 0; p < far.pairs.size(); ++p)
        w.entries[far.pairs[p].class_id].pair_ids.push_back(static_cast<int>(p));
    // Drop classes that somehow have no pairs; every retained class has
    // count >= 1.
    std::erase_if(w.entries, [](const auto& e) { return e.pair_ids.empty(); });
    return w;
}

Schedule build_schedule(const TranslationWorkload& workload, int workers) {
    if (workers < 1) throw std::invalid_argument("build_schedule: workers must be >= 1");

    const int total = workload.total();
    int max_pair_id = -1;
    for (const auto& e : workload.entries)
        for (int id : e.pair_ids) max_pair_id = std::max(max_pair_id, id);

    Schedule sched;
    sched.workers = workers;
    sched.assignments.assign(workers, {});
    sched.assigned_step.assign(max_pair_id + 1, 0);
    sched.assigned_worker.assign(max_pair_id + 1, -1);

    std::vector<int> t(workers, 0);
    auto give = [&](int worker, int pair_id, int step) {
        sched.assignments[worker].push_back(pair_id);
        sched.assigned_step[pair_id] = step;
        sched.assigned_worker[pair_id] = worker;
        ++t[worker];
    };

    // Remaining classes, selectable by ascending (count, lex vector).
    std::vector<int> remaining(workload.entries.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    auto pick_min = [&]() {
        int best = -1;
        for (int e : remaining) {
            if (best < 0) {
                best = e;
                continue;
            }
            const auto& a = workload.entries[e];
            const auto& b = workload.entries[best];
            if (a.pair_ids.size() < b.pair_ids.size() ||
                (a.pair_ids.size() == b.pair_ids.size() &&
                 lex_less(a.representative, b.representative)))
                best = e;
        }
        return best;
    };

    // Step 1: circular dealing of whole classes, smallest count first.
    int pointer = 0;
    int assigned_in_step1 = 0;
    while (!remaining.empty()) {
        const int cand = pick_min();
        const auto& entry = workload.entries[cand];

        // Tentative deal of this class.
        std::vector<int> t_after = t;
        int p_after = pointer;
        for (size_t i = 0; i < entry.pair_ids.size(); ++i) {
            ++t_after[p_after];
            p_after = (p_after + 1) % workers;
        }
        const int r_after = total - assigned_in_step1 - static_cast<int>(entry.pair_ids.size());
        if (r_after < imbalance(t_after)) break; // end without adding this class

        for (int id : entry.pair_ids) {
            give(pointer, id, 1);
            pointer = (pointer + 1) % workers;
        }
        assigned_in_step1 += static_cast<int>(entry.pair_ids.size());
        std::erase(remaining, cand);
    }

    // Step 2: flatten the rest ascending by (count, lex) and top up
    // workers from the smallest t, skipping the argmax worker.
    std::sort(remaining.begin(), remaining.end(), [&](int a, int b) {
        const auto& ea = workload.entries[a];
        const auto& eb = workload.entries[b];
        if (ea.pair_ids.size() != eb.pair_ids.size())
            return ea.pair_ids.size() < eb.pair_ids.size();
        return lex_less(ea.representative, eb.representative);
    });
    std::deque<int> queue;
    for (int e : remaining)
        for (int id : workload.entries[e].pair_ids) queue.push_back(id);

    if (!queue.empty()) {
        const int argmax_worker = static_cast<int>(
            std::max_element(t.begin(), t.end()) - t.begin());
        std::vector<int> order(workers);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return std::tie(t[a], a) < std::tie(t[b], b);
        });
        for (int w : order) {
            if (w == argmax_worker) continue;
            const int tmax = *std::max_element(t.begin(), t.end());
            int budget = std::max(0, tmax - t[w] - 1); // strictly below the difference
            while (budget > 0 && !queue.empty()) {
                give(w, queue.front(), 2);
                queue.pop_front();
                --budget;
            }
        }
    }

    // Step 3: residual dealt to the current argmin worker.
    while (!queue.empty()) {
        const int w = static_cast<int>(std::min_element(t.begin(), t.end()) - t.begin());
        give(w, queue.front(), 3);
        queue.pop_front();
    }
    return sched;
}

} // namespace fastscat
