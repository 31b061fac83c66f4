#include "fastscat/far_engine.hpp"

#include <map>
#include <stdexcept>
#include <thread>

namespace fastscat {

FarEngine::FarEngine(const BoxGrid& grid, const UniformBoxModel& model, const Medium& medium,
                     FarEngineOptions options)
    : grid_(&grid), model_(&model), medium_(medium), options_(options) {
    far_ = classify_far_vectors(grid);

    rep_matrices_.resize(far_.classes.size());
    for (size_t c = 0; c < far_.classes.size(); ++c)
        rep_matrices_[c] = build_translation_matrix(far_.classes[c].representative, model, medium);

    // Member occurrence counts decide which matrices get materialized.
    std::map<std::pair<int, int>, int> occurrences;
    for (const FarPair& p : far_.pairs) ++occurrences[{p.class_id, p.member_id}];

    member_ops_.resize(far_.classes.size());
    for (size_t c = 0; c < far_.classes.size(); ++c) {
        const auto& members = far_.classes[c].members;
        member_ops_[c].resize(members.size());
        for (size_t m = 0; m < members.size(); ++m) {
            MemberOp& op = member_ops_[c][m];
            const SignedPerm& sym = members[m].sym;
            op.identity_sym = sym.is_identity();
            op.q = sym.matrix();
            const std::vector<int> sigma = dipole_permutation(sym, model);
            op.sigma3.resize(3 * model.num_dipoles);
            for (int d = 0; d < model.num_dipoles; ++d)
                for (int comp = 0; comp < 3; ++comp)
                    op.sigma3[3 * d + comp] = 3 * sigma[d] + comp;
            op.rep = &rep_matrices_[c];
            if (options_.backend == FarBackend::dgfa && options_.member_cache_min_count > 0 &&
                occurrences[{static_cast<int>(c), static_cast<int>(m)}] >=
                    options_.member_cache_min_count &&
                !op.identity_sym) {
                member_cache_.push_back(std::make_unique<Eigen::MatrixXcd>(
                    transform_to_member(rep_matrices_[c], sym, model)));
                op.cached = member_cache_.back().get();
            } else if (op.identity_sym) {
                op.cached = &rep_matrices_[c];
            }
        }
    }

    // Pairs arrive sorted by (target, source); record per-target ranges.
    target_offsets_.assign(grid.box_count() + 1, 0);
    for (const FarPair& p : far_.pairs) ++target_offsets_[p.target_box + 1];
    for (int b = 0; b < grid.box_count(); ++b) target_offsets_[b + 1] += target_offsets_[b];

    slots_.resize(3 * model.num_dipoles, static_cast<Eigen::Index>(far_.pairs.size()));
    set_workers(options_.workers);
}

void FarEngine::set_workers(int workers) {
    if (workers < 1) throw std::invalid_argument("FarEngine: workers must be >= 1");
    options_.workers = workers;
    schedule_ = build_schedule(make_workload(far_), workers);
    // Execution order within a worker is free (slots fix the reduction
    // order); sorting by member lets the apply kernel reuse matrices.
    for (auto& list : schedule_.assignments)
        std::sort(list.begin(), list.end(), [&](int a, int b) {
            const FarPair& pa = far_.pairs[a];
            const FarPair& pb = far_.pairs[b];
            return std::tie(pa.class_id, pa.member_id, a) <
                   std::tie(pb.class_id, pb.member_id, b);
        });
}

void FarEngine::attach_models(const std::vector<CvfcnnModel>& models) {
    models_.assign(far_.classes.size(), {});
    has_model_.assign(far_.classes.size(), 0);
    std::map<std::array<int, 3>, int> class_of;
    for (size_t c = 0; c < far_.classes.size(); ++c) {
        const auto& r = far_.classes[c].representative;
        class_of[{r.x(), r.y(), r.z()}] = static_cast<int>(c);
    }
    for (const CvfcnnModel& m : models) {
        auto it = class_of.find({m.class_vec.x(), m.class_vec.y(), m.class_vec.z()});
        if (it == class_of.end()) continue; // not needed for this grid
        if (m.dim != 3 * model_->num_dipoles)
            throw std::runtime_error(
                "attach_models: model for class [" + std::to_string(m.class_vec.x()) + "," +
                std::to_string(m.class_vec.y()) + "," + std::to_string(m.class_vec.z()) +
                "] has dim " + std::to_string(m.dim) + ", expected " +
                std::to_string(3 * model_->num_dipoles));
        models_[it->second] = m;
        has_model_[it->second] = 1;
    }
    std::string missing;
    for (size_t c = 0; c < far_.classes.size(); ++c) {
        if (!has_model_[c]) {
            const auto& r = far_.classes[c].representative;
            missing += " [" + std::to_string(r.x()) + "," + std::to_string(r.y()) + "," +
                       std::to_string(r.z()) + "]";
        }
    }
    if (!missing.empty())
        throw std::runtime_error("attach_models: missing models for classes:" + missing);
    for (size_t c = 0; c < far_.classes.size(); ++c) {
        for (auto& op : member_ops_[c]) op.net = &models_[c];
    }
}

// Batched translation products for one member: the matrix is applied to
// up to kBatch sources at once with rank-1 updates (acc += G.col(k) *
// x.row(k), k ascending), so every output column carries its own fixed
// accumulation chain. Results are therefore bit-identical however the
// pairs are batched or distributed over workers.
void FarEngine::run_member_batch(const MemberOp& op, const DipoleCoefficients& coeffs,
                                 const int* pair_ids, int count, Eigen::MatrixXcd& in_buf,
                                 Eigen::MatrixXcd& acc_buf) {
    const int n = 3 * model_->num_dipoles;
    const Eigen::MatrixXcd& g = op.cached ? *op.cached : *op.rep;
    const bool transform = !op.cached;

    for (int b = 0; b < count; ++b) {
        const FarPair& p = far_.pairs[pair_ids[b]];
        const Eigen::VectorXcd& src = coeffs.per_box[p.source_box];
        if (transform) {
            for (int d = 0; d < model_->num_dipoles; ++d)
                in_buf.col(b).segment<3>(3 * d) =
                    op.q.transpose() * CVec3(src[op.sigma3[3 * d]], src[op.sigma3[3 * d] + 1],
                                             src[op.sigma3[3 * d] + 2]);
        } else {
            in_buf.col(b) = src;
        }
    }

    auto acc = acc_buf.leftCols(count);
    acc.setZero();
    for (int k = 0; k < n; ++k)
        acc.noalias() += g.col(k) * in_buf.row(k).head(count);

    for (int b = 0; b < count; ++b) {
        const int pair_id = pair_ids[b];
        if (transform) {
            for (int d = 0; d < model_->num_dipoles; ++d)
                slots_.col(pair_id).segment<3>(op.sigma3[3 * d]) =
                    op.q * CVec3(acc(3 * d, b), acc(3 * d + 1, b), acc(3 * d + 2, b));
        } else {
            slots_.col(pair_id) = acc.col(b);
        }
    }
}

void FarEngine::worker_loop(int worker_id, const DipoleCoefficients& coeffs) {
    constexpr int kBatch = 8;
    const int n = 3 * model_->num_dipoles;
    const auto& list = schedule_.assignments[worker_id];

    if (options_.backend == FarBackend::ml) {
        Eigen::VectorXcd tmp(n), prod(n);
        for (int pair_id : list) {
            const FarPair& p = far_.pairs[pair_id];
            const MemberOp& op = member_ops_[p.class_id][p.member_id];
            const Eigen::VectorXcd& src = coeffs.per_box[p.source_box];
            // Predict in the representative frame, transform the output.
            if (op.identity_sym) {
                slots_.col(pair_id) = infer(*op.net, src);
            } else {
                for (int d = 0; d < model_->num_dipoles; ++d)
                    tmp.segment<3>(3 * d) =
                        op.q.transpose() *
                        CVec3(src[op.sigma3[3 * d]], src[op.sigma3[3 * d] + 1],
                              src[op.sigma3[3 * d] + 2]);
                prod = infer(*op.net, tmp);
                for (int d = 0; d < model_->num_dipoles; ++d) {
                    const CVec3 v = op.q * CVec3(prod[3 * d], prod[3 * d + 1], prod[3 * d + 2]);
                    slots_.col(pair_id).segment<3>(op.sigma3[3 * d]) = v;
                }
            }
        }
        return;
    }

    Eigen::MatrixXcd in_buf(n, kBatch), acc_buf(n, kBatch);
    size_t i = 0;
    while (i < list.size()) {
        const FarPair& head = far_.pairs[list[i]];
        // Consecutive run of the same member (lists are member-sorted).
        size_t j = i + 1;
        while (j < list.size()) {
            const FarPair& p = far_.pairs[list[j]];
            if (p.class_id != head.class_id || p.member_id != head.member_id) break;
            ++j;
        }
        const MemberOp& op = member_ops_[head.class_id][head.member_id];
        for (size_t start = i; start < j; start += kBatch)
            run_member_batch(op, coeffs, list.data() + start,
                             static_cast<int>(std::min<size_t>(kBatch, j - start)), in_buf,
                             acc_buf);
        i = j;
    }
}

std::vector<Eigen::VectorXcd> FarEngine::run(const DipoleCoefficients& coeffs) {
    if (options_.backend == FarBackend::ml && has_model_.empty())
        throw std::runtime_error("FarEngine: ml backend selected but no models attached");

    if (options_.workers == 1) {
        worker_loop(0, coeffs);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(options_.workers);
        for (int w = 0; w < options_.workers; ++w)
            pool.emplace_back([this, w, &coeffs] { worker_loop(w, coeffs); });
        for (auto& th : pool) th.join();
    }

    // Deterministic reduction: ascending source order within each target
    // (slot order), independent of the schedule.
    std::vector<Eigen::VectorXcd> fields(grid_->box_count(),
                                         Eigen::VectorXcd::Zero(3 * model_->num_dipoles));
    for (int b = 0; b < grid_->box_count(); ++b) {
        auto& f = fields[b];
        for (int s = target_offsets_[b]; s < target_offsets_[b + 1]; ++s) f += slots_.col(s);
    }
    return fields;
}

} // namespace fastscat
