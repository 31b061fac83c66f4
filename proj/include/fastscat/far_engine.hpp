#pragma once

#include <memory>

#include "fastscat/cvfcnn.hpp"
#include "fastscat/schedule.hpp"

namespace fastscat {

enum class FarBackend { dgfa, ml };

struct FarEngineOptions {
    FarBackend backend = FarBackend::dgfa;
    int workers = 1;
    /// Members occurring at least this often get a materialized matrix;
    /// rarer ones apply the representative through its symmetry. 0
    /// disables the member cache.
    int member_cache_min_count = 8;
};

/// Orchestrates the far-zone stage of the MVM: per-pair translation
/// products computed by a worker pool into disjoint per-pair slots,
/// followed by a reduction that always sums each target box's
/// contributions in ascending source-box order. The output is therefore
/// bit-identical for every worker count.
class FarEngine {
  public:
    FarEngine(const BoxGrid& grid, const UniformBoxModel& model, const Medium& medium,
              FarEngineOptions options);

    /// Attach one trained network per occurring class (required for the
    /// ml backend). Throws if a scheduled class has no model or a model
    /// has mismatched dimensions.
    void attach_models(const std::vector<CvfcnnModel>& models);

    /// Far fields per box from the dipole coefficients.
    std::vector<Eigen::VectorXcd> run(const DipoleCoefficients& coeffs);

    const FarInteractions& interactions() const { return far_; }
    const Schedule& schedule() const { return schedule_; }
    const UniformBoxModel& box_model() const { return *model_; }
    int pair_count() const { return static_cast<int>(far_.pairs.size()); }

    /// Rebuilds the schedule for a different worker count (benchmarks).
    void set_workers(int workers);

  private:
    struct MemberOp {
        std::vector<int> sigma3;       // stacked-index permutation (size 3 N_d)
        Eigen::Matrix3d q;             // component action
        const Eigen::MatrixXcd* cached = nullptr; // materialized member matrix
        const CvfcnnModel* net = nullptr;
        const Eigen::MatrixXcd* rep = nullptr;
        bool identity_sym = false;
    };

    void worker_loop(int worker_id, const DipoleCoefficients& coeffs);
    void run_member_batch(const MemberOp& op, const DipoleCoefficients& coeffs,
                          const int* pair_ids, int count, Eigen::MatrixXcd& in_buf,
                          Eigen::MatrixXcd& acc_buf);

    const BoxGrid* grid_;
    const UniformBoxModel* model_;
    Medium medium_;
    FarEngineOptions options_;

    FarInteractions far_;
    Schedule schedule_;
    std::vector<Eigen::MatrixXcd> rep_matrices_;
    std::vector<std::unique_ptr<Eigen::MatrixXcd>> member_cache_;
    std::vector<std::vector<MemberOp>> member_ops_; // [class][member]
    std::vector<CvfcnnModel> models_;               // indexed by class id
    std::vector<char> has_model_;

    Eigen::MatrixXcd slots_;         // 3 N_d x pair_count, pair order = canonical
    std::vector<int> target_offsets_; // per box: first slot of its pair range
};

} // namespace fastscat
