#pragma once

#include <memory>

#include "fastscat/dense.hpp"
#include "fastscat/far_engine.hpp"
#include "fastscat/gmres.hpp"
#include "fastscat/near.hpp"

namespace fastscat {

enum class SolverBackend { dgfa, ml, dense_oracle };

struct PipelineOptions {
    double box_edge = 0.0; // a, meters
    int n_d = 4;
    double svd_cutoff = 1e-8;
    SolverBackend backend = SolverBackend::dgfa;
    int workers = 1;
    int member_cache_min_count = 8;
};

/// Preprocessed scattering system: near matrix plus the three-stage far
/// pipeline (or the dense oracle as the gold path). The full product is
///   Z x = Z_near x - (tested far fields of x),
/// since the pipeline produces the tested scattered fields while the
/// matrix convention keeps Z I = V with V the tested incident field.
struct PreprocessPreload {
    UniformBoxModel model;
    BasisMapTable table;
};

class Pipeline {
  public:
    /// `preload`, when given, supplies the box model and mapping tables
    /// (from the run cache) instead of rebuilding them.
    Pipeline(const TriangleMesh& mesh, const Medium& medium, const PipelineOptions& options,
             PreprocessPreload* preload = nullptr);

    Eigen::VectorXcd mvm(const Eigen::VectorXcd& x);
    /// Tested far-zone fields S^F x through mapping/translation/inverse
    /// mapping (no near contribution, no sign flip).
    Eigen::VectorXcd far_tested(const Eigen::VectorXcd& x);

    const TriangleMesh& mesh() const { return mesh_; }
    const RwgBasis& basis() const { return basis_; }
    const BoxGrid& grid() const { return grid_; }
    const Medium& medium() const { return medium_; }
    const UniformBoxModel& box_model() const { return model_; }
    const BasisMapTable& map_table() const { return table_; }
    const NearMatrix& near() const { return near_; }
    FarEngine& engine() { return *engine_; }
    const DenseOracle& dense() const;
    const PipelineOptions& options() const { return options_; }

    void attach_models(const std::vector<CvfcnnModel>& models) {
        if (engine_) engine_->attach_models(models);
    }
    void set_workers(int workers) {
        options_.workers = workers;
        if (engine_) engine_->set_workers(workers);
    }

  private:
    TriangleMesh mesh_;
    RwgBasis basis_;
    Medium medium_;
    PipelineOptions options_;
    BoxGrid grid_;
    UniformBoxModel model_;
    BasisMapTable table_;
    NearMatrix near_;
    std::unique_ptr<FarEngine> engine_;
    std::unique_ptr<DenseOracle> dense_;
};

struct SolveOptions {
    GmresOptions gmres;
    std::vector<double> angles_deg; // E-plane cut
    Vec3 direction = Vec3(0, 0, 1);
    Vec3 polarization = Vec3(1, 0, 0);
    double amplitude = 1.0;
};

struct SolveResult {
    Eigen::VectorXcd coefficients;
    FarFieldPattern pattern;
    GmresResult gmres;
};

SolveResult solve_scattering(Pipeline& pipeline, const SolveOptions& options);

std::vector<double> default_eplane_grid(double step_deg = 1.0);

} // namespace fastscat
