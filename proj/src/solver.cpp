#include "fastscat/solver.hpp"

#include <stdexcept>

namespace fastscat {

Pipeline::Pipeline(const TriangleMesh& mesh, const Medium& medium,
                   const PipelineOptions& options, PreprocessPreload* preload)
    : mesh_(mesh), medium_(medium), options_(options) {
    if (options.box_edge <= 0.0) throw std::invalid_argument("Pipeline: box_edge must be > 0");
    basis_ = build_rwg(mesh_);
    grid_ = partition(mesh_, basis_, options.box_edge);

    if (options.backend == SolverBackend::dense_oracle) {
        dense_ = std::make_unique<DenseOracle>(mesh_, basis_, medium_);
        return;
    }

    if (preload && preload->model.n_d == options.n_d &&
        preload->table.forward.cols() == basis_.size()) {
        model_ = std::move(preload->model);
        table_ = std::move(preload->table);
    } else {
        model_ = build_box_model(options.box_edge, options.n_d, medium_, options.svd_cutoff);
        table_ = precompute_basis_maps(mesh_, basis_, grid_, model_, medium_);
    }
    near_ = assemble_near(mesh_, basis_, grid_, medium_);

    FarEngineOptions fopt;
    fopt.backend = options.backend == SolverBackend::ml ? FarBackend::ml : FarBackend::dgfa;
    fopt.workers = options.workers;
    fopt.member_cache_min_count = options.member_cache_min_count;
    engine_ = std::make_unique<FarEngine>(grid_, model_, medium_, fopt);
}

const DenseOracle& Pipeline::dense() const {
    if (!dense_) throw std::runtime_error("Pipeline: dense oracle not built for this backend");
    return *dense_;
}

Eigen::VectorXcd Pipeline::far_tested(const Eigen::VectorXcd& x) {
    if (!engine_) throw std::runtime_error("Pipeline: far engine not built for this backend");
    const DipoleCoefficients coeffs = map_forward(x, table_, grid_, model_);
    const std::vector<Eigen::VectorXcd> fields = engine_->run(coeffs);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(x.size());
    for (int b = 0; b < grid_.box_count(); ++b)
        map_inverse(fields[b], b, table_, grid_, model_, out);
    return out;
}

Eigen::VectorXcd Pipeline::mvm(const Eigen::VectorXcd& x) {
    if (options_.backend == SolverBackend::dense_oracle) return dense_->multiply(x);
    return near_.apply(x, grid_) - far_tested(x);
}

std::vector<double> default_eplane_grid(double step_deg) {
    std::vector<double> grid;
    for (double a = -180.0; a <= 180.0 + 1e-9; a += step_deg) grid.push_back(a);
    return grid;
}

SolveResult solve_scattering(Pipeline& pipeline, const SolveOptions& options) {
    const Eigen::VectorXcd v = plane_wave_excitation(
        pipeline.mesh(), pipeline.basis(), options.direction, options.polarization,
        pipeline.medium(), options.amplitude);

    SolveResult result;
    result.gmres = gmres_solve([&](const Eigen::VectorXcd& x) { return pipeline.mvm(x); }, v,
                               options.gmres);
    result.coefficients = result.gmres.solution;
    const auto& angles =
        options.angles_deg.empty() ? default_eplane_grid() : options.angles_deg;
    result.pattern =
        far_field(pipeline.mesh(), pipeline.basis(), result.coefficients, pipeline.medium(),
                  angles);
    return result;
}

} // namespace fastscat
