#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fastscat/solver.hpp"

namespace fastscat {

/// Flat key-value run configuration. Text format: one `key = value` per
/// line, `#` comments; CLI `--set key=value` overrides win. Defaults
/// follow the solver protocol (tolerance 1e-3, restart 100, max 1000
/// iterations, n_d = 4).
struct RunConfig {
    // Geometry: either a mesh file or the built-in sphere generator.
    std::string mesh_path;
    double sphere_radius_m = 0.0; // used when mesh_path is empty
    int sphere_freq = 10;

    double frequency_hz = 1e9;
    double box_edge_lambda = 0.125; // box_edge_m wins when > 0
    double box_edge_m = 0.0;

    int n_d = 4;      // 0: derive from digits via select_dipole_count
    int digits = 3;
    double svd_cutoff = 1e-8;
    double mapping_tolerance = 1e-2; // diagnostic sphere residual

    std::string backend = "dgfa"; // dgfa | ml | dense
    double tolerance = 1e-3;
    int restart = 100;
    int max_iterations = 1000;
    int workers = 1;
    int member_cache_min_count = 8;

    std::string model_dir = "models";
    int hidden = 50;
    std::string train_classes = "0,0,2;0,2,2;3,3,3"; // or "occupied"
    int stage1_samples = 8192;
    int stage2_samples = 8192;
    int stage1_epoch_cap = 2000;
    int stage2_epoch_cap = 2000;
    double stage1_target = 1e-3;
    double stage2_target = 1e-3;
    std::string batch_schedule1 = "256,128";
    std::string batch_schedule2 = "256,128";
    double learning_rate = 1e-3;
    bool allow_partial = false;

    double pattern_step_deg = 1.0;
    double direction[3] = {0.0, 0.0, 1.0};
    double polarization[3] = {1.0, 0.0, 0.0};

    std::string output_dir = "out";
    std::string cache_dir = "cache";
    bool cache_enabled = true;
    std::uint64_t seed = 12345;

    // --- access ---
    static RunConfig from_file(const std::string& path,
                               const std::vector<std::string>& overrides = {});
    static RunConfig from_overrides(const std::vector<std::string>& overrides);
    void apply(const std::string& key, const std::string& value);
    void validate() const;
    static const std::vector<std::string>& known_keys();

    double wavelength() const;
    double box_edge() const; // meters
    Medium medium() const { return Medium::free_space(frequency_hz); }
    SolverBackend solver_backend() const;
    PipelineOptions pipeline_options() const;
    GmresOptions gmres_options() const;
    TrainConfig train_config() const;
    std::vector<Eigen::Vector3i> parse_train_classes() const; // empty => occupied

    TriangleMesh make_mesh() const;

    /// Canonical `key = value` dump (sorted keys) used for hashing and
    /// report headers.
    std::string canonical_text() const;
    std::string hash() const;
};

std::vector<int> parse_int_list(const std::string& text, char sep = ',');

} // namespace fastscat
