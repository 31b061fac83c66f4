#pragma once

#include <random>
#include <string>

#include "fastscat/mapping.hpp"
#include "fastscat/translation.hpp"

namespace fastscat {

/// One-hidden-layer complex-valued fully connected network emulating the
/// translation matrix of one symmetry class. Activation is the Cartesian
/// ReLU (ReLU on real and imaginary parts independently). Inputs are
/// l-infinity normalized; the output is rescaled by the same norm, which
/// is exact for the linear operator the network approximates.
struct CvfcnnModel {
    Eigen::Vector3i class_vec;   // representative lattice vector
    double box_edge_lambda = 0.0;
    int dim = 0;    // 3 N_d
    int hidden = 0; // H

    Eigen::MatrixXcd w1; // hidden x dim
    Eigen::VectorXcd b1; // hidden
    Eigen::MatrixXcd w2; // dim x hidden
    Eigen::VectorXcd b2; // dim

    bool dims_consistent() const {
        return w1.rows() == hidden && w1.cols() == dim && b1.size() == hidden &&
               w2.rows() == dim && w2.cols() == hidden && b2.size() == dim;
    }
};

/// O = ||P||inf * net(P / ||P||inf); P = 0 short-circuits to 0.
Eigen::VectorXcd infer(const CvfcnnModel& model, const Eigen::VectorXcd& p);

/// Batched raw network pass (columns are already normalized inputs).
Eigen::MatrixXcd forward_batch(const CvfcnnModel& model, const Eigen::MatrixXcd& x);

/// True when 2 H < 3 N_d, i.e. the network multiply is strictly cheaper
/// than the direct translation product.
bool inference_cheaper_than_dgfa(int dim, int hidden);

void save_model(const CvfcnnModel& model, const std::string& path);
CvfcnnModel load_model(const std::string& path);

/// Input/target sample matrices (one column per sample). Targets are the
/// exact DGFA products of the raw (unnormalized) inputs.
struct SampleSet {
    Eigen::MatrixXcd inputs;
    Eigen::MatrixXcd targets;
};

/// Stage-1 data: i.i.d. uniform coefficients, real and imaginary parts
/// in [-1, 1]; targets G * input.
SampleSet generate_uniform_dataset(const Eigen::MatrixXcd& g, int count, std::mt19937_64& rng);

/// Stage-2 surface data: a box of edge `a` slides over a generator
/// sphere on a half-edge-step lattice; the RWG functions inside each
/// placement receive uniform [-1,1] coefficients and are mapped to
/// dipole coefficients. Placements with no functions are skipped.
struct SurfaceSampler {
    std::vector<Eigen::MatrixXcd> placement_maps; // pinv_a * B per placement
    int dim = 0;

    /// Every generator RWG covered by at least one placement.
    bool covers_all = false;
    int placements() const { return static_cast<int>(placement_maps.size()); }

    Eigen::VectorXcd draw(std::mt19937_64& rng, int placement) const;
};

SurfaceSampler build_surface_sampler(const TriangleMesh& sphere, const RwgBasis& basis,
                                     const UniformBoxModel& model, const Medium& medium);

SampleSet generate_surface_dataset(const SurfaceSampler& sampler, const Eigen::MatrixXcd& g,
                                   int count, std::mt19937_64& rng);

struct TrainStageConfig {
    int epoch_cap = 2000;
    double target = 1e-3;              // stop once validation e < target
    std::vector<int> batch_schedule = {256, 128}; // spread evenly over the cap
    int samples = 16384;
};

struct TrainConfig {
    int hidden = 50;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double lr_decay = 0.5;   // on validation plateau
    int lr_patience = 120;   // epochs
    double lr_min = 1e-5;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    TrainStageConfig stage1;
    TrainStageConfig stage2;
    std::uint64_t seed = 12345;
};

struct StageReport {
    int epochs = 0;
    double final_train_loss = 0.0;
    std::vector<double> val_loss_curve;
    double test_error_mean = 0.0; // relative l2, per-sample mean
    double test_error_std = 0.0;
    bool converged = false;
};

struct TrainingReport {
    StageReport stage1; // e_u metrics
    StageReport stage2; // e_sp metrics
    bool converged = false;
};

/// Two-stage training: uniform data first, surface data second, Adam
/// with mean-square error on the complex outputs. Deterministic given
/// the seed.
CvfcnnModel train_two_stage(const Eigen::MatrixXcd& g, const Eigen::Vector3i& class_vec,
                            double box_edge_lambda, const SurfaceSampler& sampler,
                            const TrainConfig& config, TrainingReport& report);

/// Mean/std of the per-sample relative l2 error of `model` on raw pairs.
void evaluate_model(const CvfcnnModel& model, const SampleSet& set, double& mean, double& stddev);

} // namespace fastscat
