#include "fastscat/cvfcnn.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace fastscat {

namespace {

constexpr char kMagic[8] = {'C', 'V', 'F', 'C', 'N', 'N', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

double linf_norm(const Eigen::VectorXcd& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

Eigen::MatrixXcd crelu(const Eigen::MatrixXcd& z) {
    Eigen::MatrixXcd out(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j)
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            out(i, j) = cd(std::max(0.0, z(i, j).real()), std::max(0.0, z(i, j).imag()));
    return out;
}

void write_raw(std::ofstream& out, const void* data, size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

void read_raw(std::ifstream& in, void* data, size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("load_model: truncated file");
}

// Row-major complex array as little-endian (re, im) float64 pairs.
void write_complex(std::ofstream& out, const Eigen::MatrixXcd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double re = m(r, c).real(), im = m(r, c).imag();
            write_raw(out, &re, sizeof(double));
            write_raw(out, &im, sizeof(double));
        }
}

void read_complex(std::ifstream& in, Eigen::MatrixXcd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double re, im;
            read_raw(in, &re, sizeof(double));
            read_raw(in, &im, sizeof(double));
            m(r, c) = cd(re, im);
        }
}

} // namespace

Eigen::MatrixXcd forward_batch(const CvfcnnModel& model, const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd z1 = model.w1 * x;
    z1.colwise() += model.b1;
    Eigen::MatrixXcd o = model.w2 * crelu(z1);
    o.colwise() += model.b2;
    return o;
}

Eigen::VectorXcd infer(const CvfcnnModel& model, const Eigen::VectorXcd& p) {
    if (p.size() != model.dim) throw std::invalid_argument("infer: input dimension mismatch");
    const double s = linf_norm(p);
    if (s == 0.0) return Eigen::VectorXcd::Zero(model.dim);
    return s * forward_batch(model, p / s);
}

bool inference_cheaper_than_dgfa(int dim, int hidden) { return 2 * hidden < dim; }

void save_model(const CvfcnnModel& model, const std::string& path) {
    if (!model.dims_consistent()) throw std::invalid_argument("save_model: inconsistent dims");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    write_raw(out, kMagic, sizeof(kMagic));
    write_raw(out, &kFormatVersion, sizeof(kFormatVersion));
    write_raw(out, &model.box_edge_lambda, sizeof(double));
    const std::int32_t cls[3] = {model.class_vec.x(), model.class_vec.y(), model.class_vec.z()};
    write_raw(out, cls, sizeof(cls));
    const std::uint32_t dims[2] = {static_cast<std::uint32_t>(model.dim),
                                   static_cast<std::uint32_t>(model.hidden)};
    write_raw(out, dims, sizeof(dims));
    write_complex(out, model.w1);
    write_complex(out, model.b1);
    write_complex(out, model.w2);
    write_complex(out, model.b2);
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

CvfcnnModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    char magic[8];
    read_raw(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    std::uint32_t version;
    read_raw(in, &version, sizeof(version));
    if (version != kFormatVersion)
        throw std::runtime_error("load_model: unsupported format version in " + path);

    CvfcnnModel model;
    read_raw(in, &model.box_edge_lambda, sizeof(double));
    std::int32_t cls[3];
    read_raw(in, cls, sizeof(cls));
    model.class_vec = Eigen::Vector3i(cls[0], cls[1], cls[2]);
    std::uint32_t dims[2];
    read_raw(in, dims, sizeof(dims));
    model.dim = static_cast<int>(dims[0]);
    model.hidden = static_cast<int>(dims[1]);
    if (model.dim <= 0 || model.hidden <= 0 || model.dim > 1 << 20 || model.hidden > 1 << 20)
        throw std::runtime_error("load_model: implausible dims in " + path);
    model.w1.resize(model.hidden, model.dim);
    model.b1.resize(model.hidden);
    model.w2.resize(model.dim, model.hidden);
    model.b2.resize(model.dim);
    read_complex(in, model.w1);
    Eigen::MatrixXcd b1(model.hidden, 1), b2(model.dim, 1);
    read_complex(in, b1);
    read_complex(in, model.w2);
    read_complex(in, b2);
    model.b1 = b1.col(0);
    model.b2 = b2.col(0);
    return model;
}

SampleSet generate_uniform_dataset(const Eigen::MatrixXcd& g, int count, std::mt19937_64& rng) {
    const int dim = static_cast<int>(g.cols());
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SampleSet set;
    set.inputs.resize(dim, count);
    for (int c = 0; c < count; ++c)
        for (int r = 0; r < dim; ++r) {
            const double re = dist(rng);
            const double im = dist(rng);
            set.inputs(r, c) = cd(re, im);
        }
    set.targets = g * set.inputs;
    return set;
}

Eigen::VectorXcd SurfaceSampler::draw(std::mt19937_64& rng, int placement) const {
    const auto& map = placement_maps[placement];
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXcd coeffs(map.cols());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        const double re = dist(rng);
        const double im = dist(rng);
        coeffs[i] = cd(re, im);
    }
    return map * coeffs;
}

SurfaceSampler build_surface_sampler(const TriangleMesh& sphere, const RwgBasis& basis,
                                     const UniformBoxModel& model, const Medium& medium) {
    const double a = model.box_edge;
    const double step = 0.5 * a;

    std::vector<Vec3> midpoints(basis.size());
    for (int k = 0; k < basis.size(); ++k) midpoints[k] = basis.edge_midpoint(sphere, k);

    Vec3 lo, hi;
    sphere.bounding_box(lo, hi);
    const Eigen::Vector3i cell_lo = ((lo.array() - 0.5 * a) / step).floor().cast<int>();
    const Eigen::Vector3i cell_hi = ((hi.array() + 0.5 * a) / step).ceil().cast<int>();

    SurfaceSampler sampler;
    sampler.dim = 3 * model.num_dipoles;
    std::vector<char> covered(basis.size(), 0);
    for (int cz = cell_lo.z(); cz <= cell_hi.z(); ++cz) {
        for (int cy = cell_lo.y(); cy <= cell_hi.y(); ++cy) {
            for (int cx = cell_lo.x(); cx <= cell_hi.x(); ++cx) {
                const Vec3 center(step * cx, step * cy, step * cz);
                std::vector<int> inside;
                for (int k = 0; k < basis.size(); ++k) {
                    const Vec3 d = (midpoints[k] - center).cwiseAbs();
                    if (d.maxCoeff() <= 0.5 * a) inside.push_back(k);
                }
                if (inside.empty()) continue; // empty placement skipped
                Eigen::MatrixXcd b(3 * model.num_samples, inside.size());
                for (size_t c = 0; c < inside.size(); ++c)
                    b.col(c) = sample_basis_fields(sphere, basis, inside[c], center,
                                                   model.sphere, medium);
                sampler.placement_maps.push_back(model.pinv_a * b);
                for (int k : inside) covered[k] = 1;
            }
        }
    }
    sampler.covers_all =
        std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
    return sampler;
}

SampleSet generate_surface_dataset(const SurfaceSampler& sampler, const Eigen::MatrixXcd& g,
                                   int count, std::mt19937_64& rng) {
    if (sampler.placements() == 0)
        throw std::runtime_error("generate_surface_dataset: sampler has no placements");
    SampleSet set;
    set.inputs.resize(sampler.dim, count);
    int col = 0;
    int placement = 0;
    while (col < count) {
        Eigen::VectorXcd p = sampler.draw(rng, placement);
        placement = (placement + 1) % sampler.placements();
        if (linf_norm(p) == 0.0) continue; // zero input excluded
        set.inputs.col(col++) = p;
    }
    set.targets = g * set.inputs;
    return set;
}

namespace {

/// Adam over the real scalars backing the complex parameter matrices.
class AdamState {
  public:
    explicit AdamState(const TrainConfig& cfg)
        : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.adam_eps) {}

    void add_param(cd* data, size_t count) {
        params_.emplace_back(reinterpret_cast<double*>(data), 2 * count);
        m_.resize(m_.size() + 2 * count, 0.0);
        v_.resize(v_.size() + 2 * count, 0.0);
    }

    /// Gradients in registration order; each must match its parameter size.
    void step(const std::vector<const cd*>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        size_t idx = 0;
        for (size_t pi = 0; pi < params_.size(); ++pi) {
            double* p = params_[pi].first;
            const double* g = reinterpret_cast<const double*>(grads[pi]);
            const size_t n = params_[pi].second;
            for (size_t i = 0; i < n; ++i, ++idx) {
                m_[idx] = beta1_ * m_[idx] + (1.0 - beta1_) * g[i];
                v_[idx] = beta2_ * v_[idx] + (1.0 - beta2_) * g[i] * g[i];
                const double mhat = m_[idx] / bc1;
                const double vhat = v_[idx] / bc2;
                p[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    double lr() const { return lr_; }
    void set_lr(double lr) { lr_ = lr; }

  private:
    std::vector<std::pair<double*, size_t>> params_;
    std::vector<double> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
};

struct NormalizedSet {
    Eigen::MatrixXcd x; // inputs / per-sample linf
    Eigen::MatrixXcd t; // targets / (per-sample linf * target_scale)
};

NormalizedSet normalize_set(const SampleSet& raw, int lo, int hi, double target_scale) {
    NormalizedSet out;
    const int n = hi - lo;
    out.x.resize(raw.inputs.rows(), n);
    out.t.resize(raw.targets.rows(), n);
    for (int c = 0; c < n; ++c) {
        const double s = linf_norm(raw.inputs.col(lo + c));
        out.x.col(c) = raw.inputs.col(lo + c) / s;
        out.t.col(c) = raw.targets.col(lo + c) / (s * target_scale);
    }
    return out;
}

double mse_loss(const Eigen::MatrixXcd& out, const Eigen::MatrixXcd& target) {
    return (out - target).squaredNorm() / static_cast<double>(out.cols());
}

// Mean relative l2 error of the scaled network on a normalized set.
double relative_error(const CvfcnnModel& model, const NormalizedSet& set) {
    const Eigen::MatrixXcd out = forward_batch(model, set.x);
    double sum = 0.0;
    for (Eigen::Index c = 0; c < set.x.cols(); ++c)
        sum += (out.col(c) - set.t.col(c)).norm() / set.t.col(c).norm();
    return sum / static_cast<double>(set.x.cols());
}

struct StageData {
    NormalizedSet train, val;
};

void run_stage(CvfcnnModel& model, AdamState& adam, const StageData& data,
               const TrainStageConfig& stage, const TrainConfig& cfg, std::mt19937_64& rng,
               StageReport& report) {
    const int n_train = static_cast<int>(data.train.x.cols());
    std::vector<int> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    double train_loss = 0.0;

    const int schedule_len = static_cast<int>(stage.batch_schedule.size());
    const int epochs_per_batch = std::max(1, stage.epoch_cap / std::max(1, schedule_len));

    Eigen::MatrixXcd g_w1, g_w2;
    Eigen::VectorXcd g_b1, g_b2;
    int epoch = 0;
    for (; epoch < stage.epoch_cap; ++epoch) {
        const int batch =
            stage.batch_schedule[std::min(schedule_len - 1, epoch / epochs_per_batch)];
        std::shuffle(order.begin(), order.end(), rng);

        train_loss = 0.0;
        int batches = 0;
        for (int start = 0; start < n_train; start += batch) {
            const int b = std::min(batch, n_train - start);
            Eigen::MatrixXcd x(data.train.x.rows(), b), t(data.train.t.rows(), b);
            for (int i = 0; i < b; ++i) {
                x.col(i) = data.train.x.col(order[start + i]);
                t.col(i) = data.train.t.col(order[start + i]);
            }

            // Forward.
            Eigen::MatrixXcd z1 = model.w1 * x;
            z1.colwise() += model.b1;
            const Eigen::MatrixXcd h = crelu(z1);
            Eigen::MatrixXcd o = model.w2 * h;
            o.colwise() += model.b2;

            train_loss += mse_loss(o, t);
            ++batches;

            // Backward; gradient convention d/dRe + j d/dIm.
            const Eigen::MatrixXcd delta = (2.0 / b) * (o - t);
            g_w2 = delta * h.adjoint();
            g_b2 = delta.rowwise().sum();
            Eigen::MatrixXcd gh = model.w2.adjoint() * delta;
            for (Eigen::Index j = 0; j < gh.cols(); ++j)
                for (Eigen::Index i = 0; i < gh.rows(); ++i) {
                    const double gr = z1(i, j).real() > 0.0 ? gh(i, j).real() : 0.0;
                    const double gi = z1(i, j).imag() > 0.0 ? gh(i, j).imag() : 0.0;
                    gh(i, j) = cd(gr, gi);
                }
            g_w1 = gh * x.adjoint();
            g_b1 = gh.rowwise().sum();
            adam.step({g_w1.data(), g_b1.data(), g_w2.data(), g_b2.data()});
        }
        train_loss /= std::max(1, batches);

        const double val_err = relative_error(model, data.val);
        report.val_loss_curve.push_back(val_err);
        if (val_err < best_val * (1.0 - 1e-4)) {
            best_val = val_err;
            since_best = 0;
        } else if (++since_best >= cfg.lr_patience) {
            adam.set_lr(std::max(cfg.lr_min, adam.lr() * cfg.lr_decay));
            since_best = 0;
        }
        // Stop below the target with some margin: the held-out test
        // metric sits slightly above the validation estimate.
        if (val_err < 0.7 * stage.target) {
            ++epoch;
            break;
        }
    }
    report.epochs = epoch;
    report.final_train_loss = train_loss;
    report.converged =
        !report.val_loss_curve.empty() && report.val_loss_curve.back() < stage.target;
}

} // namespace

void evaluate_model(const CvfcnnModel& model, const SampleSet& set, double& mean,
                    double& stddev) {
    const int n = static_cast<int>(set.inputs.cols());
    std::vector<double> errs(n);
    for (int c = 0; c < n; ++c) {
        const Eigen::VectorXcd out = infer(model, set.inputs.col(c));
        errs[c] = (out - set.targets.col(c)).norm() / set.targets.col(c).norm();
    }
    mean = std::accumulate(errs.begin(), errs.end(), 0.0) / n;
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    stddev = std::sqrt(var / n);
}

CvfcnnModel train_two_stage(const Eigen::MatrixXcd& g, const Eigen::Vector3i& class_vec,
                            double box_edge_lambda, const SurfaceSampler& sampler,
                            const TrainConfig& config, TrainingReport& report) {
    const int dim = static_cast<int>(g.cols());
    if (!inference_cheaper_than_dgfa(dim, config.hidden))
        std::cerr << "[cvfcnn] note: 2H = " << 2 * config.hidden << " >= 3N_d = " << dim
                  << "; network multiply is not cheaper than the direct product\n";

    std::mt19937_64 rng(config.seed);

    CvfcnnModel model;
    model.class_vec = class_vec;
    model.box_edge_lambda = box_edge_lambda;
    model.dim = dim;
    model.hidden = config.hidden;
    // Complex Glorot-style init: independent re/im, complex entry
    // variance 1/(fan_in + fan_out).
    auto init = [&](Eigen::MatrixXcd& w, int fan_in, int fan_out) {
        std::normal_distribution<double> dist(0.0, std::sqrt(0.5 / (fan_in + fan_out)));
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                const double re = dist(rng);
                const double im = dist(rng);
                w(i, j) = cd(re, im);
            }
    };
    model.w1.resize(config.hidden, dim);
    model.w2.resize(dim, config.hidden);
    init(model.w1, dim, config.hidden);
    init(model.w2, config.hidden, dim);
    model.b1 = Eigen::VectorXcd::Zero(config.hidden);
    model.b2 = Eigen::VectorXcd::Zero(dim);

    // Targets are trained against a fixed per-class scale that is folded
    // back into the output layer on export.
    const double target_scale = g.norm() / std::sqrt(static_cast<double>(dim));

    const auto split = [&](int total) {
        const int n_test = std::max(1, static_cast<int>(total * config.test_fraction));
        const int n_val = std::max(1, static_cast<int>(total * config.val_fraction));
        return std::pair<int, int>(total - n_val - n_test, n_val);
    };

    AdamState adam(config);
    adam.add_param(model.w1.data(), model.w1.size());
    adam.add_param(model.b1.data(), model.b1.size());
    adam.add_param(model.w2.data(), model.w2.size());
    adam.add_param(model.b2.data(), model.b2.size());

    // Stage 1: uniform data.
    SampleSet uniform = generate_uniform_dataset(g, config.stage1.samples, rng);
    auto [u_train, u_val] = split(config.stage1.samples);
    StageData d1;
    d1.train = normalize_set(uniform, 0, u_train, target_scale);
    d1.val = normalize_set(uniform, u_train, u_train + u_val, target_scale);
    run_stage(model, adam, d1, config.stage1, config, rng, report.stage1);

    // Stage 2: surface data, continuing from the stage-1 weights.
    SampleSet surface = generate_surface_dataset(sampler, g, config.stage2.samples, rng);
    auto [s_train, s_val] = split(config.stage2.samples);
    StageData d2;
    d2.train = normalize_set(surface, 0, s_train, target_scale);
    d2.val = normalize_set(surface, s_train, s_train + s_val, target_scale);
    adam.set_lr(config.learning_rate);
    run_stage(model, adam, d2, config.stage2, config, rng, report.stage2);

    // Fold the target scale into the output layer.
    model.w2 *= target_scale;
    model.b2 *= target_scale;

    // Held-out test metrics on raw pairs through the full contract.
    SampleSet u_test, s_test;
    u_test.inputs = uniform.inputs.rightCols(config.stage1.samples - u_train - u_val);
    u_test.targets = uniform.targets.rightCols(config.stage1.samples - u_train - u_val);
    s_test.inputs = surface.inputs.rightCols(config.stage2.samples - s_train - s_val);
    s_test.targets = surface.targets.rightCols(config.stage2.samples - s_train - s_val);
    evaluate_model(model, u_test, report.stage1.test_error_mean, report.stage1.test_error_std);
    evaluate_model(model, s_test, report.stage2.test_error_mean, report.stage2.test_error_std);

    report.converged = report.stage1.converged && report.stage2.converged;
    return model;
}

} // namespace fastscat
