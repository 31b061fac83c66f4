#include "fastscat/verify.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <thread>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "fastscat/cache.hpp"
#include "fastscat/report.hpp"
#include "fastscat/solver.hpp"

namespace fastscat {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

std::string class_file_name(const Eigen::Vector3i& c) {
    return "cvfcnn_" + std::to_string(c.x()) + "_" + std::to_string(c.y()) + "_" +
           std::to_string(c.z()) + ".bin";
}

/// Desk-scale setup shared by the criteria; everything derives from the
/// 1 GHz free-space medium and a 1-wavelength-diameter PEC sphere meshed
/// at icosphere frequency 10 (3000 RWG functions).
class DeskContext {
  public:
    explicit DeskContext(const std::string& work_dir, bool verbose)
        : work_dir_(work_dir), verbose_(verbose) {
        std::filesystem::create_directories(work_dir_);
        medium_ = Medium::free_space(1e9);
        radius_ = 0.5 * medium_.wavelength;
        mesh_ = make_icosphere(radius_, 10);
        angles_ = default_eplane_grid(1.0);
    }

    const Medium& medium() const { return medium_; }
    double radius() const { return radius_; }
    const TriangleMesh& mesh() const { return mesh_; }
    const std::vector<double>& angles() const { return angles_; }
    const std::string& work_dir() const { return work_dir_; }
    bool verbose() const { return verbose_; }

    void note(const std::string& msg) const {
        if (verbose_) std::cout << "  ... " << msg << std::endl;
    }

    Pipeline& dgfa4() {
        if (!dgfa4_) {
            note("building n_d=4 DGFA pipeline (preprocessing)");
            PipelineOptions opt;
            opt.box_edge = medium_.wavelength / 8.0;
            opt.n_d = 4;
            opt.backend = SolverBackend::dgfa;
            dgfa4_ = std::make_unique<Pipeline>(mesh_, medium_, opt);
        }
        return *dgfa4_;
    }

    const Eigen::VectorXcd& excitation() {
        if (excitation_.size() == 0)
            excitation_ = plane_wave_excitation(mesh_, dgfa4().basis(), Vec3(0, 0, 1),
                                                Vec3(1, 0, 0), medium_);
        return excitation_;
    }

    const SolveResult& desk_solve() {
        if (!desk_solved_) {
            note("GMRES solve with the DGFA backend");
            SolveOptions sopt;
            sopt.angles_deg = angles_;
            const auto start = clock_type::now();
            desk_solve_ = solve_scattering(dgfa4(), sopt);
            desk_solve_seconds_ = elapsed(start);
            desk_solved_ = true;
        }
        return desk_solve_;
    }
    double desk_solve_seconds() {
        desk_solve();
        return desk_solve_seconds_;
    }

    DenseOracle& dense_hybrid() {
        if (!dense_) {
            note("assembling the dense oracle");
            dense_ = std::make_unique<DenseOracle>(mesh_, dgfa4().basis(), dgfa4().grid(),
                                                   medium_);
        }
        return *dense_;
    }

    const FarFieldPattern& dense_pattern() {
        if (dense_pattern_.values.empty()) {
            note("dense factorized solve");
            const Eigen::VectorXcd a = dense_hybrid().solve(excitation());
            dense_pattern_ = far_field(mesh_, dgfa4().basis(), a, medium_, angles_);
        }
        return dense_pattern_;
    }

    int dense_iterations() {
        if (dense_iterations_ < 0) {
            note("GMRES on the dense operator (iteration parity reference)");
            GmresOptions gopt;
            const GmresResult r = gmres_solve(
                [&](const Eigen::VectorXcd& x) { return dense_hybrid().multiply(x); },
                excitation(), gopt);
            dense_iterations_ = r.iterations;
        }
        return dense_iterations_;
    }

    const FarFieldPattern& mie() {
        if (mie_.values.empty()) mie_ = mie_far_field(radius_, medium_, angles_);
        return mie_;
    }

    /// n_d = 2 box model and surface sampler for the learned backend.
    const UniformBoxModel& model2() {
        if (model2_.n_d == 0) model2_ = build_box_model(medium_.wavelength / 8.0, 2, medium_);
        return model2_;
    }
    const SurfaceSampler& sampler2() {
        if (sampler2_.placements() == 0) {
            note("building the surface dataset sampler (n_d=2)");
            basis2_ = build_rwg(mesh_);
            sampler2_ = build_surface_sampler(mesh_, basis2_, model2(), medium_);
        }
        return sampler2_;
    }

    TrainConfig desk_train_config() const {
        TrainConfig cfg;
        cfg.hidden = 50;
        cfg.stage1.samples = 8192;
        cfg.stage2.samples = 8192;
        cfg.stage1.epoch_cap = 2000;
        cfg.stage2.epoch_cap = 2000;
        cfg.stage1.target = 1e-3;
        cfg.stage2.target = 1e-3;
        cfg.stage1.batch_schedule = {256, 128};
        cfg.stage2.batch_schedule = {256, 128};
        cfg.seed = 12345;
        return cfg;
    }

    /// Trains (or loads from the model cache) one n_d = 2 class.
    CvfcnnModel desk_model(const Eigen::Vector3i& cls, TrainingReport* report_out = nullptr) {
        const std::string dir = work_dir_ + "/models_desk_nd2";
        std::filesystem::create_directories(dir);
        const std::string path = dir + "/" + class_file_name(cls);
        if (std::filesystem::exists(path) && !report_out) {
            CvfcnnModel m = load_model(path);
            if (m.dim == 3 * model2().num_dipoles) return m;
        }
        const Eigen::MatrixXcd g = build_translation_matrix(cls, model2(), medium_);
        TrainingReport report;
        CvfcnnModel m = train_two_stage(g, cls, 0.125, sampler2(), desk_train_config(), report);
        save_model(m, path);
        if (report_out) *report_out = report;
        return m;
    }

  private:
    std::string work_dir_;
    bool verbose_;
    Medium medium_;
    double radius_ = 0.0;
    TriangleMesh mesh_;
    std::vector<double> angles_;

    std::unique_ptr<Pipeline> dgfa4_;
    Eigen::VectorXcd excitation_;
    SolveResult desk_solve_;
    double desk_solve_seconds_ = 0.0;
    bool desk_solved_ = false;
    std::unique_ptr<DenseOracle> dense_;
    FarFieldPattern dense_pattern_;
    int dense_iterations_ = -1;
    FarFieldPattern mie_;

    UniformBoxModel model2_;
    RwgBasis basis2_;
    SurfaceSampler sampler2_;
};

CriterionResult criterion_1(DeskContext& ctx) {
    CriterionResult r{1, "Mie agreement, DGFA backend (desk sphere)"};
    const auto start = clock_type::now();
    const double ours = pattern_rel_error(ctx.desk_solve().pattern, ctx.mie());
    const double floor_err = pattern_rel_error(ctx.dense_pattern(), ctx.mie());
    const double solve_s = ctx.desk_solve_seconds();
    const bool in_budget = solve_s <= 900.0;
    r.passed = ours <= 1.5 * floor_err && ours <= 0.05 && in_budget;
    r.detail = "dgfa_vs_mie=" + fmt(ours) + " dense_vs_mie=" + fmt(floor_err) + " ratio=" +
               fmt(ours / floor_err) + " (<=1.5), abs<=0.05, solve=" + fmt(solve_s) +
               "s (<=900)";
    r.seconds = elapsed(start);
    return r;
}

CriterionResult criterion_2(DeskContext& ctx) {
    CriterionResult r{2, "full MVM vs dense oracle (20 random vectors)"};
    const auto start = clock_type::now();
    Pipeline& pipe = ctx.dgfa4();
    DenseOracle& dense = ctx.dense_hybrid();
    std::mt19937_64 rng(20602);
    std::normal_distribution<double> g;
    const int n = pipe.basis().size();
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXcd x(n);
        for (int i = 0; i < n; ++i) x[i] = cd(g(rng), g(rng));
        const Eigen::VectorXcd y1 = pipe.mvm(x);
        const Eigen::VectorXcd y2 = dense.multiply(x);
        worst = std::max(worst, (y1 - y2).norm() / y2.norm());
    }
    r.seconds = elapsed(start);
    r.passed = worst <= 5e-3 && r.seconds <= 300.0;
    r.detail = "worst_rel_l2=" + fmt(worst) + " (<=5e-3)";
    return r;
}

CriterionResult criterion_3(DeskContext& ctx) {
    CriterionResult r{3, "symmetry dedup: 316 vectors, 16 classes, exact transforms"};
    const auto start = clock_type::now();

    // Full occupancy with components in [-3, 3]: a 4^3 lattice of boxes.
    BoxGrid grid;
    grid.child_edge = ctx.medium().wavelength / 8.0;
    grid.level = 2;
    grid.boxes_per_axis = 4;
    grid.origin = Vec3::Zero();
    for (int z = 0; z < 4; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                BoxGrid::Box box;
                box.coords = Eigen::Vector3i(x, y, z);
                grid.boxes.push_back(box);
            }
    const FarInteractions far = classify_far_vectors(grid);

    std::set<std::array<int, 3>> distinct;
    for (const auto& cls : far.classes)
        for (const auto& m : cls.members) distinct.insert({m.vec.x(), m.vec.y(), m.vec.z()});

    const UniformBoxModel model = build_box_model(grid.child_edge, 4, ctx.medium());
    double worst = 0.0;
    for (const auto& cls : far.classes) {
        const Eigen::MatrixXcd g_rep =
            build_translation_matrix(cls.representative, model, ctx.medium());
        for (const auto& member : cls.members) {
            const Eigen::MatrixXcd direct =
                build_translation_matrix(member.vec, model, ctx.medium());
            const Eigen::MatrixXcd transformed = transform_to_member(g_rep, member.sym, model);
            worst = std::max(worst, (transformed - direct).norm() / direct.norm());
        }
    }
    r.seconds = elapsed(start);
    r.passed = distinct.size() == 316 && far.classes.size() == 16 && worst <= 1e-12 &&
               r.seconds <= 60.0;
    r.detail = "far_vectors=" + std::to_string(distinct.size()) + " (=316) classes=" +
               std::to_string(far.classes.size()) + " (=16) worst_transform_err=" + fmt(worst) +
               " (<=1e-12)";
    return r;
}

CriterionResult criterion_4(DeskContext& ctx) {
    CriterionResult r{4, "learned translation accuracy (n_d=2, H=50, three classes)"};
    const auto start = clock_type::now();
    const std::vector<Eigen::Vector3i> classes = {{0, 0, 2}, {0, 2, 2}, {3, 3, 3}};
    bool strict = true, degraded = true, budget = true;
    std::string detail;
    for (const auto& cls : classes) {
        const auto cls_start = clock_type::now();
        TrainingReport report;
        ctx.desk_model(cls, &report);
        const double cls_seconds = elapsed(cls_start);
        budget = budget && cls_seconds <= 1800.0;
        const double e_sp = report.stage2.test_error_mean;
        strict = strict && e_sp < 1e-3;
        degraded = degraded && e_sp < 5e-3;
        detail += "[" + std::to_string(cls.x()) + std::to_string(cls.y()) +
                  std::to_string(cls.z()) + "] e_sp=" + fmt(e_sp) + " (" +
                  std::to_string(report.stage1.epochs) + "+" +
                  std::to_string(report.stage2.epochs) + " epochs, " + fmt(cls_seconds) +
                  "s) ";
    }
    r.seconds = elapsed(start);
    r.passed = (strict || degraded) && budget;
    r.detail = detail + (strict ? "all < 1e-3" : (degraded ? "DEGRADED: all < 5e-3" : "miss"));
    return r;
}

CriterionResult criterion_5(DeskContext& ctx) {
    CriterionResult r{5, "ML-backend end-to-end (n_d=2 desk models)"};
    const auto start = clock_type::now();

    // DGFA reference at the same reduced dimension.
    PipelineOptions opt;
    opt.box_edge = ctx.medium().wavelength / 8.0;
    opt.n_d = 2;
    opt.backend = SolverBackend::dgfa;
    ctx.note("n_d=2 DGFA reference solve");
    Pipeline ref(ctx.mesh(), ctx.medium(), opt);
    SolveOptions sopt;
    sopt.angles_deg = ctx.angles();
    const SolveResult ref_res = solve_scattering(ref, sopt);
    const double e_dgfa = pattern_rel_error(ref_res.pattern, ctx.mie());

    // Train or load a model for every class occurring on the desk grid.
    std::vector<CvfcnnModel> models;
    const auto& classes = ref.engine().interactions().classes;
    ctx.note("training/loading " + std::to_string(classes.size()) + " class networks");
    for (const auto& cls : classes) models.push_back(ctx.desk_model(cls.representative));
    const double train_s = elapsed(start);

    opt.backend = SolverBackend::ml;
    Pipeline ml(ctx.mesh(), ctx.medium(), opt);
    ml.attach_models(models);
    ctx.note("n_d=2 ML-backend solve");
    const auto solve_start = clock_type::now();
    const SolveResult ml_res = solve_scattering(ml, sopt);
    const double solve_s = elapsed(solve_start);
    const double e_ml = pattern_rel_error(ml_res.pattern, ctx.mie());

    r.seconds = elapsed(start);
    r.passed = e_ml <= 2.0 * e_dgfa && solve_s <= 900.0;
    r.detail = "ml_vs_mie=" + fmt(e_ml) + " dgfa_vs_mie=" + fmt(e_dgfa) + " ratio=" +
               fmt(e_ml / e_dgfa) + " (<=2), classes=" + std::to_string(classes.size()) +
               ", prep=" + fmt(train_s) + "s solve=" + fmt(solve_s) + "s";
    return r;
}

CriterionResult criterion_6(DeskContext& ctx) {
    CriterionResult r{6, "low-frequency resilience (D = lambda/64, a = lambda/256)"};
    const auto start = clock_type::now();
    const Medium med = Medium::free_space(1e9 / 64.0);
    PipelineOptions opt;
    opt.box_edge = med.wavelength / 256.0;
    opt.n_d = 4;
    opt.backend = SolverBackend::dgfa;
    ctx.note("low-frequency preprocessing and solve");
    Pipeline pipe(ctx.mesh(), med, opt);
    SolveOptions sopt;
    sopt.angles_deg = ctx.angles();
    const SolveResult res = solve_scattering(pipe, sopt);

    ctx.note("low-frequency dense oracle");
    DenseOracle dense(ctx.mesh(), pipe.basis(), pipe.grid(), med);
    const Eigen::VectorXcd v =
        plane_wave_excitation(ctx.mesh(), pipe.basis(), Vec3(0, 0, 1), Vec3(1, 0, 0), med);
    const Eigen::VectorXcd a_dense = dense.solve(v);
    const FarFieldPattern dense_pat =
        far_field(ctx.mesh(), pipe.basis(), a_dense, med, ctx.angles());

    const FarFieldPattern mie = mie_far_field(ctx.radius(), med, ctx.angles());
    const double ours = pattern_rel_error(res.pattern, mie);
    const double floor_err = pattern_rel_error(dense_pat, mie);
    r.seconds = elapsed(start);
    r.passed = ours <= 1.5 * floor_err && r.seconds <= 900.0;
    r.detail = "dgfa_vs_mie=" + fmt(ours) + " dense_vs_mie=" + fmt(floor_err) + " ratio=" +
               fmt(ours / floor_err) + " (<=1.5), L=" + std::to_string(pipe.grid().level) +
               (res.gmres.converged ? "" : ", gmres hit the iteration cap (flagged)");
    return r;
}

CriterionResult criterion_7(DeskContext& ctx) {
    CriterionResult r{7, "parallel scaling of the far MVM (workers 1,2,4)"};
    const auto start = clock_type::now();
    Pipeline& pipe = ctx.dgfa4();

    std::mt19937_64 rng(707);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(pipe.basis().size());
    for (int i = 0; i < x.size(); ++i) x[i] = cd(g(rng), g(rng));
    const DipoleCoefficients coeffs =
        map_forward(x, pipe.map_table(), pipe.grid(), pipe.box_model());

    const int repeats = 3;
    std::map<int, double> mean_seconds;
    std::vector<Eigen::VectorXcd> reference;
    bool bitwise = true;
    for (int workers : {1, 2, 4}) {
        pipe.engine().set_workers(workers);
        pipe.engine().run(coeffs); // warm up
        double total = 0.0;
        std::vector<Eigen::VectorXcd> out;
        for (int rep = 0; rep < repeats; ++rep) {
            const auto t0 = clock_type::now();
            out = pipe.engine().run(coeffs);
            total += elapsed(t0);
        }
        mean_seconds[workers] = total / repeats;
        if (workers == 1) {
            reference = out;
        } else {
            for (size_t b = 0; b < out.size(); ++b)
                if (std::memcmp(out[b].data(), reference[b].data(),
                                sizeof(cd) * out[b].size()) != 0)
                    bitwise = false;
        }
    }
    pipe.engine().set_workers(1);

    const double speedup2 = mean_seconds[1] / mean_seconds[2];
    const double speedup4 = mean_seconds[1] / mean_seconds[4];
    r.seconds = elapsed(start);
    r.passed = bitwise && speedup4 >= 2.5 && r.seconds <= 600.0;
    r.detail = "speedup2=" + fmt(speedup2) + " speedup4=" + fmt(speedup4) +
               " (>=2.5) bitwise_identical=" + (bitwise ? "yes" : "NO") + " t1=" +
               fmt(mean_seconds[1]) + "s";
    if (std::thread::hardware_concurrency() < 4)
        r.detail += " [machine has " + std::to_string(std::thread::hardware_concurrency()) +
                    " hardware threads; >=2.5x at 4 workers is unattainable here]";
    return r;
}

CriterionResult criterion_8(DeskContext&) {
    CriterionResult r{8, "scheduler properties on random occupancies"};
    const auto start = clock_type::now();
    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> nclasses(1, 14), count(1, 60), nw(1, 8);
    bool all_ok = true;
    std::string first_fail;
    for (int trial = 0; trial < 200 && all_ok; ++trial) {
        TranslationWorkload w;
        const int nc = nclasses(rng);
        int next = 0;
        for (int c = 0; c < nc; ++c) {
            TranslationWorkload::Entry e;
            e.representative = Eigen::Vector3i(c % 3, (c / 3) % 3, 2 + c % 5);
            const int n = count(rng);
            for (int i = 0; i < n; ++i) e.pair_ids.push_back(next++);
            w.entries.push_back(e);
        }
        const int workers = nw(rng);
        const Schedule s = build_schedule(w, workers);

        // Partition audit.
        std::vector<char> seen(next, 0);
        for (const auto& lst : s.assignments)
            for (int id : lst) {
                if (seen[id]) {
                    all_ok = false;
                    first_fail = "duplicate assignment";
                }
                seen[id] = 1;
            }
        for (char c : seen)
            if (!c) {
                all_ok = false;
                first_fail = "dropped pair";
            }

        // Step-1 no-duplication: per class, per-worker step-1 counts
        // differ by at most one and nobody gets a second before everyone
        // has one.
        for (const auto& e : w.entries) {
            std::map<int, int> per_worker;
            for (int id : e.pair_ids)
                if (s.assigned_step[id] == 1) ++per_worker[s.assigned_worker[id]];
            if (per_worker.empty()) continue;
            int lo = 1 << 30, hi = 0;
            for (auto& [wk, n] : per_worker) {
                lo = std::min(lo, n);
                hi = std::max(hi, n);
            }
            const bool bad = (static_cast<int>(per_worker.size()) < workers) ? (hi > 1)
                                                                             : (hi - lo > 1);
            if (bad) {
                all_ok = false;
                first_fail = "step-1 duplication";
            }
        }

        // Imbalance within brute-force optimum + largest residual chunk
        // (unit granularity: optimum is total % workers ? 1 : 0).
        const auto t = s.counts();
        const int imbalance =
            *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
        const int optimum = (next % workers == 0) ? 0 : 1;
        if (imbalance > optimum + 1) {
            all_ok = false;
            first_fail = "imbalance " + std::to_string(imbalance);
        }
    }
    r.seconds = elapsed(start);
    r.passed = all_ok && r.seconds <= 120.0;
    r.detail = all_ok ? "200 instances: partition, step-1 rule, imbalance bound all hold"
                      : ("failed: " + first_fail);
    return r;
}

CriterionResult criterion_9(DeskContext& ctx) {
    CriterionResult r{9, "iteration-count parity (DGFA vs dense oracle)"};
    const auto start = clock_type::now();
    const int ours = ctx.desk_solve().gmres.iterations;
    const int dense = ctx.dense_iterations();
    const double ratio = static_cast<double>(ours) / dense;
    r.seconds = elapsed(start);
    r.passed = ratio >= 0.85 && ratio <= 1.15;
    r.detail = "dgfa_iters=" + std::to_string(ours) + " dense_iters=" + std::to_string(dense) +
               " ratio=" + fmt(ratio) + " (within +-15%)";
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const std::string& work_dir,
                                            const std::vector<int>& criteria, bool verbose) {
    DeskContext ctx(work_dir, verbose);
    auto wanted = [&](int id) {
        return criteria.empty() || std::find(criteria.begin(), criteria.end(), id) != criteria.end();
    };

    std::vector<CriterionResult> results;
    using Fn = CriterionResult (*)(DeskContext&);
    // Cheap structural checks first, then the heavy solves.
    const std::pair<int, Fn> order[] = {{3, criterion_3}, {8, criterion_8}, {2, criterion_2},
                                        {1, criterion_1}, {9, criterion_9}, {4, criterion_4},
                                        {5, criterion_5}, {6, criterion_6}, {7, criterion_7}};
    for (const auto& [id, fn] : order) {
        if (!wanted(id)) continue;
        if (verbose) std::cout << "criterion " << id << " running..." << std::endl;
        results.push_back(fn(ctx));
        if (verbose) {
            const auto& r = results.back();
            std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": "
                      << r.name << " -- " << r.detail << " (" << fmt(r.seconds) << "s)"
                      << std::endl;
        }
    }
    std::sort(results.begin(), results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
    return results;
}

int report_acceptance(const std::vector<CriterionResult>& results) {
    int failures = 0;
    std::cout << "\n=== acceptance summary ===\n";
    for (const auto& r : results) {
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name
                  << " -- " << r.detail << " (" << fmt(r.seconds) << "s)\n";
        if (!r.passed) ++failures;
    }
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures;
}

} // namespace fastscat
