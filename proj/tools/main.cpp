#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "fastscat/cache.hpp"
#include "fastscat/report.hpp"
#include "fastscat/solver.hpp"
#include "fastscat/verify.hpp"

using namespace fastscat;

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

RunConfig load_config(const std::string& config_path, const std::vector<std::string>& sets) {
    if (config_path.empty()) return RunConfig::from_overrides(sets);
    return RunConfig::from_file(config_path, sets);
}

std::string class_file_name(const Eigen::Vector3i& c) {
    return "cvfcnn_" + std::to_string(c.x()) + "_" + std::to_string(c.y()) + "_" +
           std::to_string(c.z()) + ".bin";
}

struct PreparedRun {
    TriangleMesh mesh;
    Medium medium;
    std::unique_ptr<Pipeline> pipeline;
    bool cache_hit = false;
};

/// Builds the pipeline; the box model and mapping tables come from the
/// run cache when they exist there (bit-identical restore), and are
/// persisted after a cold build.
PreparedRun prepare(const RunConfig& cfg) {
    PreparedRun run;
    run.mesh = cfg.make_mesh();
    run.medium = cfg.medium();
    const PipelineOptions opt = cfg.pipeline_options();

    if (cfg.cache_enabled && cfg.solver_backend() != SolverBackend::dense_oracle) {
        const std::string key = preprocess_cache_key(run.mesh, cfg.frequency_hz, opt.box_edge,
                                                     opt.n_d, opt.svd_cutoff);
        if (auto cached = load_preprocess_cache(cfg.cache_dir, key)) {
            run.cache_hit = true;
            PreprocessPreload preload{std::move(cached->model), std::move(cached->table)};
            run.pipeline = std::make_unique<Pipeline>(run.mesh, run.medium, opt, &preload);
        } else {
            run.pipeline = std::make_unique<Pipeline>(run.mesh, run.medium, opt);
            PreprocessCache cache;
            cache.model = run.pipeline->box_model();
            cache.table = run.pipeline->map_table();
            save_preprocess_cache(cfg.cache_dir, key, cache);
        }
        return run;
    }
    run.pipeline = std::make_unique<Pipeline>(run.mesh, run.medium, opt);
    return run;
}

std::vector<CvfcnnModel> load_models_for(const RunConfig& cfg, Pipeline& pipe) {
    std::vector<CvfcnnModel> models;
    std::string missing;
    for (const auto& cls : pipe.engine().interactions().classes) {
        const std::string path = cfg.model_dir + "/" + class_file_name(cls.representative);
        if (!std::filesystem::exists(path)) {
            missing += " " + path;
            continue;
        }
        models.push_back(load_model(path));
    }
    if (!missing.empty())
        throw std::runtime_error("ml backend: missing model files for scheduled classes:" +
                                 missing);
    return models;
}

int cmd_solve(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    const auto t0 = clock_type::now();
    PreparedRun run = prepare(cfg);
    const double prep_s = elapsed(t0);

    if (cfg.solver_backend() == SolverBackend::ml)
        run.pipeline->attach_models(load_models_for(cfg, *run.pipeline));

    SolveOptions sopt;
    sopt.gmres = cfg.gmres_options();
    sopt.angles_deg = default_eplane_grid(cfg.pattern_step_deg);
    sopt.direction = Vec3(cfg.direction[0], cfg.direction[1], cfg.direction[2]);
    sopt.polarization = Vec3(cfg.polarization[0], cfg.polarization[1], cfg.polarization[2]);

    const auto t1 = clock_type::now();
    const SolveResult res = solve_scattering(*run.pipeline, sopt);
    const double solve_s = elapsed(t1);

    write_pattern_csv(cfg.output_dir + "/pattern.csv", cfg, res.pattern);
    write_currents_csv(cfg.output_dir + "/currents.csv", cfg, run.mesh, run.pipeline->basis(),
                       res.coefficients);
    write_residual_csv(cfg.output_dir + "/residuals.csv", cfg, res.gmres.residual_history);
    write_solution_dump(cfg.output_dir + "/solution.bin", res.coefficients);

    std::ostringstream report;
    report << "backend = " << cfg.backend << "\n";
    report << "unknowns = " << run.pipeline->basis().size() << "\n";
    report << "boxes = " << run.pipeline->grid().box_count() << "\n";
    report << "level = " << run.pipeline->grid().level << "\n";
    report << "iterations = " << res.gmres.iterations << "\n";
    report << "converged = " << (res.gmres.converged ? "true" : "false") << "\n";
    report << "stagnated = " << (res.gmres.stagnated ? "true" : "false") << "\n";
    report << "preprocess_seconds = " << prep_s << "\n";
    report << "solve_seconds = " << solve_s << "\n";
    report << "cache_hit = " << (run.cache_hit ? "true" : "false") << "\n";
    report << "seed = " << cfg.seed << "\n";
    write_text_report(cfg.output_dir + "/report.txt", cfg, report.str());

    std::cout << "solve: N=" << run.pipeline->basis().size() << " iterations="
              << res.gmres.iterations << (res.gmres.converged ? "" : " (not converged)")
              << " outputs in " << cfg.output_dir << std::endl;
    if (!res.gmres.converged) return 2;
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    ensure_directory(cfg.model_dir);
    ensure_directory(cfg.output_dir);
    const TriangleMesh mesh = cfg.make_mesh();
    const Medium med = cfg.medium();
    const PipelineOptions popt = cfg.pipeline_options();

    const RwgBasis basis = build_rwg(mesh);
    std::vector<Eigen::Vector3i> classes = cfg.parse_train_classes();
    if (classes.empty()) { // "occupied": enumerate from the partition
        const BoxGrid grid = partition(mesh, basis, popt.box_edge);
        for (const auto& cls : classify_far_vectors(grid).classes)
            classes.push_back(cls.representative);
    }
    std::cout << "training " << classes.size() << " class(es), n_d=" << popt.n_d
              << ", H=" << cfg.hidden << std::endl;

    const UniformBoxModel model = build_box_model(popt.box_edge, popt.n_d, med, popt.svd_cutoff);
    const SurfaceSampler sampler = build_surface_sampler(mesh, basis, model, med);
    if (!sampler.covers_all)
        std::cerr << "warning: some basis functions are not covered by any box placement\n";

    std::vector<TrainReportRow> rows;
    bool all_converged = true;
    for (const auto& cls : classes) {
        const auto t0 = clock_type::now();
        const Eigen::MatrixXcd g = build_translation_matrix(cls, model, med);
        TrainingReport report;
        const CvfcnnModel net = train_two_stage(g, cls, popt.box_edge / med.wavelength, sampler,
                                                cfg.train_config(), report);
        save_model(net, cfg.model_dir + "/" + class_file_name(cls));
        const std::string name = std::to_string(cls.x()) + "_" + std::to_string(cls.y()) + "_" +
                                 std::to_string(cls.z());
        rows.push_back({name, 1, report.stage1.epochs, report.stage1.final_train_loss,
                        report.stage1.test_error_mean, 0.0, 0.0});
        rows.push_back({name, 2, report.stage2.epochs, report.stage2.final_train_loss,
                        report.stage1.test_error_mean, report.stage2.test_error_mean,
                        report.stage2.test_error_std});
        all_converged = all_converged && report.converged;
        std::cout << "  class [" << name << "] e_u=" << report.stage1.test_error_mean
                  << " e_sp=" << report.stage2.test_error_mean
                  << (report.converged ? "" : " (NOT CONVERGED)") << " (" << elapsed(t0) << "s)"
                  << std::endl;
    }
    write_train_csv(cfg.output_dir + "/training_report.csv", cfg, rows);
    if (!all_converged && !cfg.allow_partial) {
        std::cerr << "some classes missed their targets (use train.allow_partial to accept)\n";
        return 3;
    }
    return 0;
}

int cmd_bench(const RunConfig& cfg, const std::vector<int>& workers_list, int repeats) {
    ensure_directory(cfg.output_dir);
    PreparedRun run = prepare(cfg);
    Pipeline& pipe = *run.pipeline;

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(pipe.basis().size());
    for (int i = 0; i < x.size(); ++i) x[i] = cd(g(rng), g(rng));
    const DipoleCoefficients coeffs =
        map_forward(x, pipe.map_table(), pipe.grid(), pipe.box_model());

    std::vector<BenchRow> rows;
    double t1 = 0.0;
    std::vector<Eigen::VectorXcd> reference;
    bool bitwise = true;
    for (int workers : workers_list) {
        pipe.engine().set_workers(workers);
        pipe.engine().run(coeffs); // warm up
        double total = 0.0;
        std::vector<Eigen::VectorXcd> out;
        for (int rep = 0; rep < repeats; ++rep) {
            const auto t0 = clock_type::now();
            out = pipe.engine().run(coeffs);
            total += elapsed(t0);
        }
        const double mean = total / repeats;
        if (rows.empty()) {
            t1 = mean;
            reference = out;
        } else {
            for (size_t b = 0; b < out.size(); ++b)
                if (out[b] != reference[b]) bitwise = false;
        }
        rows.push_back({workers, mean, t1 / mean});
        std::cout << "workers=" << workers << " mean_mvm_seconds=" << mean
                  << " speedup=" << t1 / mean << std::endl;
    }
    write_bench_csv(cfg.output_dir + "/bench.csv", cfg, rows);
    std::cout << "far-MVM outputs bitwise identical across worker counts: "
              << (bitwise ? "yes" : "NO") << std::endl;
    return bitwise ? 0 : 4;
}

int cmd_mie(const RunConfig& cfg) {
    ensure_directory(cfg.output_dir);
    double radius = cfg.sphere_radius_m;
    if (radius <= 0.0) {
        Vec3 lo, hi;
        cfg.make_mesh().bounding_box(lo, hi);
        radius = 0.5 * (hi - lo).maxCoeff();
    }
    const FarFieldPattern pattern =
        mie_far_field(radius, cfg.medium(), default_eplane_grid(cfg.pattern_step_deg));
    write_pattern_csv(cfg.output_dir + "/mie.csv", cfg, pattern);
    std::cout << "mie reference written to " << cfg.output_dir << "/mie.csv" << std::endl;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fastscat: surface-integral-equation scattering solver with "
                 "group-by-group far-zone interactions"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "key = value configuration file");
        cmd->add_option("--set", sets, "override, e.g. --set solver.backend=ml")->take_all();
    };

    auto* solve = app.add_subcommand("solve", "solve a scattering problem");
    add_common(solve);
    auto* train = app.add_subcommand("train", "train translation networks");
    add_common(train);
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    std::string work_dir = "verify_work";
    std::vector<int> criteria;
    verify->add_option("--work-dir", work_dir, "cache directory for verification artifacts");
    verify->add_option("--criteria", criteria, "subset of criteria to run (default: all)");
    auto* bench = app.add_subcommand("bench", "far-MVM scaling benchmark");
    add_common(bench);
    std::vector<int> workers_list = {1, 2, 4};
    int repeats = 3;
    bench->add_option("--workers", workers_list, "worker counts to time");
    bench->add_option("--repeats", repeats, "repetitions per worker count");
    auto* mie = app.add_subcommand("mie", "PEC-sphere Mie reference pattern");
    add_common(mie);
    auto* mesh_cmd = app.add_subcommand("mesh", "generate an icosphere mesh file");
    double radius = 0.15;
    int freq = 10;
    std::string out_path = "sphere.txt";
    mesh_cmd->add_option("--radius", radius, "sphere radius in meters")->required();
    mesh_cmd->add_option("--freq", freq, "geodesic frequency (subdivision s -> 2^s)");
    mesh_cmd->add_option("-o,--output", out_path, "output mesh path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(solve)) return cmd_solve(load_config(config_path, sets));
        if (app.got_subcommand(train)) return cmd_train(load_config(config_path, sets));
        if (app.got_subcommand(verify))
            return report_acceptance(run_acceptance(work_dir, criteria)) == 0 ? 0 : 1;
        if (app.got_subcommand(bench))
            return cmd_bench(load_config(config_path, sets), workers_list, repeats);
        if (app.got_subcommand(mie)) return cmd_mie(load_config(config_path, sets));
        if (app.got_subcommand(mesh_cmd)) {
            save_mesh(make_icosphere(radius, freq), out_path);
            std::cout << "mesh written to " << out_path << std::endl;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
