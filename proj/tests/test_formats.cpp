#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fastscat/cache.hpp"
#include "fastscat/report.hpp"

using namespace fastscat;

namespace {
std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

RunConfig basic_config() {
    RunConfig cfg;
    cfg.sphere_radius_m = 0.15;
    cfg.validate();
    return cfg;
}
} // namespace

TEST_CASE("config parsing, overrides and unknown keys") {
    const std::string path = tmp("fastscat_cfg.txt");
    {
        std::ofstream out(path);
        out << "# sample configuration\n";
        out << "mesh.sphere.radius_m = 0.15\n";
        out << "mesh.sphere.freq = 10\n";
        out << "medium.frequency_hz = 1e9\n";
        out << "solver.tolerance = 1e-3\n";
        out << "parallel.workers = 2\n";
    }
    const RunConfig cfg = RunConfig::from_file(path, {"parallel.workers=4"});
    CHECK(cfg.sphere_radius_m == 0.15);
    CHECK(cfg.workers == 4); // override wins
    CHECK(cfg.tolerance == 1e-3);
    CHECK(cfg.restart == 100);        // solver defaults
    CHECK(cfg.max_iterations == 1000);
    CHECK(cfg.n_d == 4);

    CHECK_THROWS_WITH_AS(RunConfig::from_file(path, {"bogus.key=1"}),
                         doctest::Contains("bogus.key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(RunConfig::from_file(path, {"solver.backend=verilog"}),
                         doctest::Contains("solver.backend"), std::invalid_argument);
}

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a = basic_config();
    RunConfig b = basic_config();
    CHECK(a.hash() == b.hash());
    b.tolerance = 2e-3;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("pattern csv round trip with header") {
    const RunConfig cfg = basic_config();
    FarFieldPattern p;
    p.angles_deg = {-90.0, 0.0, 45.0};
    p.values = {cd(1.0, -2.0), cd(0.5, 0.25), cd(-0.125, 3.0)};
    const std::string path = tmp("fastscat_pattern.csv");
    write_pattern_csv(path, cfg, p);

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.find("config_hash=") != std::string::npos);
    CHECK(first.find(kVersion) != std::string::npos);

    const FarFieldPattern back = read_pattern_csv(path);
    REQUIRE(back.values.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back.angles_deg[i] == p.angles_deg[i]);
        CHECK(std::abs(back.values[i] - p.values[i]) < 1e-12);
    }
}

TEST_CASE("solution dump round trip at float precision") {
    Eigen::VectorXcd v(5);
    v << cd(1, 2), cd(-3, 4), cd(0.5, -0.25), cd(1e-3, 2e-3), cd(7, -8);
    const std::string path = tmp("fastscat_sol.bin");
    write_solution_dump(path, v);
    const Eigen::VectorXcd back = read_solution_dump(path);
    REQUIRE(back.size() == 5);
    CHECK((back - v).norm() < 1e-6 * v.norm());
    // Bad magic rejected.
    std::ofstream bad(path, std::ios::binary);
    bad << "junkjunkjunk";
    bad.close();
    CHECK_THROWS(read_solution_dump(path));
}

TEST_CASE("bench and train csv schemas") {
    const RunConfig cfg = basic_config();
    const std::string bpath = tmp("fastscat_bench.csv");
    write_bench_csv(bpath, cfg, {{1, 2.0, 1.0}, {4, 0.6, 3.33}});
    std::ifstream in(bpath);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "workers,mean_mvm_seconds,speedup");

    const std::string tpath = tmp("fastscat_train.csv");
    write_train_csv(tpath, cfg,
                    {{"0_0_2", 1, 100, 1e-4, 5e-4, 0.0, 0.0},
                     {"0_0_2", 2, 60, 2e-5, 5e-4, 8e-4, 2e-4}});
    std::ifstream tin(tpath);
    std::getline(tin, line);
    std::getline(tin, line);
    CHECK(line == "class,stage,epochs,final_loss,e_u_mean,e_sp_mean,e_sp_std");
}

TEST_CASE("preprocess cache round trip is bitwise") {
    const Medium med = Medium::free_space(1e9);
    const double a = med.wavelength / 8.0;
    const TriangleMesh mesh = make_icosphere(0.4 * med.wavelength, 4);
    const RwgBasis basis = build_rwg(mesh);
    const BoxGrid grid = partition(mesh, basis, a);

    PreprocessCache cache;
    cache.model = build_box_model(a, 2, med);
    cache.table = precompute_basis_maps(mesh, basis, grid, cache.model, med);

    const std::string dir = tmp("fastscat_cache_dir");
    const std::string key = preprocess_cache_key(mesh, med.frequency, a, 2, 1e-8);
    save_preprocess_cache(dir, key, cache);
    const auto loaded = load_preprocess_cache(dir, key);
    REQUIRE(loaded.has_value());
    CHECK((loaded->model.a - cache.model.a).norm() == 0.0);
    CHECK((loaded->model.pinv_a - cache.model.pinv_a).norm() == 0.0);
    CHECK((loaded->table.forward - cache.table.forward).norm() == 0.0);
    CHECK((loaded->table.inverse - cache.table.inverse).norm() == 0.0);
    CHECK(loaded->model.effective_rank == cache.model.effective_rank);

    // Key changes with any ingredient.
    CHECK(preprocess_cache_key(mesh, med.frequency, a, 4, 1e-8) != key);
    CHECK(preprocess_cache_key(mesh, 2e9, a, 2, 1e-8) != key);
    CHECK_FALSE(load_preprocess_cache(dir, "0123456789abcdef").has_value());
}
