#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fastscat/solver.hpp"

using namespace fastscat;

TEST_CASE("mie convergence under order doubling") {
    const Medium med = Medium::free_space(1e9);
    const double radius = 0.5 * med.wavelength;
    const auto angles = default_eplane_grid(5.0);
    const FarFieldPattern base = mie_far_field(radius, med, angles);
    // The default truncation already passed its internal doubling check;
    // quadruple it explicitly.
    const double x = med.wavenumber * radius;
    const int order = static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
    const FarFieldPattern fine = mie_far_field(radius, med, angles, 4 * order);
    CHECK(pattern_rel_error(base, fine) < 1e-10);
}

TEST_CASE("mie is mesh independent by construction and rejects bad grids") {
    const Medium med = Medium::free_space(1e9);
    CHECK_THROWS(mie_far_field(0.0, med, {0.0, 10.0}));
    CHECK_THROWS(mie_far_field(0.1, med, {10.0, 10.0})); // not strictly increasing
}

TEST_CASE("forward scatter exceeds backscatter for ka >= 2") {
    const Medium med = Medium::free_space(1e9);
    for (double ka : {2.0, 3.0, 6.0}) {
        const double radius = ka / med.wavenumber;
        // Incidence travels along +z, so theta = 0 is the forward lobe.
        const FarFieldPattern p = mie_far_field(radius, med, {0.0, 180.0});
        CHECK(std::abs(p.values[0]) > std::abs(p.values[1]));
    }
}

TEST_CASE("rayleigh-regime backscatter follows the (ka)^4 law") {
    const Medium med = Medium::free_space(1e9);
    // PEC sphere backscatter RCS in the Rayleigh limit: 9 (ka)^4 pi a^2.
    // |F(back)|^2 * 4 pi = RCS.
    for (double ka : {0.05, 0.1}) {
        const double radius = ka / med.wavenumber;
        const FarFieldPattern p = mie_far_field(radius, med, {180.0});
        const double rcs = 4.0 * M_PI * std::norm(p.values[0]);
        const double expect = 9.0 * std::pow(ka, 4) * M_PI * radius * radius;
        CHECK(rcs == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("dense solve matches Mie within discretization error") {
    const Medium med = Medium::free_space(1e9);
    const double radius = 0.5 * med.wavelength;
    const TriangleMesh mesh = make_icosphere(radius, 6);
    const RwgBasis basis = build_rwg(mesh);
    const Eigen::VectorXcd v =
        plane_wave_excitation(mesh, basis, Vec3(0, 0, 1), Vec3(1, 0, 0), med);
    const auto angles = default_eplane_grid(2.0);
    const DenseSolution sol = dense_solve(mesh, basis, med, v, angles);
    const FarFieldPattern mie = mie_far_field(radius, med, angles);
    // lambda/14 mesh: a few percent.
    CHECK(pattern_rel_error(sol.pattern, mie) < 0.05);
}

TEST_CASE("dense matrix symmetry (reciprocity up to quadrature)") {
    const Medium med = Medium::free_space(1e9);
    const TriangleMesh mesh = make_icosphere(0.5 * med.wavelength, 5);
    const RwgBasis basis = build_rwg(mesh);
    DenseOracle dense(mesh, basis, med);
    const Eigen::MatrixXcd& z = dense.matrix();
    CHECK((z - z.transpose()).norm() / z.norm() < 2e-2);
}

TEST_CASE("dense guard rejects oversized problems") {
    const Medium med = Medium::free_space(1e9);
    const TriangleMesh mesh = make_icosphere(0.1, 3);
    const RwgBasis basis = build_rwg(mesh);
    CHECK_THROWS(DenseOracle(mesh, basis, med, basis.size() - 1));
}

TEST_CASE("E-plane symmetry of the sphere solution") {
    const Medium med = Medium::free_space(1e9);
    const double radius = 0.4 * med.wavelength;
    const TriangleMesh mesh = make_icosphere(radius, 6);
    const RwgBasis basis = build_rwg(mesh);
    const Eigen::VectorXcd v =
        plane_wave_excitation(mesh, basis, Vec3(0, 0, 1), Vec3(1, 0, 0), med);
    const auto angles = default_eplane_grid(5.0);
    const DenseSolution sol = dense_solve(mesh, basis, med, v, angles);
    // Pattern magnitude symmetric under theta -> -theta within 1%.
    const size_t n = sol.pattern.angles_deg.size();
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const size_t j = n - 1 - i; // -theta counterpart on the symmetric grid
        num += std::pow(std::abs(sol.pattern.values[i]) - std::abs(sol.pattern.values[j]), 2);
        den += std::norm(sol.pattern.values[i]);
    }
    CHECK(std::sqrt(num / den) < 0.01);
}
