#pragma once

#include <complex>
#include <functional>

#include "fastscat/geometry.hpp"

namespace fastscat {

using cd = std::complex<double>;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;

/// Free-space medium at a fixed operating frequency. Time convention is
/// exp(+j w t) with exp(-j k R) propagation.
struct Medium {
    double frequency = 0.0;  // Hz
    double wavenumber = 0.0; // rad/m
    double impedance = 0.0;  // ohm
    double wavelength = 0.0; // m

    static Medium free_space(double frequency_hz);
};

/// Free-space dyadic Green's function D(r, r') of the electric field:
///   D = psi(R) { I (1 - j/kR - 1/(kR)^2) - RhatRhat (1 - 3j/kR - 3/(kR)^2) }
///   psi(R) = -j k eta exp(-j k R) / (4 pi R)
/// Symmetric as a matrix and under swap of r and r'. Throws when R falls
/// below `singularity_floor` (defaults to 1e-12 wavelengths).
CMat3 dyadic_green(const Vec3& r, const Vec3& rp, const Medium& medium,
                   double singularity_floor = -1.0);

/// E-field of a Hertzian dipole with the given complex moment (A*m):
/// dyadic_green(observer, position) * moment.
CVec3 dipole_field(const Vec3& position, const CVec3& moment, const Vec3& observer,
                   const Medium& medium);

/// Scalar Green's function exp(-j k R) / (4 pi R).
cd scalar_green(double R, const Medium& medium);

/// Near-uniform spherical point set from golden-ratio azimuth increments:
///   azimuth_l = 2 pi l / phi,  polar_l = arccos(1 - (2l+1)/N_s).
struct FibonacciSphere {
    double radius = 0.0;
    std::vector<Vec3> points; // relative to the sphere center
};

FibonacciSphere fibonacci_lattice(int count, double radius);

/// Symmetric Gaussian rules on the reference triangle, weights summing
/// to 1 (multiply by the triangle area). Node/weight constants are exact
/// closed forms.
struct TriQuadRule {
    struct Node {
        double b0, b1, b2; // barycentric
        double w;
    };
    std::vector<Node> nodes;

    static const TriQuadRule& order1(); // 1 point, degree 1 (test side)
    static const TriQuadRule& order2(); // 3 points, degree 2 (basis side)
    static const TriQuadRule& order5(); // 7 points, degree 5 (refinement checks)

    Vec3 point(const TriangleMesh& mesh, int tri, int node) const;
};

using FieldEvaluator = std::function<CVec3(const Vec3&)>;

/// Galerkin inner product of a field with RWG test function k, using the
/// test-side rule (order 1 by default).
cd efie_test_integral(const TriangleMesh& mesh, const RwgBasis& basis, int k,
                      const FieldEvaluator& field,
                      const TriQuadRule& rule = TriQuadRule::order1());

/// Excitation vector of a unit-amplitude plane wave: V_m is the tested
/// incident field on function m. Polarization must be orthogonal to the
/// propagation direction.
Eigen::VectorXcd plane_wave_excitation(const TriangleMesh& mesh, const RwgBasis& basis,
                                       const Vec3& direction, const Vec3& polarization,
                                       const Medium& medium, double amplitude = 1.0);

/// Far-zone radiation vector F(rhat) of the RWG current with coefficients a:
///   E_scat(r) ~ F(rhat) exp(-j k r) / r,
///   F = (-j k eta / 4 pi) Int [J - rhat (rhat . J)] exp(+j k rhat . r') dr'.
CVec3 radiation_vector(const TriangleMesh& mesh, const RwgBasis& basis,
                       const Eigen::VectorXcd& coeffs, const Vec3& rhat, const Medium& medium);

} // namespace fastscat
