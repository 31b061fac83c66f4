#include "fastscat/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace fastscat {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cd kJ{0.0, 1.0};
} // namespace

Medium Medium::free_space(double frequency_hz) {
    if (frequency_hz <= 0.0) throw std::invalid_argument("Medium: frequency must be > 0");
    Medium m;
    m.frequency = frequency_hz;
    m.wavenumber = 2.0 * kPi * frequency_hz / kSpeedOfLight;
    m.impedance = kMu0 * kSpeedOfLight;
    m.wavelength = kSpeedOfLight / frequency_hz;
    return m;
}

CMat3 dyadic_green(const Vec3& r, const Vec3& rp, const Medium& medium,
                   double singularity_floor) {
    const Vec3 R_vec = r - rp;
    const double R = R_vec.norm();
    const double floor =
        singularity_floor >= 0.0 ? singularity_floor : 1e-12 * medium.wavelength;
    if (R <= floor)
        throw std::runtime_error("dyadic_green: separation " + std::to_string(R) +
                                 " m below singularity floor");

    const double k = medium.wavenumber;
    const double kR = k * R;
    const cd psi = -kJ * k * medium.impedance * std::exp(-kJ * kR) / (4.0 * kPi * R);
    const cd c_id = 1.0 - kJ / kR - 1.0 / (kR * kR);
    const cd c_rr = 1.0 - 3.0 * kJ / kR - 3.0 / (kR * kR);

    const Vec3 rhat = R_vec / R;
    CMat3 out = CMat3::Zero();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            cd v = -c_rr * rhat[i] * rhat[j];
            if (i == j) v += c_id;
            out(i, j) = psi * v;
        }
    }
    return out;
}

CVec3 dipole_field(const Vec3& position, const CVec3& moment, const Vec3& observer,
                   const Medium& medium) {
    return dyadic_green(observer, position, medium) * moment;
}

cd scalar_green(double R, const Medium& medium) {
    return std::exp(-kJ * medium.wavenumber * R) / (4.0 * kPi * R);
}

FibonacciSphere fibonacci_lattice(int count, double radius) {
    if (count < 2) throw std::invalid_argument("fibonacci_lattice: count must be >= 2");
    if (radius <= 0.0) throw std::invalid_argument("fibonacci_lattice: radius must be > 0");
    const double golden = 0.5 + 0.5 * std::sqrt(5.0);
    FibonacciSphere sphere;
    sphere.radius = radius;
    sphere.points.reserve(count);
    for (int l = 0; l < count; ++l) {
        const double azimuth = 2.0 * kPi * l / golden;
        const double polar = std::acos(1.0 - (2.0 * l + 1.0) / count);
        sphere.points.emplace_back(radius * std::sin(polar) * std::cos(azimuth),
                                   radius * std::sin(polar) * std::sin(azimuth),
                                   radius * std::cos(polar));
    }
    return sphere;
}

const TriQuadRule& TriQuadRule::order1() {
    static const TriQuadRule rule{{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0}}};
    return rule;
}

const TriQuadRule& TriQuadRule::order2() {
    static const TriQuadRule rule{{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
                                   {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
                                   {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0}}};
    return rule;
}

const TriQuadRule& TriQuadRule::order5() {
    static const TriQuadRule rule = [] {
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
        const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
        TriQuadRule r;
        r.nodes = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
                   {a1, a1, 1.0 - 2.0 * a1, w1},
                   {a1, 1.0 - 2.0 * a1, a1, w1},
                   {1.0 - 2.0 * a1, a1, a1, w1},
                   {a2, a2, 1.0 - 2.0 * a2, w2},
                   {a2, 1.0 - 2.0 * a2, a2, w2},
                   {1.0 - 2.0 * a2, a2, a2, w2}};
        return r;
    }();
    return rule;
}

Vec3 TriQuadRule::point(const TriangleMesh& mesh, int tri, int node) const {
    const auto& t = mesh.triangles[tri];
    const Node& n = nodes[node];
    return n.b0 * mesh.vertices[t[0]] + n.b1 * mesh.vertices[t[1]] + n.b2 * mesh.vertices[t[2]];
}

cd efie_test_integral(const TriangleMesh& mesh, const RwgBasis& basis, int k,
                      const FieldEvaluator& field, const TriQuadRule& rule) {
    const auto& f = basis.functions[k];
    cd acc = 0.0;
    for (int tri : {f.tri_plus, f.tri_minus}) {
        const double area = mesh.triangle_area(tri);
        for (int q = 0; q < static_cast<int>(rule.nodes.size()); ++q) {
            const Vec3 p = rule.point(mesh, tri, q);
            const Vec3 t = basis.value(mesh, k, tri, p);
            const CVec3 e = field(p);
            acc += area * rule.nodes[q].w * (t.x() * e.x() + t.y() * e.y() + t.z() * e.z());
        }
    }
    return acc;
}

Eigen::VectorXcd plane_wave_excitation(const TriangleMesh& mesh, const RwgBasis& basis,
                                       const Vec3& direction, const Vec3& polarization,
                                       const Medium& medium, double amplitude) {
    if (std::abs(direction.norm() - 1.0) > 1e-9 || std::abs(polarization.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("plane_wave_excitation: direction/polarization must be unit");
    if (std::abs(direction.dot(polarization)) > 1e-9)
        throw std::invalid_argument(
            "plane_wave_excitation: polarization must be orthogonal to direction");

    const double k = medium.wavenumber;
    FieldEvaluator inc = [&](const Vec3& r) -> CVec3 {
        const cd phase = amplitude * std::exp(-kJ * k * direction.dot(r));
        return polarization.cast<cd>() * phase;
    };
    Eigen::VectorXcd v(basis.size());
    for (int m = 0; m < basis.size(); ++m) v[m] = efie_test_integral(mesh, basis, m, inc);
    return v;
}

CVec3 radiation_vector(const TriangleMesh& mesh, const RwgBasis& basis,
                       const Eigen::VectorXcd& coeffs, const Vec3& rhat, const Medium& medium) {
    const double k = medium.wavenumber;
    const TriQuadRule& rule = TriQuadRule::order2();
    CVec3 moment = CVec3::Zero(); // Int J exp(+j k rhat.r') dr'
    for (int n = 0; n < basis.size(); ++n) {
        const cd a = coeffs[n];
        if (a == cd(0.0, 0.0)) continue;
        const auto& f = basis.functions[n];
        for (int tri : {f.tri_plus, f.tri_minus}) {
            const double area = mesh.triangle_area(tri);
            for (int q = 0; q < static_cast<int>(rule.nodes.size()); ++q) {
                const Vec3 p = rule.point(mesh, tri, q);
                const cd phase = std::exp(kJ * k * rhat.dot(p));
                moment += (a * area * rule.nodes[q].w * phase) *
                          basis.value(mesh, n, tri, p).cast<cd>();
            }
        }
    }
    const CVec3 transverse = moment - rhat.cast<cd>() * (rhat.cast<cd>().dot(moment));
    return (-kJ * k * medium.impedance / (4.0 * kPi)) * transverse;
}

} // namespace fastscat
