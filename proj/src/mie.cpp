#include "fastscat/mie.hpp"

#include <cmath>
#include <stdexcept>

namespace fastscat {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr cd kJ{0.0, 1.0};

// S1/S2 amplitude functions for a PEC sphere in the exp(+j w t)
// convention: a_n = psi_n'(x)/zeta_n'(x), b_n = psi_n(x)/zeta_n(x) with
// Riccati-Bessel psi_n = x j_n, chi_n = -x y_n, zeta_n = psi_n + j chi_n.
void mie_amplitudes(double x, int order, double cos_theta, cd& s1, cd& s2) {
    s1 = 0.0;
    s2 = 0.0;
    double pi_prev = 0.0; // pi_0
    double pi_curr = 1.0; // pi_1
    for (int n = 1; n <= order; ++n) {
        const double jn = std::sph_bessel(n, x);
        const double jnm1 = std::sph_bessel(n - 1, x);
        const double yn = std::sph_neumann(n, x);
        const double ynm1 = std::sph_neumann(n - 1, x);
        const double psi = x * jn;
        const double psi_d = x * jnm1 - n * jn;
        const double chi = -x * yn;
        const double chi_d = -(x * ynm1 - n * yn);
        const cd zeta = psi + kJ * chi;
        const cd zeta_d = psi_d + kJ * chi_d;
        const cd a_n = psi_d / zeta_d;
        const cd b_n = psi / zeta;

        const double tau = n * cos_theta * pi_curr - (n + 1) * pi_prev;
        const double factor = (2.0 * n + 1.0) / (n * (n + 1.0));
        s1 += factor * (a_n * pi_curr + b_n * tau);
        s2 += factor * (a_n * tau + b_n * pi_curr);

        const double pi_next =
            ((2.0 * n + 1.0) * cos_theta * pi_curr - (n + 1.0) * pi_prev) / n;
        pi_prev = pi_curr;
        pi_curr = pi_next;
    }
}

FarFieldPattern evaluate(double radius_m, const Medium& medium,
                         const std::vector<double>& angles_deg, int order) {
    const double x = medium.wavenumber * radius_m;
    FarFieldPattern pattern;
    pattern.angles_deg = angles_deg;
    pattern.values.resize(angles_deg.size());
    for (size_t i = 0; i < angles_deg.size(); ++i) {
        const double angle = angles_deg[i];
        const double theta = std::abs(angle) * kPi / 180.0;
        const double phi = angle >= 0.0 ? 0.0 : kPi;
        cd s1, s2;
        mie_amplitudes(x, order, std::cos(theta), s1, s2);
        // E_theta = E0 cos(phi) (exp(-jkr)/(jkr)) S2  ->  F_theta = cos(phi) S2 / (jk)
        pattern.values[i] = std::cos(phi) * s2 / (kJ * medium.wavenumber);
    }
    return pattern;
}

} // namespace

void eplane_direction(double angle_deg, Vec3& rhat, Vec3& theta_hat) {
    const double theta = std::abs(angle_deg) * kPi / 180.0;
    const double phi = angle_deg >= 0.0 ? 0.0 : kPi;
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    rhat = Vec3(st * cp, st * sp, ct);
    theta_hat = Vec3(ct * cp, ct * sp, -st);
}

FarFieldPattern mie_far_field(double radius_m, const Medium& medium,
                              const std::vector<double>& angles_deg, int order_override) {
    if (radius_m <= 0.0) throw std::invalid_argument("mie_far_field: radius must be > 0");
    for (size_t i = 1; i < angles_deg.size(); ++i)
        if (angles_deg[i] <= angles_deg[i - 1])
            throw std::invalid_argument("mie_far_field: angle grid must be strictly increasing");

    const double x = medium.wavenumber * radius_m;
    const int order = order_override > 0
                          ? order_override
                          : static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));

    FarFieldPattern base = evaluate(radius_m, medium, angles_deg, order);
    FarFieldPattern refined = evaluate(radius_m, medium, angles_deg, 2 * order);
    if (pattern_rel_error(base, refined) > 1e-10)
        throw std::runtime_error("mie_far_field: series not converged at doubled order");
    return refined;
}

double pattern_rel_error(const FarFieldPattern& test, const FarFieldPattern& reference) {
    if (test.values.size() != reference.values.size())
        throw std::invalid_argument("pattern_rel_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < test.values.size(); ++i) {
        num += std::norm(test.values[i] - reference.values[i]);
        den += std::norm(reference.values[i]);
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

} // namespace fastscat
