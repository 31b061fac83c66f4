#pragma once

#include "fastscat/kernels.hpp"

namespace fastscat {

/// Sampled bistatic far-field cut. `angles_deg` is the signed E-plane
/// angle: theta >= 0 lies at phi = 0, theta < 0 at phi = 180 deg, with
/// 0 deg the forward direction (incidence along +z). Values are the
/// co-polarized radiation vector component (V): theta_hat . F.
struct FarFieldPattern {
    std::vector<double> angles_deg; // strictly increasing
    std::vector<cd> values;
};

/// Observation direction and co-pol unit vector for a signed E-plane angle.
void eplane_direction(double angle_deg, Vec3& rhat, Vec3& theta_hat);

/// Bistatic co-polarized far field of a PEC sphere under a unit-amplitude
/// x-polarized plane wave travelling along +z, from the Mie series.
/// Truncation defaults to ceil(x + 4 x^(1/3) + 2); doubling the order is
/// used as a convergence check (failure throws).
FarFieldPattern mie_far_field(double radius_m, const Medium& medium,
                              const std::vector<double>& angles_deg, int order_override = 0);

/// Relative l2 distance between two patterns on the same angle grid.
double pattern_rel_error(const FarFieldPattern& test, const FarFieldPattern& reference);

} // namespace fastscat
