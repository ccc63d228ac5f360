#include "lqw/bump.hpp"

#include <cmath>

#include "lqw/quadrature.hpp"

namespace lqw::bump {

double Bump::radial(double u) const {
    const double q = u / radius;
    if (q >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - q * q));
}

double Bump::fourier_radial(double rho) const {
    // smooth integrand; resolve the J0 oscillation with ~2 panels per
    // period
    const int panels =
        8 + static_cast<int>(std::abs(rho) * radius / 2.0);
    return integrate_panels(
        [&](double u) { return radial(u) * std::cyl_bessel_j(0.0, std::abs(rho) * u) * u; },
        0.0, radius, panels, 12);
}

double Bump::l2_norm_sq() const {
    return 2.0 * M_PI *
           integrate_adaptive(
               [&](double u) { return radial(u) * radial(u) * u; }, 0.0,
               radius, 1e-13, 1e-16);
}

double Bump::l1_norm() const {
    return 2.0 * M_PI *
           integrate_adaptive(
               [&](double u) { return std::abs(radial(u)) * u; }, 0.0,
               radius, 1e-13, 1e-16);
}

}  // namespace lqw::bump
