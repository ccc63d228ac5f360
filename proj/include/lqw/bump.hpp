#pragma once

#include <Eigen/Core>

namespace lqw::bump {

/// Smooth compactly supported planar test function
///   phi(x) = A exp(-1 / (1 - |x-c|^2 / r^2))   on |x-c| < r, else 0.
struct Bump {
    Eigen::Vector2d center{0.0, 0.0};
    double radius = 1.0;
    double amplitude = 1.0;

    double operator()(const Eigen::Vector2d& x) const {
        return radial((x - center).norm());
    }

    /// radial profile phi0(u), u = |x - c|
    double radial(double u) const;

    /// radial Fourier profile psi(rho) = int_0^r phi0(u) J0(rho u) u du,
    /// so that |phihat(xi)|^2 = psi(|xi|)^2 with the (1/2pi) int e^{-i xi x}
    /// convention.
    double fourier_radial(double rho) const;

    double l2_norm_sq() const;  // int phi^2 d^2x
    double l1_norm() const;     // int |phi| d^2x
};

}  // namespace lqw::bump
