#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "lqw/curve.hpp"

namespace lqw::quasimode {

using cplx = std::complex<double>;

/// Smooth partition bump: 0 for x <= 0, 1 for x >= 1,
///   theta(x) = e^{-1/x} / (e^{-1/x} + e^{-1/(1-x)})  on (0,1).
double cutoff(double x);
double cutoff_d1(double x);
double cutoff_d2(double x);

/// Weyl quasi-mode psi(s,t) = e^{-alpha|t|/2} e^{iks} theta1(s)
/// theta2(t) in curvilinear coordinates (s = arclength, t = normal
/// offset), sampled on a tensor Gauss grid over the rectangle
/// [s0-1, s0+L1+1] x [-L2-1, L2+1].  theta1 ramps 0 -> 1 over
/// [s0-1, s0] and back over [s0+L1, s0+L1+1]; theta2 likewise in t.
struct QuasiMode {
    double s0 = 0.0, l1 = 0.0, l2 = 0.0;
    double k = 0.0, alpha = 0.0;

    std::vector<double> s_nodes, s_weights;
    std::vector<double> t_nodes, t_weights;  // panels split at t = 0
    Eigen::MatrixXcd psi;       // psi(s_i, t_j)
    Eigen::MatrixXd jacobian;   // 1 - t K(s), positive on the rectangle

    double norm_sq = 0.0;           // quadrature of |psi|^2 |1 - t K|
    double norm_lower_bound = 0.0;  // L1 (1 - e^{-alpha L2}) / alpha
    double curv_sup = 0.0;          // K0 = sup_{s >= s0-1} |K|
    double curv_deriv_sup = 0.0;    // K1 = sup_{s >= s0-1} |K'|
};

/// Build the quasi-mode.  The requested s0 is a starting point: it is
/// marched outward in unit steps until the curvature tail obeys
/// |K(s)| <= 1/(2(L2+1)) for all s >= s0 - 1 (which keeps the
/// coordinate Jacobian above 1/2 on the rectangle).  Throws if no
/// admissible s0 fits inside the curve's cached window.
QuasiMode build_quasimode(const curve::Curve& curve, double alpha,
                          double k, double s0, double l1, double l2,
                          int order = 24);

/// The four closed-form components of (-Delta + alpha^2/4 - k^2) psi
/// at a point, with d = (1 - t K(s))^{-1}:
///   psi1 = k^2 (d^2 - 1) psi
///   psi2 = -(i k t K' d^3 + (alpha/2) K d sgn t) psi
///   psi3 = ((alpha sgn t + K d) theta2' - theta2'') e^{-alpha|t|/2}
///          e^{iks} theta1
///   psi4 = -d^2 ((2ik + t K' d) theta1' + theta1'') e^{-alpha|t|/2}
///          e^{iks} theta2
/// The sgn(t) terms absorb the kink of e^{-alpha|t|/2}, which is what
/// cancels the attractive delta term of H on the curve.
struct ResidualFields {
    cplx psi = 0.0;
    cplx psi1 = 0.0, psi2 = 0.0, psi3 = 0.0, psi4 = 0.0;

    cplx total() const { return psi1 + psi2 + psi3 + psi4; }
};

ResidualFields residual_fields(const curve::Curve& curve, double alpha,
                               double k, double s0, double l1, double l2,
                               double s, double t);

struct ResidualReport {
    double ratio = 0.0;  // ||(H + alpha^2/4 - k^2) psi|| / ||psi||
    double bound = 0.0;  // curvature envelope with the frozen constant
    bool within_bound = false;
    double norm1 = 0.0, norm2 = 0.0, norm3 = 0.0, norm4 = 0.0;
    double norm_psi = 0.0;
    double k0 = 0.0, k1 = 0.0;  // curvature sups entering the bound
};

/// Residual ratio from the closed-form fields (no numerical
/// differentiation across the t = 0 kink), with the envelope
///   c ((K0 + K1 + e^{-alpha L2 / 2}) sqrt(L1+2) + 1 + K1)
///     / sqrt(L1 (1 - e^{-alpha L2})).
ResidualReport residual_ratio(const QuasiMode& mode,
                              const curve::Curve& curve, double alpha,
                              double k);

}  // namespace lqw::quasimode
