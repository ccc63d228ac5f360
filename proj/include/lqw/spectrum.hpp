#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "lqw/curve.hpp"
#include "lqw/grid.hpp"

namespace lqw::spectrum {

/// Largest eigenvalue of alpha R_mm(i kappa) on the grid (dense
/// symmetric Nystrom matrix, Lanczos with full reorthogonalization).
double bs_max_eigenvalue(const curve::Curve& curve, double alpha,
                         double kappa, const kernel::Grid1D& grid);

/// Largest eigenvalue of the threshold-factored operator
///     T = alpha (R_mm - R0) (I - alpha R0)^{-1}    at k = i kappa.
/// T and alpha R_mm cross the eigenvalue 1 at exactly the same kappa
/// (factor I - alpha R_mm = (I - T)(I - alpha R0) and I - alpha R0 is
/// invertible for kappa > alpha/2), but T keeps a kernel confined to
/// the bent region even as kappa -> alpha/2 where (I - alpha R0)^{-1}
/// develops a 1/gamma resonance, gamma^2 = kappa^2 - alpha^2/4.  This
/// is what makes weak-binding roots computable on a fixed window.
double bs_factored_eigenvalue(const curve::Curve& curve, double alpha,
                              double kappa, const kernel::Grid1D& grid);

struct SpectralResult {
    std::vector<double> eigenvalues;  // E_j < -alpha^2/4
    std::vector<double> kappas;       // sqrt(-E_j)
    std::vector<double> residuals;    // |mu(kappa_j) - 1| at the root
    Eigen::VectorXd eigenvector;      // BS eigenvector f on grid nodes
    kernel::Grid1D grid;              // grid carrying the eigenvector
    bool threshold_marginal = false;  // mu at the threshold margin in
                                      // [1, 1 + 1e-6]: not counted
    bool found() const { return !eigenvalues.empty(); }
};

struct SolverOptions {
    double panel_width = 0.5;  // grid panel width
    int order = 8;             // Gauss nodes per panel
    double kappa_tol = 1e-10;  // bisection width in kappa
};

/// Discrete spectrum below -alpha^2/4: root of mu(kappa) = 1 by
/// safeguarded bracketing on kappa in (alpha/2, 3 alpha/2], extended
/// upward while mu stays above 1.  The curve's truncation is used as
/// the solver window.
SpectralResult find_discrete_eigenvalues(const curve::Curve& curve,
                                         double alpha,
                                         const SolverOptions& opt = {});

/// Bound-state field psi(x) ~ int K0(kappa |x - Gamma(s)|) f(s) ds
/// sampled at the given plane points, normalized to max |psi| = 1.
std::vector<std::complex<double>> eigenfunction(
    const curve::Curve& curve, double alpha, const SpectralResult& result,
    const std::vector<curve::Vec2>& points);

struct BendingExpansion {
    double integral = 0.0;         // I = double integral of A(s,t)
    double predicted_coeff = 0.0;  // -I^2
    bool diverged = false;         // truncation ladder unstable

    double predicted_energy(double alpha, double beta) const {
        return -0.25 * alpha * alpha +
               predicted_coeff * beta * beta * beta * beta;
    }
};

/// Weak-bending expansion coefficient: A(s,t) built from the relative
/// tangent angle of the *unit* profile (the beta field is ignored; the
/// expansion is in beta), integrated over the plane with exponential
/// truncation of the K1 factor.
BendingExpansion bending_coefficient(const curve::BendingProfile& profile,
                                     double alpha);

struct Beta4Row {
    double beta = 0.0;
    double energy = 0.0;
    double ratio = 0.0;  // (E + alpha^2/4) / beta^4
    bool ok = false;
};

struct Beta4Fit {
    std::vector<Beta4Row> rows;
    double predicted_coeff = 0.0;  // -I^2 from bending_coefficient
    double ratio_spread = 0.0;     // (max - min) / |mean| over ok rows
};

/// Eigenvalue of the homotopy family Gamma^(beta) for each requested
/// beta, with the ratio (E + alpha^2/4)/beta^4 compared against -I^2.
Beta4Fit beta4_fit(const curve::BendingProfile& profile, double alpha,
                   const std::vector<double>& betas);

}  // namespace lqw::spectrum
