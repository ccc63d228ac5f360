#pragma once

#include <Eigen/Core>
#include <complex>
#include <optional>

#include "lqw/bump.hpp"
#include "lqw/curve.hpp"
#include "lqw/grid.hpp"

namespace lqw::kernel {

using cplx = std::complex<double>;

/// Spectral parameter k with Im k > 0 (so Re(-ik) > 0 and the kernel
/// K0(-ik r) decays).  Energies z = k^2 map through the principal
/// square root with Im sqrt(z) > 0.
struct SpectralParameter {
    cplx k;

    static SpectralParameter from_k(cplx k);
    static SpectralParameter from_energy(cplx z);

    cplx energy() const { return k * k; }
    cplx minus_ik() const { return cplx(0, -1) * k; }
    /// decay rate of the kernel envelope, Im k
    double decay_rate() const { return k.imag(); }
};

/// Symmetrized Nystrom matrix: M_ij = kernel(s_i, s_j) sqrt(w_i w_j),
/// so for k = i kappa the operator spectrum is that of a real symmetric
/// matrix.  Entries near the diagonal carry the log product-quadrature
/// correction.
struct KernelMatrix {
    Eigen::MatrixXcd m;
    cplx k;
    double truncation = 0.0;

    bool is_real() const { return k.real() == 0.0; }
    Eigen::MatrixXd real_part() const { return m.real(); }
};

/// Nystrom matrix of (1/2pi) K0(-ik |Gamma(s) - Gamma(t)|).
KernelMatrix assemble_rmm(const curve::Curve& curve,
                          const SpectralParameter& k, const Grid1D& grid);

/// Same with |s - t| in place of the chord (straight-line comparison
/// operator).
KernelMatrix assemble_r0(const SpectralParameter& k, const Grid1D& grid);

/// Weighted Hilbert-Schmidt norm (squared integral, returned as the
/// norm) of the difference kernel g(s,t) with weights (1+s^2)^{delta/2}
/// on both sides.  *diverged is set when the inner half-window already
/// carries less than 90% of the value (truncation not converged).
double weighted_hs_norm(const curve::Curve& curve,
                        const SpectralParameter& k, double delta,
                        const Grid1D& grid, bool* diverged = nullptr);

/// f_i = (1/2pi) int K0(-ik |Gamma(s_i) - y|) phi(y) d^2 y over the
/// bump support, by refined tensor Gauss quadrature.  *converged is
/// cleared if refinement still moves the result by > 1e-8 relative.
Eigen::VectorXcd apply_rmdx(const curve::Curve& curve,
                            const SpectralParameter& k,
                            const bump::Bump& phi, const Grid1D& grid,
                            bool* converged = nullptr);

/// Same vector as apply_rmdx, but through the angular addition theorem
/// for the (radial) bump: two cumulative 1-D radial integrals instead
/// of a 2-D quadrature per node.  O(n) Bessel evaluations; apply_rmdx
/// is the independent cross-check.
Eigen::VectorXcd apply_rmdx_radial(const curve::Curve& curve,
                                   const SpectralParameter& k,
                                   const bump::Bump& phi,
                                   const Grid1D& grid);

/// Free-resolvent matrix element (phi, R_dxdx(k) phi) via the radial
/// Fourier side: 2pi int psi(rho)^2 rho / (rho^2 - k^2) drho.
cplx rdxdx_matrix_element(const bump::Bump& phi,
                          const SpectralParameter& k);

/// Independent slow route for k = i kappa only: direct quadrature of
/// the K0 kernel reduced by the angular addition theorem.  Test oracle.
double rdxdx_direct_ikappa(const bump::Bump& phi, double kappa);

struct ResolventElement {
    cplx value{0.0, 0.0};
    double condition = 0.0;  // estimated cond of I - alpha R_mm
    bool flagged = false;    // condition above cap: near-singular solve
};

/// (phi, (H - k^2)^{-1} phi) assembled from the Birman-Schwinger
/// pieces: rdxdx + alpha f^T (I - alpha M)^{-1} f.
ResolventElement resolvent_matrix_element(const curve::Curve& curve,
                                          double alpha,
                                          const SpectralParameter& k,
                                          const bump::Bump& phi,
                                          const Grid1D& grid,
                                          double cond_cap = 1e12);

/// Condition-number estimate of a dense complex matrix via power
/// iteration on A^H A and inverse iteration through an LU solve.
double estimate_condition(const Eigen::MatrixXcd& a);

}  // namespace lqw::kernel
