#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lqw/curve.hpp"
#include "lqw/grid.hpp"

namespace lqw::wave {

using cplx = std::complex<double>;

/// Transverse bound profile phi_0(x2) = sqrt(alpha/2) e^{-alpha|x2|/2},
/// the normalized eigenfunction of the 1-D delta well at -alpha^2/4.
double phi0(double alpha, double x2);

/// Discrete representation of a separable planar function
/// psi(x1, x2) = f1(x1) f2(x2): f1 on a uniform x1 grid (periodic for
/// the FFT), f2 on a quadrature grid carrying the L2(dx2) product.
struct SeparableGrid {
    int n = 0;          // x1 sample count
    double x0 = 0.0;    // first x1 node
    double dx = 0.0;    // x1 spacing; momentum resolution 2 pi/(n dx)
    std::vector<double> x2_nodes;
    std::vector<double> x2_weights;

    double momentum(int bin) const;  // signed FFT frequency of a bin
};

/// Uniform x1 grid on [-X, X) with n samples plus a composite Gauss
/// x2 grid on [-X2, X2] (unit panels).
SeparableGrid make_separable_grid(double x1_half, int n, double x2_half,
                                  int order = 12);

struct SeparableFunction {
    Eigen::VectorXcd f1;
    Eigen::VectorXcd f2;
};

/// Apply a Fourier multiplier m(p) in the x1 variable by FFT.
Eigen::VectorXcd fourier_multiplier(const SeparableGrid& grid,
                                    const Eigen::VectorXcd& f1,
                                    const std::function<cplx(double)>& m);

struct ProjectorOutput {
    SeparableFunction projected;  // band-limited f1, f2 -> coeff * phi0
    cplx transverse_coeff = 0.0;  // (phi0, f2)_2
    double window_mass = 0.0;     // |f1|^2 fraction with p in (0, alpha/2)
    bool aliasing = false;        // spectral mass hugging a window edge
};

/// Outgoing-sector projector for the straight-line comparison
/// Hamiltonian: band-pass to momenta (0, alpha/2) in x1 composed with
/// the rank-one projection onto phi0 in x2.
ProjectorOutput projector_apply(const SeparableGrid& grid,
                                const SeparableFunction& psi, double alpha);

/// Dominating convolution kernel for the resolvent remainder
/// r = (I - alpha R_mm)^{-1} - I: envelope
///   K1(u) = (alpha c0 / 2 pi) (1 + |log(kappa rho |u|)|) e^{-kappa rho |u|}
/// and its Neumann series K = K1 + K1*K1 + ... summed numerically to
/// order 5 with a geometric remainder in the weighted space
/// H1 = L1(R, (1+|u|)du).
struct NeumannKernel {
    double alpha = 0.0, kappa = 0.0, rho = 0.0;
    double envelope_c = 0.0;  // alpha c0 / (2 pi)

    double k1_l1 = 0.0;  // ||K1||_L1, adaptive quadrature
    double k1_h1 = 0.0;  // ||K1||_H1, must be < 1

    std::vector<double> grid_u;           // uniform, symmetric
    std::vector<Eigen::VectorXd> powers;  // K1, K1*K1, ... (5 terms)
    Eigen::VectorXd series;               // their sum on the grid
    std::vector<double> power_h1;         // H1 norm of each power

    double series_h1 = 0.0;        // partial-sum H1 norm
    double remainder_h1 = 0.0;     // q^6/(1-q) geometric tail
    double total_h1_bound = 0.0;   // series_h1 + remainder_h1
    double geometric_bound = 0.0;  // q/(1-q), the a-priori bound
    double moment1 = 0.0;          // int |u| K(u) du (+ tail bound)

    double envelope(double u) const;  // K1(u)
};

/// Build the kernel; throws std::invalid_argument ("kappa too small")
/// when ||K1||_H1 >= 1 so the series has no geometric majorant.
NeumannKernel neumann_tail(double alpha, double kappa, double rho);

/// One certified trace-norm bounding integral.
struct BoundReport {
    std::string name;
    double value = 0.0;
    double ladder_delta = 0.0;  // relative change inner-half -> full L
    bool stable = false;        // ladder_delta < 5%
};

struct TraceBounds {
    double alpha = 0.0, kappa = 0.0, rho = 0.0;
    std::vector<BoundReport> ops;  // C11..C15 in order
    double g1_bound = 0.0;   // weighted Cauchy-Schwarz route for iint|g|
    double g1_direct = 0.0;  // direct double quadrature cross-check
    double kernel_h1 = 0.0;       // bent-curve Neumann kernel, H1
    double kernel_plus_h1 = 0.0;  // straight comparison line (rho = 1)
};

/// Bounding integrals for the five resolvent-difference blocks whose
/// finiteness makes the interaction-vs-line resolvent difference trace
/// class: s-integrals of ||A(.,s)|| ||B(s,.)|| envelopes (C11, C13),
/// the first moment of the Neumann kernel (C12), the weighted-HS route
/// for the difference-kernel double integral (C14) and its
/// kernel-smoothed variant (C15).
TraceBounds trace_bound_integrals(const curve::Curve& curve, double alpha,
                                  double kappa,
                                  const kernel::Grid1D& grid);

struct DecayRow {
    double t = 0.0;
    double norm = 0.0;    // ||phi(t,.)||_{L2((-inf,0))}
    double scaled = 0.0;  // t^{3/2} * norm
    bool quadrature_ok = true;
};

struct DecayTable {
    double eps1 = 0.0, a = 0.0;
    std::vector<DecayRow> rows;
    double sup_scaled = 0.0;
    double norm_total = 0.0;       // ||phi(t,.)||_{L2(R)}, t-independent
    double unitarity_drift = 0.0;  // max relative drift of norm_total
};

/// Smooth momentum bump supported on (eps1, a) used by free_decay:
/// b((p - eps1)/(a - eps1)) with b(x) = e^{-1/(x(1-x))}.
double momentum_bump(double eps1, double a, double p);

/// Left-half-line decay of the free x1 evolution of a state with
/// momentum support in (eps1, a), 0 < eps1 < a <= alpha/2.  For x < 0
/// the twice-integrated-by-parts representation removes the
/// stationary-phase obstruction; the full-line norm is checked by
/// FFT evolution (unitarity).
DecayTable free_decay(double eps1, double a, double alpha,
                      const std::vector<double>& times);

}  // namespace lqw::wave
