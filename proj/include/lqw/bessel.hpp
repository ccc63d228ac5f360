#pragma once

#include <complex>

namespace lqw::bessel {

using cplx = std::complex<double>;

/// Macdonald function K_nu(z) for nu in {0,1,2}, Re z > 0.
/// Ascending series for small |z|, exponentially convergent
/// Gauss-Hermite evaluation of the Laplace representation otherwise.
/// Throws std::domain_error for Re z <= 0.
cplx bessel_k(int nu, cplx z);

/// Modified Bessel I_nu(z) for nu in {0,1}, ascending series.
cplx bessel_i(int nu, cplx z);

/// Independent oracle: adaptive quadrature of
///   K_nu(z) = \int_0^inf e^{-z cosh t} cosh(nu t) dt,  Re z > 0.
/// Test-only path; estimated error <= 1e-11 in the working range.
cplx oracle_k(int nu, cplx z);

/// Split K0(z) = -log(z) * I0(z) + remainder; returns the remainder,
/// which is entire.  Used by the log product quadrature.
cplx k0_smooth_remainder(cplx z);

}  // namespace lqw::bessel
