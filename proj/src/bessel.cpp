#include "lqw/bessel.hpp"

#include <cmath>
#include <stdexcept>

#include "lqw/quadrature.hpp"

namespace lqw::bessel {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;
constexpr int kHermiteOrder = 160;
// Crossover between the ascending series and the Laplace quadrature.
// The series loses ~e^{2|z|} ulps to cancellation (3e-13 at |z|=3.2);
// the quadrature needs the u = -2z branch point far from the contour.
constexpr double kSeriesRadius = 3.2;

// ascending series, |z| small.  All three series share the (z^2/4)^k
// term ladder.
cplx i0_series(cplx z) {
    const cplx q = 0.25 * z * z;
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / double(k * k);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

cplx i1_series(cplx z) {
    const cplx q = 0.25 * z * z;
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / double(k * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return 0.5 * z * sum;
}

cplx k0_series(cplx z) {
    const cplx q = 0.25 * z * z;
    cplx term = 1.0, sum = 0.0;
    double h = 0.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / double(k * k);
        h += 1.0 / k;
        sum += term * h;
        if (std::abs(term) * (h + 1) < 1e-18 * (std::abs(sum) + 1)) break;
    }
    return -(std::log(0.5 * z) + kEulerGamma) * i0_series(z) + sum;
}

cplx k1_series(cplx z) {
    // DLMF 10.31.2, n = 1
    const cplx q = 0.25 * z * z;
    cplx term = 1.0, sum = 0.0;
    double h0 = 0.0, h1 = 1.0;  // harmonic numbers H_k, H_{k+1}
    for (int k = 0; k < 80; ++k) {
        if (k > 0) {
            term *= q / double(k * (k + 1));
            h0 += 1.0 / k;
            h1 += 1.0 / (k + 1);
        }
        const double psi_sum = -2.0 * kEulerGamma + h0 + h1;
        sum += term * psi_sum;
        if (std::abs(term) * (std::abs(psi_sum) + 1) <
            1e-18 * (std::abs(sum) + 1))
            break;
    }
    return 1.0 / z + std::log(0.5 * z) * i1_series(z) - 0.25 * z * sum;
}

// Laplace representation evaluated with Gauss-Hermite after u = t^2:
//   K_nu(z) = sqrt(pi/2z) e^{-z} / Gamma(nu+1/2)
//             * int_0^inf e^{-u} u^{nu-1/2} (1 + u/2z)^{nu-1/2} du.
// The branch point of the integrand sits at u = -2z, at distance
// 2|z| >= 4 from the contour in the working range.
cplx k_laplace(int nu, cplx z) {
    const GaussRule& gh = gauss_hermite(kHermiteOrder);
    const cplx inv2z = 0.5 / z;
    cplx acc = 0.0;
    for (int i = 0; i < kHermiteOrder; ++i) {
        const double t2 = gh.nodes[i] * gh.nodes[i];
        const cplx base = 1.0 + t2 * inv2z;
        cplx f;
        switch (nu) {
            case 0: f = 1.0 / std::sqrt(base); break;
            case 1: f = t2 * std::sqrt(base); break;
            default: f = t2 * t2 * base * std::sqrt(base); break;
        }
        acc += gh.weights[i] * f;
    }
    static const double norm[3] = {1.0 / std::sqrt(M_PI),
                                   2.0 / std::sqrt(M_PI),
                                   4.0 / (3.0 * std::sqrt(M_PI))};
    return std::sqrt(0.5 * M_PI / z) * std::exp(-z) * norm[nu] * acc;
}

}  // namespace

cplx bessel_k(int nu, cplx z) {
    if (nu < 0 || nu > 2) throw std::domain_error("bessel_k: nu not in {0,1,2}");
    if (!(z.real() > 0.0)) throw std::domain_error("bessel_k: Re z <= 0");
    if (std::abs(z) <= kSeriesRadius) {
        switch (nu) {
            case 0: return k0_series(z);
            case 1: return k1_series(z);
            default: return k0_series(z) + 2.0 * k1_series(z) / z;
        }
    }
    return k_laplace(nu, z);
}

cplx bessel_i(int nu, cplx z) {
    if (nu == 0) return i0_series(z);
    if (nu == 1) return i1_series(z);
    throw std::domain_error("bessel_i: nu not in {0,1}");
}

cplx k0_smooth_remainder(cplx z) {
    // K0(z) + log(z) I0(z); entire.  Valid where the series is used
    // (near-diagonal quadrature arguments, |z| small).
    const cplx q = 0.25 * z * z;
    cplx term = 1.0, sum = 0.0;
    double h = 0.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / double(k * k);
        h += 1.0 / k;
        sum += term * h;
        if (std::abs(term) * (h + 1) < 1e-18 * (std::abs(sum) + 1)) break;
    }
    return (std::log(2.0) - kEulerGamma) * i0_series(z) + sum;
}

cplx oracle_k(int nu, cplx z) {
    if (!(z.real() > 1e-8))
        throw std::domain_error("oracle_k: Re z too small for convergence");
    // truncate where the integrand has dropped by e^{-45} relative to
    // its value at t = 0
    const double big = 45.0 + std::abs(std::log(std::abs(z)));
    const double T = std::acosh(1.0 + big / z.real());
    const double scale = std::exp(-z.real());
    auto re = [&](double t) {
        return (std::exp(-z * std::cosh(t)) * std::cosh(nu * t)).real();
    };
    auto im = [&](double t) {
        return (std::exp(-z * std::cosh(t)) * std::cosh(nu * t)).imag();
    };
    const double vr =
        integrate_adaptive(re, 0.0, T, 1e-13, 1e-14 * scale, 48);
    const double vi =
        integrate_adaptive(im, 0.0, T, 1e-13, 1e-14 * scale, 48);
    return {vr, vi};
}

}  // namespace lqw::bessel
