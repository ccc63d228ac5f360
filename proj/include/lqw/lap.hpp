#pragma once

#include <complex>
#include <vector>

#include "lqw/bump.hpp"
#include "lqw/curve.hpp"
#include "lqw/kernel.hpp"

namespace lqw::lap {

using cplx = std::complex<double>;

/// Fourier multiplier of the inverse straight-line Birman-Schwinger
/// operator, in its direct form
///     A(k,p) = 2 q / (2 q - alpha),   q = sqrt(p^2 - k^2), Re q > 0,
/// and as the pole-pair decomposition
///     (alpha^2 / 4 p0) (1/(p - p0) - 1/(p + p0)) + 1
///         + alpha / (2 q + alpha),     p0 = sqrt(k^2 + alpha^2/4),
/// which isolates the only singularities at p = +-p0 (Re p0 > 0).
struct MultiplierA {
    cplx value;              // direct form
    cplx decomposed;         // pole pair + 1 + regular remainder
    double mismatch = 0.0;   // |value - decomposed|
    bool pole_near = false;  // |p -+ p0| < 1e-8: both forms unreliable
};

MultiplierA multiplier_a(const kernel::SpectralParameter& k, double p,
                         double alpha);

/// Closed-form range of k = k1 + i k2 = sqrt(lambda + i eps) over
/// lambda in [lambda1, lambda2] subset of (-alpha^2/4, 0) and
/// eps in (0, eps0]:  k1 in (0, b],  k2 in [k20, k21].
struct WindowBounds {
    double b = 0.0;
    double k20 = 0.0;
    double k21 = 0.0;
};

WindowBounds window_bounds(double lambda1, double lambda2, double eps0);

struct LapCell {
    double lambda = 0.0;
    double eps = 0.0;
    double im_value = 0.0;  // Im (phi, (H - lambda - i eps)^{-1} phi)
    double cond = 0.0;      // condition of I - alpha R_mm(k)
    bool flagged = false;   // near-singular solve (condition above cap)
};

enum class CauchyStatus {
    converged,  // successive eps differences contract (ratio <= 0.5)
    failed,     // some rung expands beyond the contraction bound
    skipped     // a flagged solve in the column: no verdict
};

struct LapScan {
    std::vector<double> lambdas;     // cell centers, increasing
    std::vector<double> eps_ladder;  // strictly decreasing, positive
    std::vector<LapCell> cells;      // lambda-major, ladder within
    std::vector<CauchyStatus> cauchy;     // per lambda column
    std::vector<char> near_endpoint;      // lambda within 2% of the
                                          // essential-band endpoints:
                                          // verdict inconclusive
    WindowBounds bounds;             // for the full eps range used
    double max_abs_im = 0.0;         // sup of |Im| over unflagged cells
    double min_im = 0.0;             // most negative Im seen (>= 0 up
                                     // to solver tolerance)

    const LapCell& cell(std::size_t i_lambda, std::size_t j_eps) const {
        return cells[i_lambda * eps_ladder.size() + j_eps];
    }
};

std::vector<double> default_eps_ladder();

/// Boundary-value probe of lambda -> (phi, (H - lambda - i0)^{-1} phi)
/// on [lambda1, lambda2] subset of (-alpha^2/4, 0): for each of the
/// `cells` midpoints the matrix element is evaluated down the eps
/// ladder and the column is checked for Cauchy contraction, the
/// numerical signature of a finite boundary value.
LapScan lap_scan(const curve::Curve& curve, double alpha,
                 const bump::Bump& phi, double lambda1, double lambda2,
                 const kernel::Grid1D& grid, int cells = 60,
                 std::vector<double> eps_ladder = default_eps_ladder());

/// Candidate exceptional energies: lambda cells whose condition number
/// of I - alpha R_mm(sqrt(lambda + i eps)) spikes above
/// threshold x (window median).  Adjacent spiking cells are merged and
/// a minimum two-cell separation is enforced, so candidates come out
/// isolated.  Candidates are *possible* embedded eigenvalues, never
/// certified ones.
struct SingularSet {
    std::vector<double> candidates;      // at the main threshold
    std::vector<double> candidates_10x;  // sensitivity: looser gate
    std::vector<double> candidates_30x;  // sensitivity: tighter gate
    std::vector<double> lambdas;         // scan grid
    std::vector<double> conditions;      // per cell
    double median_cond = 0.0;
    double eps = 0.0;
    double threshold = 0.0;
};

SingularSet detect_singular_set(const curve::Curve& curve, double alpha,
                                double lambda1, double lambda2,
                                const kernel::Grid1D& grid, int cells = 60,
                                double eps = 1e-3, double threshold = 20.0);

}  // namespace lqw::lap
