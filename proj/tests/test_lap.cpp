#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "lqw/bump.hpp"
#include "lqw/curve.hpp"
#include "lqw/kernel.hpp"
#include "lqw/lap.hpp"

using namespace lqw;
using cplx = std::complex<double>;

namespace {

curve::BendingProfile gaussian(double theta) {
    curve::BendingProfile p;
    p.family = curve::ProfileFamily::gaussian_bump;
    p.theta = theta;
    p.sigma = 1.0;
    return p;
}

}  // namespace

TEST_CASE("multiplier forms agree away from the poles") {
    for (double lam : {-0.22, -0.12, -0.05})
        for (double eps : {1e-1, 1e-3, 1e-6})
            for (double p : {0.0, 0.3, 0.7, 1.3, 5.0}) {
                auto sp =
                    kernel::SpectralParameter::from_energy(cplx(lam, eps));
                auto a = lap::multiplier_a(sp, p, 1.0);
                CHECK(a.mismatch <=
                      1e-12 * (1.0 + std::abs(a.value)));
            }
}

TEST_CASE("multiplier limits") {
    auto sp = kernel::SpectralParameter::from_energy(cplx(-0.12, 1e-3));

    // no interaction: both forms collapse to 1 identically
    auto free = lap::multiplier_a(sp, 0.7, 0.0);
    CHECK(free.value == cplx(1.0, 0.0));
    CHECK(free.decomposed == cplx(1.0, 0.0));

    // high momentum: A -> 1; the deviation is exactly alpha/(2q -
    // alpha), i.e. the alpha/(2p) envelope times 1/(1 - alpha/(2p))
    auto far = lap::multiplier_a(sp, 1000.0, 1.0);
    CHECK(std::abs(far.value - 1.0) < 1.0 / (2.0 * 1000.0 - 1.0));
    CHECK_FALSE(far.pole_near);
}

TEST_CASE("multiplier pole flag at the boundary pole pair") {
    // eps = 0 boundary value: k = i sqrt(-lambda), p0 real
    const double lam = -0.12;
    auto sp = kernel::SpectralParameter::from_k(
        cplx(0.0, std::sqrt(-lam)));
    const double p0 = std::sqrt(lam + 0.25);
    CHECK(lap::multiplier_a(sp, p0, 1.0).pole_near);
    CHECK(lap::multiplier_a(sp, -p0 + 5e-9, 1.0).pole_near);
    CHECK_FALSE(lap::multiplier_a(sp, p0 + 1e-3, 1.0).pole_near);
}

TEST_CASE("multiplier blows up like 1/eps at the band edge") {
    // at k^2 = -alpha^2/4 + i eps and p = 0 the pole pair sits at
    // p0^2 = i eps, so |A| = alpha^2 / (2 eps) to leading order
    for (double eps : {1e-4, 1e-6, 1e-8}) {
        auto sp =
            kernel::SpectralParameter::from_energy(cplx(-0.25, eps));
        auto a = lap::multiplier_a(sp, 0.0, 1.0);
        CHECK(std::abs(a.value) * eps ==
              doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("multiplier rejects energies off the scan half-plane") {
    auto sp = kernel::SpectralParameter::from_energy(cplx(0.3, 0.2));
    CHECK_THROWS_AS(lap::multiplier_a(sp, 0.5, 1.0),
                    std::invalid_argument);
}

TEST_CASE("window bounds bracket the spectral parameter") {
    const double l1 = -0.20, l2 = -0.05, eps0 = 0.1;
    auto wb = lap::window_bounds(l1, l2, eps0);
    CHECK(wb.b == doctest::Approx(std::sqrt(
                      0.5 * (l2 + std::hypot(l2, eps0)))));
    CHECK(wb.k20 == doctest::Approx(std::sqrt(-l2)));
    CHECK(wb.k21 == doctest::Approx(std::sqrt(
                        0.5 * (-l1 + std::hypot(l1, eps0)))));
    CHECK(wb.b <= eps0 / (2.0 * std::sqrt(-l2)) + 1e-15);

    for (double lam : {l1, -0.11, l2})
        for (double eps : {eps0, 1e-2, 1e-4}) {
            const cplx k = std::sqrt(cplx(lam, eps));
            CHECK(k.real() > 0.0);
            CHECK(k.real() <= wb.b * (1.0 + 1e-12));
            CHECK(k.imag() >= wb.k20 * (1.0 - 1e-12));
            CHECK(k.imag() <= wb.k21 * (1.0 + 1e-12));
        }

    CHECK_THROWS_AS(lap::window_bounds(-0.05, -0.2, 0.1),
                    std::invalid_argument);
}

TEST_CASE("straight line boundary values stabilize down the ladder") {
    curve::Curve line = curve::build_curve(gaussian(0.0), 30.0);
    bump::Bump phi;
    auto grid = kernel::make_grid(30.0, 240, 8);
    std::vector<double> ladder = {1e-1, 1e-2, 1e-3, 3e-4, 1e-4};
    auto scan = lap::lap_scan(line, 1.0, phi, -0.14, -0.12, grid, 2,
                              ladder);

    REQUIRE(scan.lambdas.size() == 2);
    CHECK(scan.lambdas[0] == doctest::Approx(-0.135));
    for (auto st : scan.cauchy)
        CHECK(st == lap::CauchyStatus::converged);
    CHECK(scan.min_im >= -1e-10);
    for (const auto& cell : scan.cells) {
        CHECK_FALSE(cell.flagged);
        // the bent-part solve is trivial on the line: I - T = I
        CHECK(cell.cond == doctest::Approx(1.0).epsilon(1e-9));
    }

    // frozen boundary values (stable to ~1e-5 under window 25..60 and
    // node counts 150..480)
    CHECK(scan.cell(0, 4).im_value ==
          doctest::Approx(0.118084447265).epsilon(1e-6));
    CHECK(scan.cell(1, 4).im_value ==
          doctest::Approx(0.113110841372).epsilon(1e-6));

    // last two rungs move the value by well under 5%
    for (std::size_t i = 0; i < 2; ++i) {
        const double a = scan.cell(i, 2).im_value;
        const double b = scan.cell(i, 4).im_value;
        CHECK(std::abs(b - a) < 0.05 * std::abs(b));
    }

    // independent cross-check: at eps = 0.1 the plain dense solve is
    // still free of window resonances and must agree
    auto sp = kernel::SpectralParameter::from_energy(cplx(-0.135, 0.1));
    auto el = kernel::resolvent_matrix_element(line, 1.0, sp, phi, grid);
    CHECK(scan.cell(0, 0).im_value ==
          doctest::Approx(el.value.imag()).epsilon(5e-3));
}

TEST_CASE("bent curve scan: finite boundary values, clean conditions") {
    curve::Curve c = curve::build_curve(gaussian(0.5), 30.0);
    bump::Bump phi;
    auto grid = kernel::make_grid(30.0, 240, 8);
    std::vector<double> ladder = {1e-1, 1e-2, 1e-3, 3e-4, 1e-4};
    auto scan =
        lap::lap_scan(c, 1.0, phi, -0.14, -0.12, grid, 2, ladder);

    for (auto st : scan.cauchy)
        CHECK(st == lap::CauchyStatus::converged);
    CHECK(scan.min_im >= -1e-10);
    CHECK(scan.max_abs_im < 1.0);  // no 1/eps growth anywhere

    CHECK(scan.cell(0, 4).im_value ==
          doctest::Approx(0.115688203116).epsilon(1e-6));
    for (const auto& cell : scan.cells) {
        CHECK(cell.cond >= 1.0 - 1e-9);
        CHECK(cell.cond < 1.2);
    }

    auto sp = kernel::SpectralParameter::from_energy(cplx(-0.135, 0.1));
    auto el = kernel::resolvent_matrix_element(c, 1.0, sp, phi, grid);
    CHECK(scan.cell(0, 0).im_value ==
          doctest::Approx(el.value.imag()).epsilon(5e-3));
}

TEST_CASE("scan cells near the band edge are labeled inconclusive") {
    curve::Curve line = curve::build_curve(gaussian(0.0), 30.0);
    bump::Bump phi;
    auto grid = kernel::make_grid(30.0, 240, 8);
    auto scan = lap::lap_scan(line, 1.0, phi, -0.2499, -0.24, grid, 2,
                              {1e-3, 3e-4, 1e-4});
    CHECK(scan.near_endpoint[0] == 1);  // lambda ~ -0.2474
    CHECK(scan.near_endpoint[1] == 0);  // lambda ~ -0.2425
    // threshold effect: values grow toward the edge but stay finite
    CHECK(scan.cell(0, 2).im_value > scan.cell(1, 2).im_value);
    CHECK(std::isfinite(scan.cell(0, 2).im_value));
}

TEST_CASE("singular set is empty for line and gentle bend") {
    auto grid = kernel::make_grid(25.0, 150, 8);
    curve::Curve line = curve::build_curve(gaussian(0.0), 25.0);
    curve::Curve bent = curve::build_curve(gaussian(0.5), 25.0);

    auto s1 = lap::detect_singular_set(line, 1.0, -0.20, -0.05, grid, 12);
    CHECK(s1.candidates.empty());
    CHECK(s1.median_cond == doctest::Approx(1.0).epsilon(1e-9));

    auto s2 = lap::detect_singular_set(bent, 1.0, -0.20, -0.05, grid, 12);
    CHECK(s2.candidates.empty());
    CHECK(s2.candidates_10x.empty());
    CHECK(s2.candidates_30x.empty());
    CHECK(s2.lambdas.size() == 12);
    CHECK(s2.conditions.size() == 12);
    CHECK(s2.median_cond > 1.0);
    CHECK(s2.median_cond < 1.5);
    // the sensitivity gates are ordered: a looser gate can only add
    CHECK(s2.candidates_10x.size() >= s2.candidates.size());
    CHECK(s2.candidates.size() >= s2.candidates_30x.size());
}

TEST_CASE("scan input validation") {
    curve::Curve line = curve::build_curve(gaussian(0.0), 25.0);
    bump::Bump phi;
    auto grid = kernel::make_grid(25.0, 150, 8);

    CHECK_THROWS_AS(
        lap::lap_scan(line, 1.0, phi, -0.3, -0.05, grid, 4),  // below band
        std::invalid_argument);
    CHECK_THROWS_AS(
        lap::lap_scan(line, 1.0, phi, -0.05, -0.2, grid, 4),  // swapped
        std::invalid_argument);
    CHECK_THROWS_AS(lap::lap_scan(line, 1.0, phi, -0.2, -0.05, grid, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(lap::lap_scan(line, 1.0, phi, -0.2, -0.05, grid, 4,
                                  {1e-3, 1e-2}),  // not decreasing
                    std::invalid_argument);
    CHECK_THROWS_AS(lap::detect_singular_set(line, -1.0, -0.2, -0.05,
                                             grid, 4),
                    std::invalid_argument);
}
