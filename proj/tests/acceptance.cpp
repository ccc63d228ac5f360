// Acceptance suite: one pass/fail line per criterion, tolerances pinned
// below.  Exit status is the number of failed criteria.
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lqw/bessel.hpp"
#include "lqw/bump.hpp"
#include "lqw/config.hpp"
#include "lqw/curve.hpp"
#include "lqw/grid.hpp"
#include "lqw/kernel.hpp"
#include "lqw/lap.hpp"
#include "lqw/quasimode.hpp"
#include "lqw/report.hpp"
#include "lqw/spectrum.hpp"
#include "lqw/wave.hpp"

using namespace lqw;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int idx, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", idx, pass ? "pass" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

curve::BendingProfile bump_profile(double theta) {
    curve::BendingProfile p;
    p.family = curve::ProfileFamily::gaussian_bump;
    p.theta = theta;
    p.sigma = 1.0;
    return p;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// 1. Straight line: largest eigenvalue of alpha R0(i kappa) equals
//    alpha/(2 kappa), within 1e-3 relative at N = 800, L = 200/alpha.
void criterion1() {
    const double alpha = 1.0, tol = 1e-3;
    curve::Curve line = curve::build_curve(bump_profile(0.0), 200.0 / alpha);
    // order 6 keeps the panels narrow enough for the kappa = 2 alpha
    // kernel at this node budget
    auto grid = kernel::make_grid(200.0 / alpha, 800, 6);
    double worst = 0.0;
    for (double kappa : {0.5 * alpha, alpha, 2.0 * alpha}) {
        const double mu = spectrum::bs_max_eigenvalue(line, alpha, kappa, grid);
        const double ref = alpha / (2.0 * kappa);
        worst = std::max(worst, std::abs(mu - ref) / ref);
    }
    verdict(1, worst < tol,
            "line Birman-Schwinger eigenvalue: max rel err " + fmt(worst) +
                " (tol " + fmt(tol) + ")");
}

// 2. No bound state for the line, exactly one for the theta = 0.5
//    bump, stable to 1e-6 relative between N and 2N grids.
void criterion2() {
    const double tol = 1e-6;
    curve::Curve line = curve::build_curve(bump_profile(0.0), 30.0);
    auto none = spectrum::find_discrete_eigenvalues(line, 1.0);

    curve::Curve c = curve::build_curve(bump_profile(0.5), 30.0);
    auto coarse = spectrum::find_discrete_eigenvalues(c, 1.0);
    spectrum::SolverOptions fine;
    fine.panel_width = 0.25;  // doubles the node count
    auto refined = spectrum::find_discrete_eigenvalues(c, 1.0, fine);

    bool pass = !none.found() && coarse.eigenvalues.size() == 1 &&
                refined.eigenvalues.size() == 1;
    double drift = 1.0;
    if (pass) {
        drift = std::abs(refined.eigenvalues[0] - coarse.eigenvalues[0]) /
                std::abs(refined.eigenvalues[0]);
        pass = drift < tol;
    }
    verdict(2, pass,
            "line: " + std::to_string(none.eigenvalues.size()) +
                " eigenvalue(s); bump: " +
                std::to_string(coarse.eigenvalues.size()) +
                ", N vs 2N drift " + fmt(drift) + " (tol " + fmt(tol) + ")");
}

// 3. beta^4 asymptotics: ratio negative, within 25% of -(iint A)^2,
//    with the discrepancy shrinking as beta decreases.
void criterion3() {
    const double tol = 0.25;
    // theta = 1.5: at small bending amplitudes the beta^4 agreement is
    // already at the eigensolver noise floor (gaps ~1e-8), which buries
    // the beta -> 0 improvement; the stronger profile lifts the
    // next-order correction above that floor
    auto fit = spectrum::beta4_fit(bump_profile(1.5), 1.0,
                                   {0.10, 0.15, 0.20});
    bool pass = fit.rows.size() == 3 && fit.predicted_coeff < 0.0;
    double worst = 0.0;
    std::vector<double> errs;
    for (const auto& r : fit.rows) {
        pass = pass && r.ok && r.ratio < 0.0;
        const double err =
            std::abs(r.ratio - fit.predicted_coeff) / -fit.predicted_coeff;
        errs.push_back(err);
        worst = std::max(worst, err);
    }
    pass = pass && worst < tol;
    // rows are beta-ascending: the smallest beta must sit closest
    if (errs.size() == 3) pass = pass && errs[0] <= errs[2];
    verdict(3, pass,
            "beta^4 ratio vs -(iint A)^2: max rel err " + fmt(worst) +
                " (tol " + fmt(tol) + "), shrinking toward small beta");
}

// 4. LAP stability: 60-cell lambda grid on [-0.20, -0.05], Im matrix
//    elements move < 5% between eps = 1e-3 and 1e-4 on non-candidate
//    cells; candidates isolated and stable across grid resolutions.
void criterion4() {
    const double tol = 0.05;
    curve::Curve c = curve::build_curve(bump_profile(0.5), 30.0);
    auto grid = kernel::make_grid(30.0, 360, 8);
    bump::Bump phi;
    auto scan = lap::lap_scan(c, 1.0, phi, -0.20, -0.05, grid, 60,
                              {1e-3, 1e-4});
    auto sing = lap::detect_singular_set(c, 1.0, -0.20, -0.05, grid, 60);
    const double cell_w = 0.15 / 60.0;
    auto near_candidate = [&](double lambda) {
        for (double cand : sing.candidates)
            if (std::abs(lambda - cand) <= 1.5 * cell_w) return true;
        return false;
    };
    double worst = 0.0;
    bool pass = true;
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i) {
        if (near_candidate(scan.lambdas[i])) continue;
        const double a = scan.cell(i, 0).im_value;
        const double b = scan.cell(i, 1).im_value;
        pass = pass && !scan.cell(i, 1).flagged;
        worst = std::max(worst, std::abs(b - a) / std::abs(b));
    }
    pass = pass && worst < tol;
    // isolation: pairwise candidate separation of at least two cells
    for (std::size_t i = 1; i < sing.candidates.size(); ++i)
        pass = pass &&
               sing.candidates[i] - sing.candidates[i - 1] > 2.0 * cell_w;
    // grid stability: the finer Nystrom grid reproduces the candidates
    auto grid2 = kernel::make_grid(30.0, 480, 8);
    auto sing2 = lap::detect_singular_set(c, 1.0, -0.20, -0.05, grid2, 60);
    pass = pass && sing.candidates.size() == sing2.candidates.size();
    for (std::size_t i = 0;
         i < std::min(sing.candidates.size(), sing2.candidates.size()); ++i)
        pass = pass &&
               std::abs(sing.candidates[i] - sing2.candidates[i]) <= cell_w;
    verdict(4, pass,
            "LAP eps ladder 1e-3 -> 1e-4: max Im drift " + fmt(worst) +
                " (tol " + fmt(tol) + "), " +
                std::to_string(sing.candidates.size()) +
                " candidate(s), grid-stable");
}

// 5. Quasi-mode residual drops >= 40% under the window ladder
//    (s0, L1, L2) -> (2 s0, 4 L1, 2 L2); curvature residuals vanish
//    identically on the line.
void criterion5() {
    const double required_drop = 0.40;
    curve::Curve c = curve::build_curve(bump_profile(0.5), 48.0);
    bool pass = true;
    double least_drop = 1.0;
    for (double k : {0.1, 0.3, 0.6}) {
        auto base = quasimode::build_quasimode(c, 1.0, k, 2.0, 8.0, 4.0);
        auto wide = quasimode::build_quasimode(c, 1.0, k, 4.0, 32.0, 8.0);
        const double r0 = quasimode::residual_ratio(base, c, 1.0, k).ratio;
        const double r1 = quasimode::residual_ratio(wide, c, 1.0, k).ratio;
        least_drop = std::min(least_drop, 1.0 - r1 / r0);
    }
    pass = least_drop >= required_drop;

    curve::Curve line = curve::build_curve(bump_profile(0.0), 48.0);
    for (double s : {2.5, 5.0, 9.5})
        for (double t : {-4.5, -0.3, 1.7}) {
            auto f = quasimode::residual_fields(line, 1.0, 0.3, 2.0, 8.0,
                                                4.0, s, t);
            pass = pass && f.psi1 == cplx(0.0) && f.psi2 == cplx(0.0);
        }
    verdict(5, pass,
            "quasi-mode ladder: smallest residual drop " + fmt(least_drop) +
                " (need >= " + fmt(required_drop) +
                "); line curvature residuals identically zero");
}

// 6. Macdonald suite: integral-representation oracle within 1e-9 on a
//    40-point complex grid, Wronskian within 1e-9, and the
//    |K_nu(z)| <= K_nu(Re z) inequality on 1e4 random samples.
void criterion6() {
    const double tol = 1e-9;
    std::vector<cplx> pts;
    for (double r : {0.2, 0.4, 0.8, 1.5, 3.0, 5.0, 8.0, 12.0})
        for (double th : {-1.1, -0.55, 0.0, 0.55, 1.1})
            pts.push_back(r * std::exp(cplx(0.0, th)));
    double worst_oracle = 0.0, worst_wronskian = 0.0;
    for (cplx z : pts) {
        for (int nu : {0, 1, 2}) {
            const cplx ref = bessel::oracle_k(nu, z);
            worst_oracle =
                std::max(worst_oracle,
                         std::abs(bessel::bessel_k(nu, z) - ref) /
                             std::abs(ref));
        }
        const cplx w = bessel::bessel_i(0, z) * bessel::bessel_k(1, z) +
                       bessel::bessel_i(1, z) * bessel::bessel_k(0, z);
        worst_wronskian = std::max(worst_wronskian, std::abs(w * z - 1.0));
    }
    std::mt19937 rng(271828);
    std::uniform_real_distribution<double> re(0.05, 10.0), im(-10.0, 10.0);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const cplx z(re(rng), im(rng));
        const int nu = i % 3;
        // 1e-12 relative slack absorbs evaluation roundoff only
        if (std::abs(bessel::bessel_k(nu, z)) >
            bessel::bessel_k(nu, cplx(z.real(), 0.0)).real() *
                (1.0 + 1e-12))
            ++violations;
    }
    const bool pass = worst_oracle < tol && worst_wronskian < tol &&
                      violations == 0;
    verdict(6, pass,
            "Macdonald: oracle err " + fmt(worst_oracle) + ", Wronskian err " +
                fmt(worst_wronskian) + " (tol " + fmt(tol) + "), " +
                std::to_string(violations) + " inequality violation(s)");
}

// 7. Weighted HS norm of the kernel difference at delta = 3.5: zero on
//    the line, finite and < 1% drift under L -> 2L for the bump.
void criterion7() {
    const double tol = 0.01;
    auto k = kernel::SpectralParameter::from_k(cplx(0.0, 1.0));
    curve::Curve line = curve::build_curve(bump_profile(0.0), 30.0);
    auto g30 = kernel::make_grid(30.0, 360, 8);
    const double line_norm = kernel::weighted_hs_norm(line, k, 3.5, g30);

    curve::Curve c = curve::build_curve(bump_profile(0.5), 60.0);
    bool div30 = false, div60 = false;
    const double v30 = kernel::weighted_hs_norm(c, k, 3.5, g30, &div30);
    auto g60 = kernel::make_grid(60.0, 720, 8);
    const double v60 = kernel::weighted_hs_norm(c, k, 3.5, g60, &div60);
    const double drift = std::abs(v60 - v30) / v60;
    const bool pass = line_norm < 1e-14 && std::isfinite(v60) && !div30 &&
                      !div60 && v60 > 0.0 && drift < tol;
    verdict(7, pass,
            "weighted HS norm: line " + fmt(line_norm) + ", bump " +
                fmt(v60) + " with L -> 2L drift " + fmt(drift) + " (tol " +
                fmt(tol) + ")");
}

// 8. Scattering diagnostics: projector idempotent/self-adjoint to
//    1e-9, remainder-kernel contraction at the reported kappa with the
//    convolution-power inequality, five stable trace bounds for the
//    bump, and a uniformly bounded scaled decay norm on [1, 100].
void criterion8() {
    const double ptol = 1e-9;
    // x2 window 26 keeps the truncated phi0 mass within 1e-11 of 1,
    // so idempotence is limited only by arithmetic
    auto grid = wave::make_separable_grid(400.0, 1024, 26.0, 12);
    std::mt19937 rng(314159);
    std::normal_distribution<double> nd;
    auto rand_state = [&]() {
        wave::SeparableFunction s;
        s.f1.resize(grid.n);
        for (int i = 0; i < grid.n; ++i) s.f1[i] = cplx(nd(rng), nd(rng));
        s.f2.resize(grid.x2_nodes.size());
        for (std::size_t i = 0; i < grid.x2_nodes.size(); ++i)
            s.f2[static_cast<Eigen::Index>(i)] = cplx(nd(rng), nd(rng));
        return s;
    };
    auto inner = [&](const wave::SeparableFunction& a,
                     const wave::SeparableFunction& b) {
        cplx s2 = 0.0;
        for (std::size_t i = 0; i < grid.x2_nodes.size(); ++i)
            s2 += grid.x2_weights[i] *
                  std::conj(a.f2[static_cast<Eigen::Index>(i)]) *
                  b.f2[static_cast<Eigen::Index>(i)];
        return (a.f1.adjoint() * b.f1)(0) * grid.dx * s2;
    };
    double idem = 0.0, adj = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
        auto psi = rand_state();
        auto chi = rand_state();
        auto p1 = wave::projector_apply(grid, psi, 1.0);
        auto p2 = wave::projector_apply(grid, p1.projected, 1.0);
        idem = std::max(
            idem, (p2.projected.f1 - p1.projected.f1).norm() /
                      (1.0 + p1.projected.f1.norm()));
        idem = std::max(
            idem, (p2.projected.f2 - p1.projected.f2).norm() /
                      (1.0 + p1.projected.f2.norm()));
        auto pc = wave::projector_apply(grid, chi, 1.0);
        const cplx lhs = inner(p1.projected, chi);
        const cplx rhs = inner(psi, pc.projected);
        adj = std::max(adj, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
    }
    bool pass = idem < ptol && adj < ptol;

    // contraction threshold: kappa = 2 works, kappa = 1 must refuse
    bool threshold_ok = false;
    try {
        auto kn = wave::neumann_tail(1.0, 2.0, 0.9);
        threshold_ok = kn.k1_h1 < 1.0;
        double bound = kn.k1_h1;
        for (std::size_t m = 1; m < kn.power_h1.size(); ++m) {
            bound *= kn.k1_h1;
            threshold_ok =
                threshold_ok && kn.power_h1[m] <= bound * (1.0 + 1e-10);
        }
    } catch (const std::exception&) {
    }
    try {
        wave::neumann_tail(1.0, 1.0, 0.9);
        threshold_ok = false;  // must throw below the threshold
    } catch (const std::invalid_argument&) {
    }
    pass = pass && threshold_ok;

    curve::Curve c = curve::build_curve(bump_profile(0.5), 30.0);
    auto g1d = kernel::make_grid(30.0, 360, 8);
    auto tb = wave::trace_bound_integrals(c, 1.0, 4.0, g1d);
    bool bounds_ok = tb.ops.size() == 5;
    for (const auto& op : tb.ops)
        bounds_ok = bounds_ok && std::isfinite(op.value) && op.stable;
    pass = pass && bounds_ok;

    auto table = wave::free_decay(0.1, 0.4, 1.0, {1, 2, 5, 10, 20, 50, 100});
    // frozen envelope constant 0.08 in (c / 2 sqrt 6) eps1^{-3/2}
    const double decay_bound =
        0.08 / (2.0 * std::sqrt(6.0)) * std::pow(0.1, -1.5);
    bool decay_ok = table.sup_scaled <= decay_bound;
    for (const auto& row : table.rows) decay_ok = decay_ok && row.quadrature_ok;
    pass = pass && decay_ok;

    verdict(8, pass,
            "projector idem/adj " + fmt(idem) + "/" + fmt(adj) +
                " (tol 1e-09); kernel contraction at kappa=2 " +
                (threshold_ok ? "ok" : "BAD") + "; trace bounds " +
                (bounds_ok ? "stable" : "BAD") + "; sup t^{3/2}||phi|| " +
                fmt(table.sup_scaled) + " <= " + fmt(decay_bound));
}

// 9. Determinism: two `all` runs of the same configuration produce
//    byte-identical CSV bodies.
void criterion9() {
    const fs::path base = fs::temp_directory_path() / "lqw_acceptance";
    fs::remove_all(base);
    config::RunConfig cfg;
    cfg.profile = bump_profile(0.5);
    cfg.truncation = 25.0;
    cfg.grid_n = 240;
    cfg.lambda_min = -0.14;
    cfg.lambda_max = -0.12;
    cfg.lambda_cells = 4;
    cfg.eps_ladder = {1e-2, 1e-3};
    cfg.betas = {0.2};
    cfg.qm_ks = {0.3};
    cfg.decay_times = {1, 10, 100};
    cfg.pipelines = config::pipeline_order();

    cfg.out_dir = (base / "run1").string();
    auto r1 = report::run_pipelines(cfg);
    cfg.out_dir = (base / "run2").string();
    auto r2 = report::run_pipelines(cfg);

    bool pass = r1.all_ok && r2.all_ok &&
                r1.artifacts.size() == r2.artifacts.size();
    int csv_count = 0;
    for (std::size_t i = 0; pass && i < r1.artifacts.size(); ++i) {
        pass = r1.artifacts[i].name == r2.artifacts[i].name;
        if (!pass) break;
        if (r1.artifacts[i].name.size() < 4 ||
            r1.artifacts[i].name.substr(r1.artifacts[i].name.size() - 4) !=
                ".csv")
            continue;
        ++csv_count;
        auto slurp = [&](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        pass = slurp(base / "run1" / r1.artifacts[i].name) ==
               slurp(base / "run2" / r2.artifacts[i].name);
    }
    pass = pass && csv_count >= 3;
    fs::remove_all(base);
    verdict(9, pass,
            "rerun of `all`: " + std::to_string(csv_count) +
                " CSV artifact(s) byte-identical");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::printf("%d of 9 criteria failed\n", g_failures);
    return g_failures;
}
