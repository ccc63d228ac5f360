#include "lqw/quasimode.hpp"

#include <cmath>
#include <stdexcept>

#include "lqw/quadrature.hpp"

namespace lqw::quasimode {

double cutoff(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double f = std::exp(-1.0 / x);
    const double g = std::exp(-1.0 / (1.0 - x));
    return f / (f + g);
}

double cutoff_d1(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double f = std::exp(-1.0 / x);
    const double g = std::exp(-1.0 / (1.0 - x));
    const double fp = f / (x * x);
    const double gp = -g / ((1.0 - x) * (1.0 - x));
    const double u = f + g;
    return (fp * g - f * gp) / (u * u);
}

double cutoff_d2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double y = 1.0 - x;
    const double f = std::exp(-1.0 / x);
    const double g = std::exp(-1.0 / y);
    const double fp = f / (x * x);
    const double gp = -g / (y * y);
    const double fpp = f * (1.0 / (x * x * x * x) - 2.0 / (x * x * x));
    const double gpp = g * (1.0 / (y * y * y * y) - 2.0 / (y * y * y));
    const double u = f + g;
    const double up = fp + gp;
    const double num = fp * g - f * gp;
    return ((fpp * g - f * gpp) * u - 2.0 * up * num) / (u * u * u);
}

namespace {

struct C2 {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

C2 profile(double x) { return {cutoff(x), cutoff_d1(x), cutoff_d2(x)}; }

// theta1: ramps 0 -> 1 over [s0-1, s0], back down over [s0+L1, s0+L1+1]
C2 theta1(double s, double s0, double l1) {
    if (s <= s0 + l1) return profile(s - s0 + 1.0);
    C2 c = profile(s0 + l1 + 1.0 - s);
    return {c.v, -c.d1, c.d2};
}

// theta2: same in t over [-L2-1, -L2] and [L2, L2+1]
C2 theta2(double t, double l2) {
    if (t <= l2) return profile(t + l2 + 1.0);
    C2 c = profile(l2 + 1.0 - t);
    return {c.v, -c.d1, c.d2};
}

// composite Gauss grid over [a, b] with ~unit panels; optionally force
// a panel break at zero so no node straddles the |t| kink
void unit_panels(double a, double b, int order, bool split_zero,
                 std::vector<double>& nodes, std::vector<double>& weights) {
    const GaussRule& gl = gauss_legendre(order);
    std::vector<std::pair<double, double>> spans;
    if (split_zero && a < 0.0 && b > 0.0) {
        spans = {{a, 0.0}, {0.0, b}};
    } else {
        spans = {{a, b}};
    }
    for (auto [lo, hi] : spans) {
        const int np = std::max(1, static_cast<int>(std::ceil(hi - lo - 1e-9)));
        const double w = (hi - lo) / np;
        for (int p = 0; p < np; ++p) {
            const double c = lo + (p + 0.5) * w;
            for (int g = 0; g < order; ++g) {
                nodes.push_back(c + 0.5 * w * gl.nodes[g]);
                weights.push_back(0.5 * w * gl.weights[g]);
            }
        }
    }
}

// envelope constant, fitted once on the straight line (where the
// residual is pure cutoff leakage) and frozen.  The fit saturates
// near 8 as L1 grows (cutoff-ramp norm over the two-sided lower
// bound), so 10 leaves margin; checked for alpha in [0.5, 1.2] and
// |k| <= 1, which is where the tests exercise it.
constexpr double kEnvelopeC = 10.0;

}  // namespace

QuasiMode build_quasimode(const curve::Curve& curve, double alpha,
                          double k, double s0, double l1, double l2,
                          int order) {
    if (!(alpha > 0.0) || !(l1 > 0.0) || !(l2 > 0.0))
        throw std::invalid_argument(
            "build_quasimode: need alpha, L1, L2 > 0");
    if (order < 4 || order > 48)
        throw std::invalid_argument("build_quasimode: order out of range");

    const double cap = 1.0 / (2.0 * (l2 + 1.0));
    const double reach = curve.truncation();

    // march s0 outward until the curvature tail fits under the
    // coordinate-validity cap
    auto tail_sups = [&](double from, double* dsup) {
        double sup = 0.0, sup_d = 0.0;
        for (double s = from; s <= reach; s += 0.05) {
            sup = std::max(sup, std::abs(curve.curvature(s)));
            sup_d = std::max(sup_d, std::abs(curve.curvature_deriv(s)));
        }
        if (dsup) *dsup = sup_d;
        return sup;
    };
    double s0m = s0;
    double k1sup = 0.0;
    while (true) {
        if (s0m + l1 + 1.0 > reach)
            throw std::runtime_error(
                "build_quasimode: no admissible s0 inside the curve "
                "window (curvature tail does not fit under "
                "1/(2(L2+1)))");
        if (tail_sups(s0m - 1.0, &k1sup) <= cap) break;
        s0m += 1.0;
    }

    QuasiMode mode;
    mode.s0 = s0m;
    mode.l1 = l1;
    mode.l2 = l2;
    mode.k = k;
    mode.alpha = alpha;
    mode.curv_sup = tail_sups(s0m - 1.0, &k1sup);
    mode.curv_deriv_sup = k1sup;

    unit_panels(s0m - 1.0, s0m + l1 + 1.0, order, false, mode.s_nodes,
                mode.s_weights);
    unit_panels(-l2 - 1.0, l2 + 1.0, order, true, mode.t_nodes,
                mode.t_weights);

    const auto ns = static_cast<Eigen::Index>(mode.s_nodes.size());
    const auto nt = static_cast<Eigen::Index>(mode.t_nodes.size());
    mode.psi.resize(ns, nt);
    mode.jacobian.resize(ns, nt);
    double nsq = 0.0;
    for (Eigen::Index i = 0; i < ns; ++i) {
        const double s = mode.s_nodes[i];
        const double kap = curve.curvature(s);
        const double th1 = theta1(s, s0m, l1).v;
        const cplx es = std::exp(cplx(0.0, k * s));
        for (Eigen::Index j = 0; j < nt; ++j) {
            const double t = mode.t_nodes[j];
            const double jac = 1.0 - t * kap;
            if (!(jac > 0.0))
                throw std::logic_error(
                    "build_quasimode: coordinate Jacobian not positive");
            mode.jacobian(i, j) = jac;
            const cplx v = std::exp(-0.5 * alpha * std::abs(t)) * es *
                           th1 * theta2(t, l2).v;
            mode.psi(i, j) = v;
            nsq += mode.s_weights[i] * mode.t_weights[j] *
                   std::norm(v) * std::abs(jac);
        }
    }
    mode.norm_sq = nsq;
    mode.norm_lower_bound =
        l1 * (1.0 - std::exp(-alpha * l2)) / alpha;
    return mode;
}

ResidualFields residual_fields(const curve::Curve& curve, double alpha,
                               double k, double s0, double l1, double l2,
                               double s, double t) {
    const double kap = curve.curvature(s);
    const double kap_p = curve.curvature_deriv(s);
    const double d = 1.0 / (1.0 - t * kap);
    const double sgn = (t > 0.0) ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    const C2 th1 = theta1(s, s0, l1);
    const C2 th2 = theta2(t, l2);
    const cplx env =
        std::exp(-0.5 * alpha * std::abs(t)) * std::exp(cplx(0.0, k * s));
    const cplx ik(0.0, k);

    ResidualFields out;
    out.psi = env * th1.v * th2.v;
    out.psi1 = k * k * (d * d - 1.0) * out.psi;
    out.psi2 = -(ik * t * kap_p * d * d * d +
                 0.5 * alpha * kap * d * sgn) *
               out.psi;
    out.psi3 = ((alpha * sgn + kap * d) * th2.d1 - th2.d2) * env * th1.v;
    out.psi4 = -d * d *
               ((2.0 * ik + t * kap_p * d) * th1.d1 + th1.d2) * env *
               th2.v;
    return out;
}

ResidualReport residual_ratio(const QuasiMode& mode,
                              const curve::Curve& curve, double alpha,
                              double k) {
    ResidualReport rep;
    rep.k0 = mode.curv_sup;
    rep.k1 = mode.curv_deriv_sup;

    double n1 = 0.0, n2 = 0.0, n3 = 0.0, n4 = 0.0, ntot = 0.0;
    for (std::size_t i = 0; i < mode.s_nodes.size(); ++i)
        for (std::size_t j = 0; j < mode.t_nodes.size(); ++j) {
            const auto f = residual_fields(curve, alpha, k, mode.s0,
                                           mode.l1, mode.l2,
                                           mode.s_nodes[i],
                                           mode.t_nodes[j]);
            const double w = mode.s_weights[i] * mode.t_weights[j] *
                             std::abs(mode.jacobian(i, j));
            n1 += w * std::norm(f.psi1);
            n2 += w * std::norm(f.psi2);
            n3 += w * std::norm(f.psi3);
            n4 += w * std::norm(f.psi4);
            ntot += w * std::norm(f.total());
        }
    rep.norm1 = std::sqrt(n1);
    rep.norm2 = std::sqrt(n2);
    rep.norm3 = std::sqrt(n3);
    rep.norm4 = std::sqrt(n4);
    rep.norm_psi = std::sqrt(mode.norm_sq);
    rep.ratio = std::sqrt(ntot) / rep.norm_psi;

    const double el2 = std::exp(-alpha * mode.l2);
    rep.bound = kEnvelopeC *
                ((rep.k0 + rep.k1 + std::exp(-0.5 * alpha * mode.l2)) *
                     std::sqrt(mode.l1 + 2.0) +
                 1.0 + rep.k1) /
                std::sqrt(mode.l1 * (1.0 - el2));
    rep.within_bound = rep.ratio <= rep.bound;
    return rep;
}

}  // namespace lqw::quasimode
