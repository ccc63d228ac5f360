#include "lqw/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lqw/quadrature.hpp"

namespace lqw::curve {

namespace {

constexpr int kPanelOrder = 16;
constexpr double kPanelWidth = 0.5;

// Natural cubic spline through (s_i, phi_i); constant extension with
// zero derivatives outside the table.
struct Spline {
    std::vector<double> x, y, m;  // m = second derivatives at knots

    explicit Spline(const std::vector<double>& xs,
                    const std::vector<double>& ys)
        : x(xs), y(ys) {
        const int n = static_cast<int>(x.size());
        m.assign(n, 0.0);
        if (n < 3) return;
        // Thomas algorithm for the natural-spline tridiagonal system
        std::vector<double> sub(n, 0.0), dia(n, 0.0), sup(n, 0.0),
            rhs(n, 0.0);
        dia[0] = dia[n - 1] = 1.0;
        for (int i = 1; i + 1 < n; ++i) {
            const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
            sub[i] = h0 / 6.0;
            dia[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for (int i = 1; i < n; ++i) {
            const double w = sub[i] / dia[i - 1];
            dia[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[n - 1] = rhs[n - 1] / dia[n - 1];
        for (int i = n - 2; i >= 0; --i)
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / dia[i];
    }

    int segment(double s) const {
        const auto it = std::upper_bound(x.begin(), x.end(), s);
        int i = static_cast<int>(it - x.begin()) - 1;
        return std::clamp(i, 0, static_cast<int>(x.size()) - 2);
    }

    double value(double s) const {
        if (s <= x.front()) return y.front();
        if (s >= x.back()) return y.back();
        const int i = segment(s);
        const double h = x[i + 1] - x[i];
        const double a = (x[i + 1] - s) / h, b = (s - x[i]) / h;
        return a * y[i] + b * y[i + 1] +
               ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) *
                   (h * h) / 6.0;
    }

    double deriv(double s) const {
        if (s <= x.front() || s >= x.back()) return 0.0;
        const int i = segment(s);
        const double h = x[i + 1] - x[i];
        const double a = (x[i + 1] - s) / h, b = (s - x[i]) / h;
        return (y[i + 1] - y[i]) / h +
               ((3 * b * b - 1) * m[i + 1] - (3 * a * a - 1) * m[i]) * h /
                   6.0;
    }

    double deriv2(double s) const {
        if (s <= x.front() || s >= x.back()) return 0.0;
        const int i = segment(s);
        const double h = x[i + 1] - x[i];
        const double a = (x[i + 1] - s) / h, b = (s - x[i]) / h;
        return a * m[i] + b * m[i + 1];
    }
};

const Spline& table_spline(const BendingProfile& p) {
    // one spline per distinct table; tables are tiny, so a small cache
    // keyed by the data pointer is enough (profiles are copied by value
    // but the vectors share buffers only through the caller)
    thread_local std::vector<std::pair<const double*, Spline>> cache;
    const double* key = p.table_s.data();
    for (auto& e : cache)
        if (e.first == key) return e.second;
    cache.emplace_back(key, Spline(p.table_s, p.table_phi));
    return cache.back().second;
}

double wrap_angle(double a) {
    // reduce to (-pi, pi]
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

}  // namespace

ProfileFamily family_from_string(const std::string& name) {
    if (name == "gaussian_bump") return ProfileFamily::gaussian_bump;
    if (name == "smoothed_corner") return ProfileFamily::smoothed_corner;
    if (name == "custom_table") return ProfileFamily::custom_table;
    throw std::invalid_argument("unknown profile family: " + name);
}

std::string family_to_string(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::gaussian_bump: return "gaussian_bump";
        case ProfileFamily::smoothed_corner: return "smoothed_corner";
        default: return "custom_table";
    }
}

double BendingProfile::angle(double s) const {
    const double u = (s - center) / sigma;
    switch (family) {
        case ProfileFamily::gaussian_bump:
            return theta * std::exp(-u * u);
        case ProfileFamily::smoothed_corner:
            return 0.5 * theta * (1.0 + std::erf(u));
        default:
            return table_spline(*this).value(s);
    }
}

double BendingProfile::angle_deriv(double s) const {
    const double u = (s - center) / sigma;
    switch (family) {
        case ProfileFamily::gaussian_bump:
            return -2.0 * u / sigma * theta * std::exp(-u * u);
        case ProfileFamily::smoothed_corner:
            return theta / (sigma * std::sqrt(M_PI)) * std::exp(-u * u);
        default:
            return table_spline(*this).deriv(s);
    }
}

double BendingProfile::angle_deriv2(double s) const {
    const double u = (s - center) / sigma;
    switch (family) {
        case ProfileFamily::gaussian_bump:
            return theta * std::exp(-u * u) * (4.0 * u * u - 2.0) /
                   (sigma * sigma);
        case ProfileFamily::smoothed_corner:
            return -2.0 * u * theta / (sigma * sigma * std::sqrt(M_PI)) *
                   std::exp(-u * u);
        default:
            return table_spline(*this).deriv2(s);
    }
}

double BendingProfile::limit_plus() const {
    switch (family) {
        case ProfileFamily::gaussian_bump: return 0.0;
        case ProfileFamily::smoothed_corner: return theta;
        default: return table_phi.empty() ? 0.0 : table_phi.back();
    }
}

double BendingProfile::limit_minus() const {
    switch (family) {
        case ProfileFamily::gaussian_bump: return 0.0;
        case ProfileFamily::smoothed_corner: return 0.0;
        default: return table_phi.empty() ? 0.0 : table_phi.front();
    }
}

void BendingProfile::validate() const {
    if (!(sigma > 0.0))
        throw std::invalid_argument("profile: width sigma must be > 0");
    if (!(beta >= 0.0 && beta <= 1.0))
        throw std::invalid_argument("profile: beta must lie in [0,1]");
    if (family != ProfileFamily::custom_table) {
        if (!(theta > -M_PI && theta < M_PI))
            throw std::invalid_argument(
                "profile: theta must lie in (-pi, pi)");
    } else {
        if (table_s.size() < 2 || table_s.size() != table_phi.size())
            throw std::invalid_argument(
                "profile: custom table needs >= 2 matched samples");
        for (size_t i = 1; i < table_s.size(); ++i)
            if (!(table_s[i] > table_s[i - 1]))
                throw std::invalid_argument(
                    "profile: table arclengths must increase strictly");
    }
    // exclude anti-parallel limiting tangents (v+ = -v-)
    const double dphi =
        wrap_angle(beta * (limit_plus() - limit_minus()));
    if (std::abs(std::abs(dphi) - M_PI) < 1e-9)
        throw std::invalid_argument(
            "profile: limiting tangents are anti-parallel (U-shaped "
            "curve is outside the admissible class)");
}

Curve::Curve(BendingProfile profile, double truncation)
    : profile_(std::move(profile)), truncation_(truncation),
      panel_width_(kPanelWidth) {
    profile_.validate();
    if (!(truncation_ > 0.0))
        throw std::invalid_argument("curve: truncation must be > 0");
    // snap L to a whole number of panels
    const int half_panels =
        static_cast<int>(std::ceil(truncation_ / panel_width_));
    truncation_ = half_panels * panel_width_;

    // prefix_[j] = Gamma(-L + j * panel_width), Gamma(0) = 0
    const int n_bound = 2 * half_panels + 1;
    prefix_.assign(n_bound, Vec2::Zero());
    const GaussRule& gl = gauss_legendre(kPanelOrder);
    auto panel_step = [&](double a) {
        Vec2 d = Vec2::Zero();
        const double c = a + 0.5 * panel_width_, h = 0.5 * panel_width_;
        for (int i = 0; i < kPanelOrder; ++i) {
            const double phi =
                profile_.beta * profile_.angle(c + h * gl.nodes[i]);
            d += gl.weights[i] * Vec2(std::cos(phi), std::sin(phi));
        }
        return (h * d).eval();
    };
    const int mid = half_panels;  // index of s = 0
    for (int j = mid; j + 1 < n_bound; ++j)
        prefix_[j + 1] =
            prefix_[j] + panel_step(-truncation_ + j * panel_width_);
    for (int j = mid; j > 0; --j)
        prefix_[j - 1] =
            prefix_[j] - panel_step(-truncation_ + (j - 1) * panel_width_);

    frame_ = asymptotic_frame(*this, truncation_);
}

Vec2 Curve::point(double s) const {
    const double L = truncation_;
    if (s > L) return frame_.a_plus + s * frame_.v_plus;
    if (s < -L) return frame_.a_minus + s * frame_.v_minus;
    int j = static_cast<int>(std::floor((s + L) / panel_width_));
    j = std::clamp(j, 0, static_cast<int>(prefix_.size()) - 2);
    const double a = -L + j * panel_width_;
    if (s == a) return prefix_[j];
    const GaussRule& gl = gauss_legendre(kPanelOrder);
    const double c = 0.5 * (a + s), h = 0.5 * (s - a);
    Vec2 d = Vec2::Zero();
    for (int i = 0; i < kPanelOrder; ++i) {
        const double phi =
            profile_.beta * profile_.angle(c + h * gl.nodes[i]);
        d += gl.weights[i] * Vec2(std::cos(phi), std::sin(phi));
    }
    return prefix_[j] + h * d;
}

Vec2 Curve::tangent(double s) const {
    const double phi = bending_angle(s);
    return {std::cos(phi), std::sin(phi)};
}

Vec2 Curve::second(double s) const {
    const double phi = bending_angle(s);
    return curvature(s) * Vec2(-std::sin(phi), std::cos(phi));
}

Vec2 Curve::third(double s) const {
    const double phi = bending_angle(s);
    const double k = curvature(s), kp = curvature_deriv(s);
    return kp * Vec2(-std::sin(phi), std::cos(phi)) -
           k * k * Vec2(std::cos(phi), std::sin(phi));
}

double Curve::bending_angle(double s) const {
    return profile_.beta * profile_.angle(s);
}

double Curve::curvature(double s) const {
    return profile_.beta * profile_.angle_deriv(s);
}

double Curve::curvature_deriv(double s) const {
    return profile_.beta * profile_.angle_deriv2(s);
}

bool Curve::is_line() const {
    if (profile_.beta == 0.0) return true;
    if (profile_.family != ProfileFamily::custom_table)
        return profile_.theta == 0.0;
    double lo = profile_.table_phi.front(), hi = lo;
    for (double v : profile_.table_phi) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo == 0.0 && lo == 0.0;
}

Curve build_curve(const BendingProfile& profile, double truncation) {
    double L = truncation;
    if (L <= 0.0) {
        L = 30.0 * std::max(1.0, profile.sigma);
        if (profile.family == ProfileFamily::custom_table)
            L = std::max({L, std::abs(profile.table_s.front()),
                          std::abs(profile.table_s.back())}) +
                5.0;
    }
    return Curve(profile, L);
}

AsymptoticFrame asymptotic_frame(const Curve& curve, double truncation) {
    const BendingProfile& p = curve.profile();
    // snap to the cache's panel boundaries so Gamma(+-L) is exact
    double L = std::min(truncation, curve.truncation());
    L = std::max(curve.panel_width_,
                 std::floor(L / curve.panel_width_) * curve.panel_width_);
    AsymptoticFrame f;
    f.phi_plus_inf = p.beta * p.limit_plus();
    f.phi_minus_inf = p.beta * p.limit_minus();
    f.v_plus = {std::cos(f.phi_plus_inf), std::sin(f.phi_plus_inf)};
    f.v_minus = {std::cos(f.phi_minus_inf), std::sin(f.phi_minus_inf)};

    // Gamma(+-L) directly from the prefix cache: the frame may be under
    // construction, so bypass point()'s tail branch via panel indices.
    auto gamma_cached = [&](double s) {
        // s is within the cache by construction of L
        const double Lc = curve.truncation_;
        int j = static_cast<int>(
            std::llround((s + Lc) / curve.panel_width_));
        j = std::clamp(j, 0, static_cast<int>(curve.prefix_.size()) - 1);
        return curve.prefix_[j];
    };
    f.a_plus = gamma_cached(L) - L * f.v_plus;
    f.a_minus = gamma_cached(-L) + L * f.v_minus;
    // remainder estimate |nu(+-L)| <= L^{1-kappa}/(kappa-1), kappa = 7/2
    f.tail_bound = std::pow(L, -2.5) / 2.5;

    // chord-ratio lower bound on a two-scale grid
    const double coarse = 0.1;
    const int n = static_cast<int>(std::floor(2.0 * L / coarse)) + 1;
    std::vector<Vec2> pts(n);
    std::vector<double> ss(n);
    for (int i = 0; i < n; ++i) {
        ss[i] = -L + i * coarse;
        pts[i] = gamma_cached(ss[i]);
    }
    // panel boundaries only align with the cache every 5th node; fill
    // the rest through point(), which needs the asymptote fields set.
    // Since all |s| <= L those go through the prefix path regardless of
    // a_plus/v_plus, so it is safe to call now.
    for (int i = 0; i < n; ++i) pts[i] = curve.point(ss[i]);

    double best = 1.0;
    int bi = 0, bj = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double r = (pts[i] - pts[j]).norm() / (ss[j] - ss[i]);
            if (r < best) {
                best = r;
                bi = i;
                bj = j;
            }
        }
    f.rho = best;
    f.rho_arg_s = ss[bi];
    f.rho_arg_t = ss[bj];
    if (best < 1.0) {
        // local refinement around the coarse minimizer
        const double fine = 0.002, span = 0.12;
        for (double s = ss[bi] - span; s <= ss[bi] + span; s += fine)
            for (double t = ss[bj] - span; t <= ss[bj] + span; t += fine) {
                if (std::abs(t - s) < 0.5 * fine) continue;
                const double r =
                    (curve.point(s) - curve.point(t)).norm() /
                    std::abs(t - s);
                if (r < f.rho) {
                    f.rho = r;
                    f.rho_arg_s = s;
                    f.rho_arg_t = t;
                }
            }
    }
    f.self_intersection = f.rho <= 1e-12;
    return f;
}

AssumptionReport check_assumptions(const Curve& curve, double delta,
                                   double R) {
    if (!(delta > 3.0))
        throw std::invalid_argument("check_assumptions: need delta > 3");
    if (!(R > 0.0))
        throw std::invalid_argument("check_assumptions: need R > 0");
    AssumptionReport rep;
    const double L = curve.truncation();
    const AsymptoticFrame& fr = curve.frame();

    // tangent remainder |nu'(s)| = |Gamma'(s) - v| = 2|sin((phi - phi_inf)/2)|
    auto nu_prime = [&](double s, bool plus) {
        const double lim = plus ? fr.phi_plus_inf : fr.phi_minus_inf;
        return 2.0 *
               std::abs(std::sin(0.5 * (curve.bending_angle(s) - lim)));
    };

    // monotone envelope phi_+(s) = sup_{t >= s} |nu_+'(t)| on a fine
    // grid, then the weighted integral on a dyadic ladder of upper
    // limits; a non-shrinking last increment flags divergence.
    auto weighted_tail = [&](bool plus, AssumptionItem& item) {
        const int n_grid = 40000;
        const double h = (L - R) / n_grid;
        std::vector<double> env(n_grid + 1);
        for (int i = 0; i <= n_grid; ++i) {
            const double s = R + i * h;
            env[i] = nu_prime(plus ? s : -s, plus);
        }
        for (int i = n_grid - 1; i >= 0; --i)
            env[i] = std::max(env[i], env[i + 1]);
        // trapezoid of (1+s^2)^delta env^2; cumulative values recorded
        // at dyadic marks R*2^j.  Divergence shows as a complete dyadic
        // window contributing at least as much as its predecessor (the
        // trailing partial window is excluded: a table profile goes
        // exactly flat past its last knot).
        std::vector<double> ladder_v;
        double acc = 0.0;
        double next_mark = 2.0 * R;
        for (int i = 0; i < n_grid; ++i) {
            const double s0 = R + i * h, s1 = s0 + h;
            auto w = [&](double s, double e) {
                return std::pow(1.0 + s * s, delta) * e * e;
            };
            acc += 0.5 * h * (w(s0, env[i]) + w(s1, env[i + 1]));
            if (s1 >= next_mark) {
                ladder_v.push_back(acc);
                next_mark *= 2.0;
            }
        }
        item.value = acc;
        bool converged = true;
        if (ladder_v.size() >= 3) {
            const size_t m = ladder_v.size();
            const double inc_last = ladder_v[m - 1] - ladder_v[m - 2];
            const double inc_prev = ladder_v[m - 2] - ladder_v[m - 3];
            if (inc_last > 1e-10 * (1.0 + acc) &&
                inc_last > 0.5 * inc_prev)
                converged = false;
        }
        item.pass = converged && std::isfinite(acc);
        item.detail = converged ? "ladder increments shrink"
                                : "ladder increments do not shrink";
    };

    AssumptionItem a1p{"weighted_tail_plus", false, 0.0, ""};
    weighted_tail(true, a1p);
    rep.items.push_back(a1p);
    AssumptionItem a1m{"weighted_tail_minus", false, 0.0, ""};
    weighted_tail(false, a1m);
    rep.items.push_back(a1m);

    AssumptionItem a2{"chord_ratio_positive", fr.rho > 0.0, fr.rho,
                      "min |G(s)-G(t)|/|s-t| over two-scale grid"};
    rep.items.push_back(a2);

    double sup_k = 0.0, arg_k = 0.0;
    const int ns = 6000;
    for (int i = 0; i <= ns; ++i) {
        const double s = -L + 2.0 * L * i / ns;
        const double k = std::abs(curve.curvature(s));
        if (k > sup_k) {
            sup_k = k;
            arg_k = s;
        }
    }
    (void)arg_k;
    AssumptionItem a3{"second_derivative_bounded", std::isfinite(sup_k),
                      sup_k, "sup |Gamma''| over sampled grid"};
    rep.items.push_back(a3);

    // curvature decay: sup over |s| > S of |K| + |K'| for an S ladder
    std::vector<double> ladder = {0.25 * L, 0.5 * L, 0.75 * L};
    std::vector<double> sup_tail(ladder.size(), 0.0);
    for (int i = 0; i <= ns; ++i) {
        const double s = -L + 2.0 * L * i / ns;
        const double v =
            std::abs(curve.curvature(s)) + std::abs(curve.curvature_deriv(s));
        for (size_t j = 0; j < ladder.size(); ++j)
            if (std::abs(s) > ladder[j]) sup_tail[j] = std::max(sup_tail[j], v);
    }
    bool decays = sup_tail.back() <= 1e-8;
    for (size_t j = 1; j < sup_tail.size() && !decays; ++j)
        decays = sup_tail[j] < 0.25 * sup_tail[j - 1] || sup_tail[j] == 0.0;
    AssumptionItem a4{"curvature_decay", decays || sup_k == 0.0,
                      sup_tail.back(),
                      "sup_{|s|>3L/4} (|K| + |K'|)"};
    rep.items.push_back(a4);

    rep.all_pass = true;
    for (const auto& it : rep.items) rep.all_pass = rep.all_pass && it.pass;
    return rep;
}

EiCheck check_ei_condition(const Curve& curve, double d, double mu,
                           double omega) {
    if (!(omega > 0.0 && omega < 1.0))
        throw std::invalid_argument("check_ei_condition: omega in (0,1)");
    if (!(d > 0.0 && mu > 0.0))
        throw std::invalid_argument("check_ei_condition: need d, mu > 0");
    const double L = curve.truncation();
    const double step = 0.05;
    const int n = static_cast<int>(std::floor(L / step));
    EiCheck out;
    out.margin = std::numeric_limits<double>::infinity();
    for (int sign = -1; sign <= 1; sign += 2) {
        std::vector<double> ss(n);
        std::vector<Vec2> pts(n);
        for (int i = 0; i < n; ++i) {
            ss[i] = sign * (i + 1) * step;
            pts[i] = curve.point(ss[i]);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double ratio = ss[i] / ss[j];
                if (!(ratio > omega && ratio < 1.0 / omega)) continue;
                const double lhs =
                    (pts[i] - pts[j]).norm() / std::abs(ss[i] - ss[j]);
                const double rhs =
                    1.0 - d / std::sqrt(1.0 + std::pow(
                                                  std::abs(ss[i] + ss[j]),
                                                  2.0 * mu));
                const double margin = lhs - rhs;
                if (margin < out.margin) {
                    out.margin = margin;
                    out.worst_s = ss[i];
                    out.worst_t = ss[j];
                }
            }
    }
    out.ok = out.margin >= 0.0;
    return out;
}

}  // namespace lqw::curve
