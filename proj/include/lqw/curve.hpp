#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace lqw::curve {

using Vec2 = Eigen::Vector2d;

enum class ProfileFamily { gaussian_bump, smoothed_corner, custom_table };

ProfileFamily family_from_string(const std::string& name);
std::string family_to_string(ProfileFamily f);

/// Bending-angle profile phi(s,0).  The curve is reconstructed from it
/// as Gamma' = (cos beta*phi, sin beta*phi), which keeps |Gamma'| = 1
/// exactly and makes the curvature beta*phi' analytic.
struct BendingProfile {
    ProfileFamily family = ProfileFamily::gaussian_bump;
    double theta = 0.0;   // angle amplitude, radians
    double sigma = 1.0;   // width, > 0
    double center = 0.0;  // bump/corner position s_c
    double beta = 1.0;    // homotopy scale in [0,1]

    // custom_table: phi sampled at strictly increasing arclengths;
    // natural cubic spline inside, constant beyond the table.
    std::vector<double> table_s;
    std::vector<double> table_phi;

    double angle(double s) const;         // phi(s,0), beta NOT applied
    double angle_deriv(double s) const;   // phi'
    double angle_deriv2(double s) const;  // phi''
    double limit_plus() const;            // phi_{+inf}
    double limit_minus() const;           // phi_{-inf}

    void validate() const;  // parameter ranges, U-case exclusion
};

/// Asymptotic half-line data and the chord-ratio bound.
struct AsymptoticFrame {
    Vec2 a_plus, a_minus;
    Vec2 v_plus, v_minus;
    double phi_plus_inf = 0.0, phi_minus_inf = 0.0;
    double rho = 1.0;               // min |Gamma(s)-Gamma(t)|/|s-t|
    double rho_arg_s = 0.0, rho_arg_t = 0.0;
    double tail_bound = 0.0;        // |nu(+-L)| estimate
    bool self_intersection = false;
};

/// Arclength-parameterized planar curve built from a bending profile.
/// Immutable after construction; safe to share across threads.
class Curve {
  public:
    Curve(BendingProfile profile, double truncation);

    const BendingProfile& profile() const { return profile_; }
    double truncation() const { return truncation_; }

    Vec2 point(double s) const;    // Gamma(s)
    Vec2 tangent(double s) const;  // Gamma'(s), unit
    Vec2 second(double s) const;   // Gamma''(s)
    Vec2 third(double s) const;    // Gamma'''(s)

    double bending_angle(double s) const;   // beta * phi(s,0)
    double curvature(double s) const;       // K = beta * phi'
    double curvature_deriv(double s) const;

    bool is_line() const;
    /// frame computed at build time (truncation L of the cache)
    const AsymptoticFrame& frame() const { return frame_; }

  private:
    BendingProfile profile_;
    double truncation_;
    double panel_width_;
    std::vector<Vec2> prefix_;  // Gamma at panel boundaries, [-L, L]
    AsymptoticFrame frame_;
    friend AsymptoticFrame asymptotic_frame(const Curve&, double);
};

/// Default truncation 30 * max(1, sigma).
Curve build_curve(const BendingProfile& profile, double truncation = -1.0);

AsymptoticFrame asymptotic_frame(const Curve& curve, double truncation);

struct AssumptionItem {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionItem> items;
    bool all_pass = false;
};

/// Numerical check of the curve assumptions: weighted tail integrals of
/// the tangent-remainder envelopes, chord-ratio positivity, bounded
/// second derivative, curvature decay ladder.
AssumptionReport check_assumptions(const Curve& curve, double delta, double R);

struct EiCheck {
    bool ok = true;
    double worst_s = 0.0, worst_t = 0.0;
    double margin = 0.0;  // min over pairs of LHS - RHS
};

/// Chord lower bound |G(s)-G(s')|/|s-s'| >= 1 - d/sqrt(1+|s+s'|^{2 mu})
/// over same-sign grid pairs with omega < s/s' < 1/omega.
EiCheck check_ei_condition(const Curve& curve, double d, double mu,
                           double omega);

}  // namespace lqw::curve
