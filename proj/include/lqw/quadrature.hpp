#pragma once

#include <functional>
#include <vector>

namespace lqw {

/// Gauss-Legendre rule on [-1,1]; nodes ascending, weights positive.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (Golub-Welsch). Cached per n.
const GaussRule& gauss_legendre(int n);

/// n-point Gauss-Hermite rule: \int e^{-t^2} f(t) dt = sum w_i f(t_i).
const GaussRule& gauss_hermite(int n);

/// Integrate f over [a,b] with an np-panel composite Gauss-Legendre rule.
double integrate_panels(const std::function<double(double)>& f,
                        double a, double b, int panels, int order = 16);

/// Adaptive 1-D integration (Gauss-Kronrod-style via panel bisection).
/// Returns the value; *err_est gets a crude error estimate if non-null.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-15,
                          int max_depth = 40, double* err_est = nullptr);

/// Integrate f over [a,b] with panels refined dyadically toward `a`
/// (for integrable endpoint singularities such as log).
double integrate_dyadic(const std::function<double(double)>& f,
                        double a, double b, int levels = 42, int order = 16);

}  // namespace lqw
