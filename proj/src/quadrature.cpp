#include "lqw/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lqw {

namespace {

// Golub-Welsch: eigen-decompose the Jacobi matrix of the weight's
// three-term recurrence.  b_i are the off-diagonal entries, mu0 the
// total mass of the weight.
GaussRule golub_welsch(const Eigen::VectorXd& diag,
                       const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J.diagonal() = diag;
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag[i];
    es.compute(J);
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

std::mutex cache_mutex;

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b(n - 1 > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i)
        b[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
    return cache.emplace(n, golub_welsch(d, b, 2.0)).first->second;
}

const GaussRule& gauss_hermite(int n) {
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b(n - 1 > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i) b[i - 1] = std::sqrt(i / 2.0);
    const double mu0 = std::sqrt(M_PI);
    return cache.emplace(n, golub_welsch(d, b, mu0)).first->second;
}

double integrate_panels(const std::function<double(double)>& f,
                        double a, double b, int panels, int order) {
    const GaussRule& gl = gauss_legendre(order);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        double s = 0.0;
        for (int i = 0; i < order; ++i)
            s += gl.weights[i] * f(c + 0.5 * h * gl.nodes[i]);
        total += 0.5 * h * s;
    }
    return total;
}

namespace {

double panel_gl(const std::function<double(double)>& f, double a, double b,
                int order) {
    const GaussRule& gl = gauss_legendre(order);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < order; ++i) s += gl.weights[i] * f(c + h * gl.nodes[i]);
    return h * s;
}

double adapt_rec(const std::function<double(double)>& f, double a, double b,
                 double whole, double rel_tol, double abs_tol, int depth,
                 double* err_acc) {
    const double m = 0.5 * (a + b);
    const double left = panel_gl(f, a, m, 15);
    const double right = panel_gl(f, m, b, 15);
    const double diff = std::abs(left + right - whole);
    if (depth <= 0 ||
        diff <= abs_tol + rel_tol * std::abs(left + right)) {
        if (err_acc) *err_acc += diff;
        return left + right;
    }
    return adapt_rec(f, a, m, left, rel_tol, 0.5 * abs_tol, depth - 1, err_acc) +
           adapt_rec(f, m, b, right, rel_tol, 0.5 * abs_tol, depth - 1, err_acc);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double rel_tol, double abs_tol,
                          int max_depth, double* err_est) {
    if (err_est) *err_est = 0.0;
    const double whole = panel_gl(f, a, b, 15);
    return adapt_rec(f, a, b, whole, rel_tol, abs_tol, max_depth, err_est);
}

double integrate_dyadic(const std::function<double(double)>& f,
                        double a, double b, int levels, int order) {
    // panels [a + h/2^{m+1}, a + h/2^m]; the log-type singularity at a
    // looks polynomial on each dyadic panel.
    const double h = b - a;
    double total = 0.0;
    double hi = h;
    for (int m = 0; m < levels; ++m) {
        const double lo = (m + 1 == levels) ? 0.0 : hi * 0.5;
        total += panel_gl(f, a + lo, a + hi, order);
        hi = lo;
    }
    return total;
}

}  // namespace lqw
