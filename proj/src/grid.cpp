#include "lqw/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "lqw/quadrature.hpp"

namespace lqw::kernel {

Grid1D make_grid(double truncation, int n_nodes, int order) {
    if (!(truncation > 0.0) || n_nodes < order || order < 1)
        throw std::invalid_argument("make_grid: bad parameters");
    Grid1D g;
    g.order = order;
    g.panels = (n_nodes + order - 1) / order;
    g.truncation = truncation;
    const double h = 2.0 * truncation / g.panels;
    const GaussRule& gl = gauss_legendre(order);
    g.nodes.reserve(g.panels * order);
    g.weights.reserve(g.panels * order);
    for (int p = 0; p < g.panels; ++p) {
        const double c = -truncation + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) {
            g.nodes.push_back(c + 0.5 * h * gl.nodes[i]);
            g.weights.push_back(0.5 * h * gl.weights[i]);
        }
    }
    return g;
}

}  // namespace lqw::kernel
