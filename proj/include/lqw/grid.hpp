#pragma once

#include <vector>

namespace lqw::kernel {

/// Composite panel Gauss-Legendre grid on [-L, L]; the Nystrom nodes
/// and weights for all integral-operator discretizations.
struct Grid1D {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // positive, sum = 2L
    double truncation = 0.0;      // L
    int panels = 0;
    int order = 0;  // nodes per panel

    int size() const { return static_cast<int>(nodes.size()); }
    double panel_width() const { return 2.0 * truncation / panels; }
};

/// Build a grid with n_nodes total (rounded up to a panel multiple).
Grid1D make_grid(double truncation, int n_nodes, int order = 8);

}  // namespace lqw::kernel
