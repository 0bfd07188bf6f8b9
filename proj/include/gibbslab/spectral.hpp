#pragma once

#include "gibbslab/eigensolve.hpp"
#include "gibbslab/manifold.hpp"

#include <vector>

namespace gibbslab {

/// Flux-form discretization of the Laplace-Beltrami operator
/// -(1/sqrt(det g)) d_i (sqrt(det g) g^{ij} d_j .) on the chart grid.
/// Requires a diagonal chart metric (all catalog manifolds). Chart-degenerate
/// edges (sphere poles) carry vanishing face conductance and need no special
/// casing; non-periodic axes otherwise act as Neumann ends.
DiscreteOperator assemble_laplace_beltrami(const ChartedManifold& m, int cells_per_axis);

/// lambda_1(S) with solver defaults appropriate for the catalog.
SpectrumResult laplace_beltrami_gap(const ChartedManifold& m, int cells_per_axis = 256);

struct TubeStabilityRow {
    double radius = 0.0;
    double lambda1 = 0.0;
    double deviation = 0.0;  // |lambda1 - lambda1(S)|
    double h = 0.0;
    std::size_t cells = 0;
};

struct TubeStabilityReport {
    double lambda_S = 0.0;
    std::vector<TubeStabilityRow> rows;
    double B_admissible = 0.0;   // max |dev| / (radius * lambda_S)
    double fit_r_squared = 0.0;  // linear fit of |dev| against radius
    double extrapolated_limit = 0.0;
    bool monotone = true;
};

struct TubeStabilityOptions {
    int cells_across = 32;      // grid cells across the tube width 2*radius
    double max_h = 0.02;
    int lb_resolution = 256;    // chart resolution for lambda_1(S)
    int eigen_m = 4;
};

/// Neumann eigenvalues of tubular neighborhoods T(radius) on masked ambient
/// grids, fitted against lambda_1(S): |lambda_1(T) - lambda_1(S)| <= B
/// radius lambda_1(S).
TubeStabilityReport tube_stability_report(const ChartedManifold& m,
                                          const std::vector<double>& radii,
                                          const TubeStabilityOptions& opt = {});

/// Product-space gap: min of the factors (tensorization).
double tensor_gap(double gap_tangential, double gap_normal);

/// First nonzero Neumann eigenvalue of the interval [-a, a].
double interval_neumann_gap(double a);

}  // namespace gibbslab
