#pragma once

#include "gibbslab/common.hpp"
#include "gibbslab/grid.hpp"
#include "gibbslab/potential.hpp"

#include <Eigen/Sparse>

#include <string>

namespace gibbslab {

using SpMat = Eigen::SparseMatrix<double>;

/// Symmetric operator on grid nodes with positive inner-product weights w.
/// The action in the weighted picture is A = D^{-1/2} B D^{1/2} with
/// D = diag(w); B is symmetric PSD and annihilates sqrt(w).
struct DiscreteOperator {
    SpMat B;          // symmetrized matrix
    Vec w;            // inner-product weights
    Vec sqrt_w;
    std::string tag;
    double h = 0.0;   // representative spacing, for reports
    int dim = 0;      // grid dimension, guides the solver path

    Eigen::Index size() const { return B.rows(); }

    /// Weighted-picture action A f.
    Vec apply_weighted(const Vec& f) const;
    /// <A f, g>_w.
    double weighted_inner(const Vec& f, const Vec& g) const;

    /// max over given pairs of relative symmetry defect |<Af,g>_w - <f,Ag>_w|.
    double symmetry_defect(int pairs = 8, std::uint64_t seed = 1) const;
    /// ||A 1||_w relative to ||1||_w.
    double zero_mode_residual() const;
};

/// 2nd-order finite-volume Neumann Laplacian on the (possibly cut-cell)
/// domain; rejects disconnected masks.
DiscreteOperator assemble_neumann_laplacian(const GridDomain& domain);

/// Langevin generator -L = -eps e^{V/eps} div(e^{-V/eps} grad .) in
/// divergence form, self-adjoint with weights proportional to e^{-V/eps}.
/// Weights are centered by the domain minimum of V. The truncation boundary
/// must satisfy V > min V + 20 eps on every boundary cell.
DiscreteOperator assemble_weighted_generator(const ScalarField& field, double eps,
                                             const GridDomain& domain);

}  // namespace gibbslab
