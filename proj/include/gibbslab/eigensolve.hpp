#pragma once

#include "gibbslab/operators.hpp"

#include <optional>
#include <vector>

namespace gibbslab {

struct SpectrumResult {
    std::vector<double> eigenvalues;   // lambda_0 <= lambda_1 <= ...
    std::vector<double> residuals;     // ||B v - lambda v|| per pair
    std::vector<int> multiplicities;   // cluster sizes, aligned with clusters
    std::vector<double> cluster_values;
    double h = 0.0;
    std::optional<double> extrapolated;  // Richardson h->0 value when requested
    bool converged = true;
    std::string tag;

    double lambda1() const;  // smallest nonzero eigenvalue
};

struct EigenOptions {
    int m = 4;                 // requested eigenpairs (including the zero mode)
    double tol = 1e-8;
    double shift_hint = 0.0;   // expected scale of lambda_1; 0 = auto
    double cluster_rel_tol = 1e-6;
    int max_iters = 400;
    bool force_iterative = false;  // testing hook
};

/// m smallest eigenpairs of a DiscreteOperator. Dense for small problems,
/// shift-invert Lanczos (sparse LDLT) in 1D/2D, LOBPCG with Jacobi
/// preconditioning for large 3D problems. The constant mode is deflated and
/// reported as lambda_0 = 0 with its true residual.
SpectrumResult smallest_eigenvalues(const DiscreteOperator& op, const EigenOptions& opt = {});

/// Eigenvectors are needed by a few checks; same solve, also returns the
/// vectors in the weighted picture (columns).
SpectrumResult smallest_eigenpairs(const DiscreteOperator& op, Mat& vectors,
                                   const EigenOptions& opt = {});

/// Rayleigh quotient <A u, u>_w / <u, u>_w after projecting out constants.
/// Upper-bounds lambda_1 by the min-max principle.
double rayleigh_quotient(const DiscreteOperator& op, const Vec& witness);

struct RayleighWitness {
    Vec values;        // mean-projected node values
    bool mean_zero = false;
    double quotient = 0.0;
};

RayleighWitness make_rayleigh_witness(const DiscreteOperator& op, const Vec& raw);

}  // namespace gibbslab
