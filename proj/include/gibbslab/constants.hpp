#pragma once

#include "gibbslab/common.hpp"
#include "gibbslab/potential.hpp"

#include <optional>
#include <string>

namespace gibbslab {

/// Explicit constants of the certification chain, with the derived
/// composites. All exponentially small composites are carried in natural-log
/// form. Inputs come from certificates; derived fields recompute
/// deterministically.
struct ConstantsLedger {
    std::string potential;
    int d = 0;       // ambient dimension
    int k = 0;       // optimal-set dimension
    double nu = 0;       // local PL constant on N(S)
    double nu_eb = 0;    // error-bound constant beyond R0
    double C_g = 0;      // Laplacian growth constant
    double R0 = 0;
    double R1 = 0;
    double delta0 = 0;
    double g0 = 0;       // gradient floor off the critical neighborhoods
    double L = 0;        // Hessian bound on N(S)
    double M_delta = 0;  // Laplacian bound on |x| <= R0
    double mu_minus = 0; // curvature at the local maxima
    // derived
    double C = 0;        // 4 M_delta / nu^2
    double C_bar = 0;    // 4 L C
    double log_C_P = 0;  // log( (1/4) d mu^- / (d mu^- + M_delta) ) - C_bar
    // geometry (optional): reach and fitted stability constant
    std::optional<double> reach;
    std::optional<double> B_stability;

    double C_P() const { return std::exp(log_C_P); }
    void recompute_derived();
};

/// Builds the ledger for a catalog potential by running the certification
/// pipeline on its declared regions. Throws naming the failing assumption.
ConstantsLedger build_ledger(const ScalarField& field, const ProbePlan& plan = {});

struct SigmaB {
    double sigma = 0;
    double b = 0;
    bool eb_branch = false;  // true when the error-bound branch of the min is active
};

/// sigma = min{ nu_eb^2 R0^2 / (128 eps^2), d mu^- / (2 eps) },
/// b = sigma + M_delta / (2 eps); requires eps within the threshold unless
/// enforce_threshold is cleared (formula-level probing).
SigmaB sigma_b(const ConstantsLedger& ledger, double eps, bool enforce_threshold = true);

/// eps where the two sigma branches cross: nu_eb^2 R0^2 / (64 d mu^-).
double sigma_branch_crossing(const ConstantsLedger& ledger);

struct OscillationReport {
    double quad_bound = 0;  // 4 L C eps, the smoothness route
    double direct = 0;      // max - min of V over probes of U = S^{sqrt(C eps)}
    double used() const { return std::min(quad_bound, direct); }
};

/// Oscillation of V on U, both the quadratic bound and a direct probe scan.
OscillationReport oscillation_on_U(const ScalarField& field, const ConstantsLedger& ledger,
                                   double eps, int probes = 4096);

/// min{ nu_eb^2/(64 C_g), delta0^2/C, g0^2/(4 M_delta) }, intersected with
/// the geometric bounds min{ reach, 1/(4 B^2 C) } when present.
double epsilon_threshold(const ConstantsLedger& ledger);

struct LyapunovCheckReport {
    double eps = 0;
    double sigma = 0;
    double b = 0;
    double tube_radius = 0;  // sqrt(C eps), the set U = S^{sqrt(C eps)}
    double grid_h = 0;
    std::size_t nodes = 0;
    std::size_t violations = 0;
    double worst_margin = 0;  // signed; positive = slack
    Vec worst_point;
};

/// Pointwise check of lap V/(2 eps) - |grad V|^2/(4 eps^2) <= -sigma + b 1_U
/// over a grid covering |x| <= extent (default 4 R0).
LyapunovCheckReport verify_lyapunov(const ScalarField& field, const ConstantsLedger& ledger,
                                    double eps, double grid_h, double extent = 0.0);

/// rho >= sigma rho_U / (b + rho_U).
double combine_lyapunov_pi(double sigma, double b, double rho_U);

/// rho >= exp(-oscillation/eps) rho_base.
double holley_stroock(double rho_base, double oscillation, double eps);

struct FinalBound {
    double eps = 0;
    // natural-log lower bounds for rho
    double log_intermediate = 0;  // (1/2) prefactor e^{-C_bar} lambda1n(U)
    double log_final = 0;         // C_P lambda1(S)
    double lambda_input = 0;
    // itemized chain, natural logs
    double log_half = 0, log_prefactor = 0, log_exp = 0, log_lambda = 0;
};

/// Certified lower bounds in log form; refuses out-of-threshold eps.
FinalBound final_bound(const ConstantsLedger& ledger, double lambda1n_U, double lambda1_S,
                       double eps);

}  // namespace gibbslab
