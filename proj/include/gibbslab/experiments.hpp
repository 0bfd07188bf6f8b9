#pragma once

#include "gibbslab/constants.hpp"
#include "gibbslab/langevin.hpp"
#include "gibbslab/manifold.hpp"
#include "gibbslab/spectral.hpp"

#include <map>
#include <string>
#include <vector>

namespace gibbslab {

/// Named, reproducible experiment pipelines: certificates -> ledger ->
/// spectra -> simulation, each emitting CSV/JSON artifacts.
struct ExperimentConfig {
    std::string experiment;  // certify|ledger|lyapunov|spectrum|tube|lb-gap|sweep|weyl|report
    std::string potential = "circle2d";
    std::string manifold = "circle";
    std::vector<double> eps_list;
    std::vector<double> radii;
    double h = 0.0;          // 0 = per-experiment default
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    std::string canonical() const;
    std::string content_hash() const;
};

struct ConfigParse {
    ExperimentConfig config;
    std::vector<std::string> errors;  // one per malformed key, with line numbers
    bool ok() const { return errors.empty(); }
};

/// key = value lines; unknown keys and invalid values are listed with line
/// numbers; defaults are injected for everything absent.
ConfigParse validate_config(const std::string& text);

struct Assertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunReport {
    std::string experiment_id;
    std::string inputs_hash;
    std::vector<Table> tables;
    std::vector<Assertion> assertions;
    std::string extra_json;  // experiment-specific payload (certificates, fits)
    double wall_seconds = 0.0;
    bool all_pass() const;
};

RunReport run(const ExperimentConfig& config);

/// Writes tables as CSV, the report and config echo as JSON, into out_dir.
void write_report(const RunReport& report, const ExperimentConfig& config);

// ---------------------------------------------------------------- utilities

struct GeneratorRun {
    double eps = 0.0, h = 0.0, box = 0.0;
    double lambda0 = 0.0, lambda1 = 0.0, residual = 0.0;
    double rho = 0.0;  // lambda1 / eps
    std::string config_hash;
    std::vector<double> eigenvalues;
};

/// Generator spectrum on a box containing {V <= min V + 40 eps}; h defaults
/// to sqrt(eps)/8 (2D/3D) or sqrt(eps)/64 (1D, dense solve).
GeneratorRun run_generator_spectrum(const ScalarField& field, double eps, double h = 0.0,
                                    int n_pairs = 4);

/// Direct ambient quadrature of phi over the tube of a catalog manifold
/// (polar/spherical/toroidal coordinates); the independent side of the
/// co-area cross-check.
double direct_tube_quadrature(const std::string& manifold_name,
                              const std::function<double(const Vec&)>& phi, double radius,
                              int n_radial = 64, int n_angular = 512);

}  // namespace gibbslab
