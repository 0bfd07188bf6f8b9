#pragma once

#include "gibbslab/common.hpp"
#include "gibbslab/potential.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gibbslab {

/// Euler-Maruyama simulation configuration. Trajectories use counter-based
/// RNG streams keyed by (seed, trajectory id, step), so ensembles are
/// bit-exactly reproducible on any thread schedule.
struct SimConfig {
    double eps = 0.1;
    double step = 1e-3;
    double horizon = 10.0;           // measurement window after initialization
    int ensemble = 256;
    std::uint64_t seed = 1;
    double obs_dt = 0.1;             // observation spacing

    enum class Init { Point, UniformBox, StationaryWarmStart, StationaryExact } init =
        Init::StationaryExact;
    Vec init_point;                  // for Init::Point
    double init_box_halfwidth = 1.0; // for Init::UniformBox
    double burn_in = 0.0;            // for WarmStart; 0 = auto 20/(eps rate_guess)
    double rate_guess = 1.0;

    double guard_radius = 0.0;       // 0 = 4 R0 from the catalog
    double lipschitz_bound = 0.0;    // 0 = derived from the guard ball

    std::string config_echo() const;
};

struct TrajectoryEnsemble {
    SimConfig config;
    std::string config_hash;
    std::vector<double> times;             // observation times
    // samples[t][i] = state of trajectory i at time t (d coordinates)
    std::vector<std::vector<Vec>> samples;
    std::size_t reflections = 0;
    std::size_t total_steps = 0;
    bool rejected = false;                 // > 1% reflections
};

/// One Euler-Maruyama step x' = x - h grad V + sqrt(2 eps h) xi.
Vec em_step(const Vec& x, const ScalarField& field, double h, double eps, const Vec& noise);

TrajectoryEnsemble simulate_ensemble(const SimConfig& config, const ScalarField& field);

/// Binary samples + JSON sidecar; loads back bit-exactly.
void save_ensemble(const TrajectoryEnsemble& e, const std::string& path_prefix);
TrajectoryEnsemble load_ensemble(const std::string& path_prefix);

struct GapEstimate {
    double rate = 0.0;       // lambda-hat, 1/time units
    double ci_lo = 0.0, ci_hi = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    bool low_confidence = false;
};

/// Slowest autocorrelation decay rate of an observable over a lag window;
/// equals the generator gap for a stationary ensemble.
GapEstimate estimate_gap_autocorr(const TrajectoryEnsemble& ensemble,
                                  const std::function<double(const Vec&)>& observable,
                                  double window_lo = 0.0, double window_hi = 0.0);

struct SweepRow {
    double eps = 0.0;
    double rate = 0.0;
    double rate_over_eps = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
    double r_squared = 0.0;
    bool low_confidence = false;
};

/// Rate estimates across a temperature list.
std::vector<SweepRow> mixing_sweep(const ScalarField& field, const std::vector<double>& eps_list,
                                   const SimConfig& config_template,
                                   const std::function<double(const Vec&)>& observable);

/// Inverse-CDF sampler for the stationary radial/1D density of catalog
/// fields: density ~ exp(-V/eps) r^{d-1} dr (radial) or exp(-V/eps) dx (1D).
Vec sample_stationary(const ScalarField& field, double eps, std::uint64_t seed,
                      std::uint32_t stream);

}  // namespace gibbslab
