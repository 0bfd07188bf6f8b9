#include "gibbslab/langevin.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gibbslab {

std::string SimConfig::config_echo() const
{
    std::ostringstream os;
    os << "eps=" << eps << ";step=" << step << ";horizon=" << horizon << ";ensemble=" << ensemble
       << ";seed=" << seed << ";obs_dt=" << obs_dt << ";init=" << int(init)
       << ";burn_in=" << burn_in << ";guard=" << guard_radius;
    return os.str();
}

Vec em_step(const Vec& x, const ScalarField& field, double h, double eps, const Vec& noise)
{
    if (!x.allFinite()) throw std::invalid_argument("em_step: non-finite state");
    return x - h * field.gradient(x) + std::sqrt(2.0 * eps * h) * noise;
}

namespace {

/// Gaussian noise for (seed, trajectory, step); component blocks of two. In
/// 1D both Box-Muller outputs are consumed (step parity picks one), halving
/// the generator cost without losing the counter-based mapping.
void fill_noise(Vec& xi, std::uint64_t seed, std::uint32_t traj, std::uint64_t step)
{
    if (xi.size() == 1) {
        double z0, z1;
        Philox::normal_pair(seed, traj, step >> 1, 0, z0, z1);
        xi[0] = (step & 1) ? z1 : z0;
        return;
    }
    for (int b = 0; 2 * b < xi.size(); ++b) {
        double z0, z1;
        Philox::normal_pair(seed, traj, step, std::uint32_t(b), z0, z1);
        xi[2 * b] = z0;
        if (2 * b + 1 < xi.size()) xi[2 * b + 1] = z1;
    }
}

double guard_radius_for(const ScalarField& field, const SimConfig& cfg)
{
    if (cfg.guard_radius > 0) return cfg.guard_radius;
    return 4.0 * catalog_info(field.name()).R0;
}

}  // namespace

Vec sample_stationary(const ScalarField& field, double eps, std::uint64_t seed,
                      std::uint32_t stream)
{
    const int d = field.dim();
    // tabulated inverse CDF of the radial/1D marginal
    const int n = 4096;
    CatalogInfo info = catalog_info(field.name());
    double rmax = 4.0 * info.R0;
    std::vector<double> cdf(n + 1, 0.0);
    if (field.name() == "torus3d")
        throw std::invalid_argument("sample_stationary: no radial density for " + field.name());
    bool one_d = (d == 1);
    double lo = one_d ? -rmax : 0.0;
    double hstep = (rmax - lo) / n;
    Vec x1(1);
    double acc = 0.0;
    std::vector<double> pdf(n + 1);
    for (int i = 0; i <= n; ++i) {
        double r = lo + i * hstep;
        double vol = one_d ? 1.0 : std::pow(std::abs(r), double(d - 1));
        Vec p = Vec::Zero(d);
        p[0] = r;
        pdf[i] = std::exp(-field.value(p) / eps) * vol;
    }
    for (int i = 1; i <= n; ++i) {
        acc += 0.5 * (pdf[i - 1] + pdf[i]) * hstep;
        cdf[i] = acc;
    }
    double u = Philox::uniform(seed ^ 0x5eedULL, stream, 0, 9) * acc;
    int k = int(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min(std::max(k, 1), n);
    double t = (u - cdf[k - 1]) / std::max(cdf[k] - cdf[k - 1], 1e-300);
    double r = lo + (k - 1 + t) * hstep;

    Vec x(d);
    if (one_d) {
        x[0] = r;
    } else if (d == 2) {
        double th = 2.0 * M_PI * Philox::uniform(seed ^ 0x5eedULL, stream, 1, 9);
        x << r * std::cos(th), r * std::sin(th);
    } else {
        double z = 2.0 * Philox::uniform(seed ^ 0x5eedULL, stream, 1, 9) - 1.0;
        double th = 2.0 * M_PI * Philox::uniform(seed ^ 0x5eedULL, stream, 2, 9);
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        x << r * rho * std::cos(th), r * rho * std::sin(th), r * z;
    }
    return x;
}

TrajectoryEnsemble simulate_ensemble(const SimConfig& config, const ScalarField& field)
{
    const int d = field.dim();
    SimConfig cfg = config;
    cfg.guard_radius = guard_radius_for(field, config);
    if (cfg.lipschitz_bound <= 0) {
        // largest Hessian norm on the guard ball, probed on a radial ray
        double L = 0.0;
        for (int i = 0; i <= 64; ++i) {
            Vec p = Vec::Zero(d);
            p[0] = cfg.guard_radius * i / 64.0;
            Eigen::SelfAdjointEigenSolver<Mat> es(field.hessian(p));
            L = std::max(L, es.eigenvalues().cwiseAbs().maxCoeff());
        }
        cfg.lipschitz_bound = L;
    }
    if (cfg.step > cfg.eps / (10.0 * cfg.lipschitz_bound)) {
        std::ostringstream os;
        os << "simulate_ensemble: step " << cfg.step << " exceeds eps/(10 L) = "
           << cfg.eps / (10.0 * cfg.lipschitz_bound);
        throw std::invalid_argument(os.str());
    }
    if (cfg.ensemble < 100)
        throw std::invalid_argument("simulate_ensemble: ensemble size must be >= 100");

    double burn = 0.0;
    if (cfg.init == SimConfig::Init::StationaryWarmStart)
        burn = cfg.burn_in > 0 ? cfg.burn_in : 20.0 / (cfg.eps * std::max(cfg.rate_guess, 1e-12));

    std::size_t burn_steps = std::size_t(std::ceil(burn / cfg.step));
    std::size_t obs_every = std::max<std::size_t>(1, std::size_t(std::round(cfg.obs_dt / cfg.step)));
    std::size_t run_steps = std::size_t(std::ceil(cfg.horizon / cfg.step));
    std::size_t n_obs = run_steps / obs_every + 1;

    TrajectoryEnsemble ens;
    ens.config = cfg;
    ens.config_hash = hash_hex(cfg.config_echo() + field.name());
    ens.times.resize(n_obs);
    for (std::size_t t = 0; t < n_obs; ++t) ens.times[t] = double(t * obs_every) * cfg.step;
    ens.samples.assign(n_obs, std::vector<Vec>(std::size_t(cfg.ensemble)));

    std::atomic<std::size_t> reflect_count{0};
    const double guard = cfg.guard_radius;
    const double sqh = std::sqrt(2.0 * cfg.eps * cfg.step);

    parallel_for(std::size_t(cfg.ensemble), [&](std::size_t lo, std::size_t hi) {
        Vec xi(d), grad(d);
        std::size_t local_reflect = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            Vec x;
            switch (cfg.init) {
                case SimConfig::Init::Point:
                    x = cfg.init_point;
                    break;
                case SimConfig::Init::UniformBox: {
                    x = Vec(d);
                    for (int a = 0; a < d; ++a)
                        x[a] = cfg.init_box_halfwidth *
                               (2.0 * Philox::uniform(cfg.seed, std::uint32_t(i), 0, 30 + a) - 1.0);
                    break;
                }
                case SimConfig::Init::StationaryWarmStart: {
                    // burn-in below equilibrates from a crude uniform start
                    x = Vec(d);
                    for (int a = 0; a < d; ++a)
                        x[a] = 0.5 * guard *
                               (2.0 * Philox::uniform(cfg.seed, std::uint32_t(i), 0, 30 + a) - 1.0);
                    break;
                }
                case SimConfig::Init::StationaryExact:
                    x = sample_stationary(field, cfg.eps, cfg.seed, std::uint32_t(i));
                    break;
            }
            std::size_t step = 0;
            auto advance = [&]() {
                fill_noise(xi, cfg.seed, std::uint32_t(i), step);
                field.gradient_into(x, grad);
                for (int a = 0; a < d; ++a) x[a] += sqh * xi[a] - cfg.step * grad[a];
                double r = x.norm();
                if (r > guard) {
                    x *= (2.0 * guard - r) / r;
                    ++local_reflect;
                }
                ++step;
            };
            for (std::size_t s = 0; s < burn_steps; ++s) advance();
            ens.samples[0][i] = x;
            std::size_t next_obs = 1;
            for (std::size_t s = 0; s < run_steps; ++s) {
                advance();
                if ((s + 1) % obs_every == 0 && next_obs < n_obs) ens.samples[next_obs++][i] = x;
            }
        }
        reflect_count += local_reflect;
    });

    ens.reflections = reflect_count.load();
    ens.total_steps = std::size_t(cfg.ensemble) * (burn_steps + run_steps);
    ens.rejected = ens.reflections > ens.total_steps / 100;
    return ens;
}

void save_ensemble(const TrajectoryEnsemble& e, const std::string& path_prefix)
{
    const int d = e.samples.empty() || e.samples[0].empty() ? 0 : int(e.samples[0][0].size());
    std::ofstream bin(path_prefix + ".bin", std::ios::binary);
    for (const auto& frame : e.samples)
        for (const auto& x : frame)
            bin.write(reinterpret_cast<const char*>(x.data()), std::streamsize(sizeof(double) * d));
    std::ofstream side(path_prefix + ".json");
    side << "{\n  \"config_hash\": \"" << e.config_hash << "\",\n  \"seed\": " << e.config.seed
         << ",\n  \"eps\": " << e.config.eps << ",\n  \"step\": " << e.config.step
         << ",\n  \"dim\": " << d << ",\n  \"ensemble\": " << e.config.ensemble
         << ",\n  \"reflections\": " << e.reflections << ",\n  \"times\": [";
    for (std::size_t t = 0; t < e.times.size(); ++t)
        side << (t ? "," : "") << e.times[t];
    side << "]\n}\n";
}

GapEstimate estimate_gap_autocorr(const TrajectoryEnsemble& ens,
                                  const std::function<double(const Vec&)>& observable,
                                  double window_lo, double window_hi)
{
    const std::size_t T = ens.times.size();
    const std::size_t N = ens.samples.empty() ? 0 : ens.samples[0].size();
    if (T < 8 || N < 100)
        throw std::invalid_argument("estimate_gap_autocorr: ensemble too small");

    // observable matrix
    Mat F = Mat::Zero(Eigen::Index(T), Eigen::Index(N));
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t i = 0; i < N; ++i)
            F(Eigen::Index(t), Eigen::Index(i)) = observable(ens.samples[t][i]);
    double mean = F.mean();
    F.array() -= mean;
    double var = F.array().square().mean();
    if (var <= 0)
        throw std::invalid_argument("estimate_gap_autocorr: observable has zero variance");

    // pooled autocovariance over time origins and trajectories
    std::size_t max_lag = T - 1;
    std::vector<double> lag_t, log_c;
    double dt = ens.times[1] - ens.times[0];
    if (window_hi <= window_lo) {
        window_lo = 0.0;
        window_hi = ens.times[max_lag] * 0.5;
    }
    for (std::size_t l = 1; l <= max_lag; ++l) {
        double tau = l * dt;
        if (tau < window_lo || tau > window_hi) continue;
        double c = 0.0;
        std::size_t cnt = 0;
        for (std::size_t t = 0; t + l < T; ++t) {
            c += F.row(Eigen::Index(t)).dot(F.row(Eigen::Index(t + l)));
            cnt += N;
        }
        c /= double(cnt) * var;
        if (c <= 0.02) break;  // noise floor
        lag_t.push_back(tau);
        log_c.push_back(std::log(c));
    }
    if (lag_t.size() < 3)
        throw std::runtime_error("estimate_gap_autocorr: too few usable lags in the window");

    LinearFit fit = linear_fit(lag_t, log_c);
    GapEstimate est;
    est.rate = -fit.slope;
    est.r_squared = fit.r_squared;
    est.window_lo = lag_t.front();
    est.window_hi = lag_t.back();

    // spread over trajectory groups gives the confidence interval
    const int G = 8;
    std::vector<double> group_rates;
    for (int g = 0; g < G; ++g) {
        std::size_t glo = N * g / G, ghi = N * (g + 1) / G;
        std::vector<double> lt, lc;
        for (std::size_t l = 1; l <= max_lag; ++l) {
            double tau = l * dt;
            if (tau < window_lo || tau > window_hi) continue;
            double c = 0.0;
            std::size_t cnt = 0;
            for (std::size_t t = 0; t + l < T; ++t)
                for (std::size_t i = glo; i < ghi; ++i) {
                    c += F(Eigen::Index(t), Eigen::Index(i)) * F(Eigen::Index(t + l), Eigen::Index(i));
                    ++cnt;
                }
            c /= double(cnt) * var;
            if (c <= 0.02) break;
            lt.push_back(tau);
            lc.push_back(std::log(c));
        }
        if (lt.size() >= 3) group_rates.push_back(-linear_fit(lt, lc).slope);
    }
    if (group_rates.size() >= 4) {
        double se = std::sqrt(variance_of(group_rates) / double(group_rates.size()));
        est.ci_lo = est.rate - 2.0 * se;
        est.ci_hi = est.rate + 2.0 * se;
    } else {
        est.ci_lo = est.rate * 0.5;
        est.ci_hi = est.rate * 1.5;
    }
    est.low_confidence = est.r_squared < 0.9;
    return est;
}

std::vector<SweepRow> mixing_sweep(const ScalarField& field, const std::vector<double>& eps_list,
                                   const SimConfig& config_template,
                                   const std::function<double(const Vec&)>& observable)
{
    std::vector<SweepRow> rows;
    for (double eps : eps_list) {
        SimConfig cfg = config_template;
        cfg.eps = eps;
        TrajectoryEnsemble ens = simulate_ensemble(cfg, field);
        if (ens.rejected)
            throw std::runtime_error("mixing_sweep: step too large (reflection fraction > 1%)");
        GapEstimate est = estimate_gap_autocorr(ens, observable);
        SweepRow row;
        row.eps = eps;
        row.rate = est.rate;
        row.rate_over_eps = est.rate / eps;
        row.ci_lo = est.ci_lo;
        row.ci_hi = est.ci_hi;
        row.r_squared = est.r_squared;
        row.low_confidence = est.low_confidence;
        rows.push_back(row);
    }
    return rows;
}

TrajectoryEnsemble load_ensemble(const std::string& path_prefix)
{
    // minimal loader for round-trip checks: sidecar provides shapes
    std::ifstream side(path_prefix + ".json");
    if (!side) throw std::runtime_error("load_ensemble: missing sidecar");
    std::string all((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
    auto grab = [&](const std::string& key) {
        auto p = all.find("\"" + key + "\"");
        if (p == std::string::npos) throw std::runtime_error("load_ensemble: missing " + key);
        p = all.find(':', p);
        return std::strtod(all.c_str() + p + 1, nullptr);
    };
    int dim = int(grab("dim"));
    int ensemble = int(grab("ensemble"));
    TrajectoryEnsemble e;
    e.config.eps = grab("eps");
    e.config.step = grab("step");
    e.config.seed = std::uint64_t(grab("seed"));
    e.config.ensemble = ensemble;
    auto p = all.find("\"times\"");
    p = all.find('[', p);
    auto q = all.find(']', p);
    std::string list = all.substr(p + 1, q - p - 1);
    std::istringstream ls(list);
    std::string tok;
    while (std::getline(ls, tok, ',')) e.times.push_back(std::strtod(tok.c_str(), nullptr));

    std::ifstream bin(path_prefix + ".bin", std::ios::binary);
    e.samples.assign(e.times.size(), std::vector<Vec>(std::size_t(ensemble), Vec(dim)));
    for (auto& frame : e.samples)
        for (auto& x : frame)
            bin.read(reinterpret_cast<char*>(x.data()), std::streamsize(sizeof(double) * dim));
    auto hp = all.find("\"config_hash\"");
    hp = all.find(':', hp);
    hp = all.find('"', hp);
    auto hq = all.find('"', hp + 1);
    e.config_hash = all.substr(hp + 1, hq - hp - 1);
    return e;
}

}  // namespace gibbslab
