#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/experiments.hpp"
#include "gibbslab/langevin.hpp"

#include <cstdio>
#include <cstdlib>

using namespace gibbslab;

namespace {

Vec v1(double a)
{
    Vec x(1);
    x << a;
    return x;
}

Vec v2(double a, double b)
{
    Vec x(2);
    x << a, b;
    return x;
}

}  // namespace

TEST_CASE("counter-based generator matches the published reference vectors")
{
    std::uint32_t out[4];
    Philox::block(0, 0, 0, 0, out);
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    std::uint32_t c[4] = {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u};
    std::uint32_t k[2] = {0xa4093822u, 0x299f31d0u};
    for (int r = 0; r < 10; ++r) {
        Philox::round(c, k);
        k[0] += Philox::W0;
        k[1] += Philox::W1;
    }
    CHECK(c[0] == 0xd16cfe09u);
    CHECK(c[1] == 0x94fdccebu);
    CHECK(c[2] == 0x5001e420u);
    CHECK(c[3] == 0x24126ea1u);
}

TEST_CASE("em_step closed forms")
{
    auto circle = make_potential("circle2d");
    Vec on_S = v2(1, 0);
    CHECK((em_step(on_S, *circle, 0.02, 0.5, Vec::Zero(2)) - on_S).norm() <= 1e-15);

    Vec kicked = em_step(on_S, *circle, 0.02, 0.5, v2(1, 0));
    CHECK(kicked[0] == doctest::Approx(1.0 + std::sqrt(0.02)).epsilon(1e-14));
    CHECK(kicked[1] == doctest::Approx(0.0));

    auto ou = make_potential("quadratic1d");
    Vec x = em_step(v1(1.0), *ou, 0.1, 0.25, Vec::Zero(1));
    CHECK(x[0] == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("zero-noise gradient flow reaches the optimal circle")
{
    auto circle = make_potential("circle2d");
    Vec x = v2(2, 0);
    for (int i = 0; i < 4000; ++i) x = em_step(x, *circle, 0.01, 0.0, Vec::Zero(2));
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(x[1]) <= 1e-12);
}

TEST_CASE("bit-exact reproducibility across thread schedules")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 1e-3;
    cfg.horizon = 2.0;
    cfg.ensemble = 128;
    cfg.seed = 31337;
    cfg.obs_dt = 0.25;

    setenv("GIBBSLAB_THREADS", "1", 1);
    TrajectoryEnsemble a = simulate_ensemble(cfg, *ou);
    setenv("GIBBSLAB_THREADS", "7", 1);
    TrajectoryEnsemble b = simulate_ensemble(cfg, *ou);
    unsetenv("GIBBSLAB_THREADS");

    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t t = 0; t < a.samples.size(); ++t)
        for (std::size_t i = 0; i < a.samples[t].size(); ++i)
            CHECK(a.samples[t][i][0] == b.samples[t][i][0]);
    CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("OU stationary variance matches the AR(1) recursion value")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 1e-3;
    cfg.horizon = 10.0;
    cfg.ensemble = 4000;
    cfg.seed = 7;
    cfg.obs_dt = 5.0;
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *ou);
    CHECK_FALSE(ens.rejected);

    // last frame: i.i.d. across trajectories at stationarity
    const auto& frame = ens.samples.back();
    std::vector<double> xs(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) xs[i] = frame[i][0];
    double var = variance_of(xs);
    double ar1 = cfg.eps / (1.0 - cfg.step / 2.0);
    double se = ar1 * std::sqrt(2.0 / double(xs.size() - 1));
    CHECK(std::abs(var - ar1) <= 3.0 * se);
}

TEST_CASE("circle radial marginal concentrates at width sqrt(eps)")
{
    auto circle = make_potential("circle2d");
    SimConfig cfg;
    cfg.eps = 0.01;
    cfg.step = 6e-5;  // guard ball has Lipschitz bound 15
    cfg.horizon = 3.0;
    cfg.ensemble = 2000;
    cfg.seed = 21;
    cfg.obs_dt = 1.5;
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *circle);
    std::vector<double> dr;
    for (const auto& x : ens.samples.back()) dr.push_back(x.norm() - 1.0);
    double sd = std::sqrt(variance_of(dr));
    CHECK(sd == doctest::Approx(std::sqrt(cfg.eps)).epsilon(0.10));
}

TEST_CASE("autocorrelation gap for OU")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 1e-3;
    cfg.horizon = 40.0;
    cfg.ensemble = 2000;
    cfg.seed = 5;
    cfg.obs_dt = 0.1;
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *ou);
    GapEstimate est = estimate_gap_autocorr(ens, [](const Vec& x) { return x[0]; }, 0.2, 2.5);
    CHECK(est.rate == doctest::Approx(1.0).epsilon(0.15));
    CHECK_FALSE(est.low_confidence);

    // observable independence: x^3 decays at the same slowest rate
    GapEstimate cubic =
        estimate_gap_autocorr(ens, [](const Vec& x) { return x[0] * x[0] * x[0]; }, 1.5, 3.5);
    bool overlap = cubic.ci_lo <= est.ci_hi && est.ci_lo <= cubic.ci_hi;
    CHECK(overlap);
}

TEST_CASE("step-halving changes the OU rate within the bias model")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 4e-3;
    cfg.horizon = 40.0;
    cfg.ensemble = 2000;
    cfg.seed = 9;
    cfg.obs_dt = 0.1;
    TrajectoryEnsemble coarse = simulate_ensemble(cfg, *ou);
    cfg.step = 2e-3;
    TrajectoryEnsemble fine = simulate_ensemble(cfg, *ou);
    auto obs = [](const Vec& x) { return x[0]; };
    double ra = estimate_gap_autocorr(coarse, obs, 0.2, 2.5).rate;
    double rb = estimate_gap_autocorr(fine, obs, 0.2, 2.5).rate;
    // O(h) bias plus statistical noise
    CHECK(std::abs(ra - rb) <= 0.05 + 2.0 * 4e-3);
}

TEST_CASE("energy sanity: ensemble mean of V vs grid quadrature")
{
    auto circle = make_potential("circle2d");
    double eps = 0.05;
    SimConfig cfg;
    cfg.eps = eps;
    cfg.step = 3e-4;
    cfg.horizon = 4.0;
    cfg.ensemble = 3000;
    cfg.seed = 13;
    cfg.obs_dt = 2.0;
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *circle);

    std::vector<double> vs;
    for (const auto& x : ens.samples.back()) vs.push_back(circle->value(x));
    double mean_sim = mean_of(vs);
    double se = std::sqrt(variance_of(vs) / double(vs.size()));

    // 2D tensor-grid quadrature of V e^{-V/eps} / Z
    double num = 0.0, den = 0.0;
    int n = 600;
    double b = 2.5, h = 2.0 * b / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec x = v2(-b + (i + 0.5) * h, -b + (j + 0.5) * h);
            double w = std::exp(-circle->value(x) / eps);
            num += circle->value(x) * w;
            den += w;
        }
    double mean_grid = num / den;
    CHECK(std::abs(mean_sim - mean_grid) <= 3.0 * se);
}

TEST_CASE("reflection guard counts and rejects")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 1e-3;
    cfg.horizon = 5.0;
    cfg.ensemble = 200;
    cfg.seed = 3;
    cfg.obs_dt = 1.0;
    cfg.guard_radius = 0.2;  // well inside the stationary spread
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *ou);
    CHECK(ens.reflections > 0);
    CHECK(ens.rejected);
}

TEST_CASE("ensemble save/load round-trip")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 1e-3;
    cfg.horizon = 1.0;
    cfg.ensemble = 128;
    cfg.seed = 77;
    cfg.obs_dt = 0.5;
    TrajectoryEnsemble ens = simulate_ensemble(cfg, *ou);
    save_ensemble(ens, "/tmp/gibbslab_ens_test");
    TrajectoryEnsemble back = load_ensemble("/tmp/gibbslab_ens_test");
    REQUIRE(back.samples.size() == ens.samples.size());
    for (std::size_t t = 0; t < ens.samples.size(); ++t)
        for (std::size_t i = 0; i < ens.samples[t].size(); ++i)
            CHECK(back.samples[t][i][0] == ens.samples[t][i][0]);
    CHECK(back.config_hash == ens.config_hash);
    std::remove("/tmp/gibbslab_ens_test.bin");
    std::remove("/tmp/gibbslab_ens_test.json");
}

TEST_CASE("mixing sweep on OU is flat")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.step = 1e-3;
    cfg.horizon = 30.0;
    cfg.ensemble = 1000;
    cfg.seed = 17;
    cfg.obs_dt = 0.1;
    auto rows = mixing_sweep(*ou, {0.1, 0.05}, cfg, [](const Vec& x) { return x[0]; });
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.rate == doctest::Approx(1.0).epsilon(0.15));  // eps-free OU gap
        CHECK_FALSE(r.low_confidence);
    }
    CHECK(rows[0].rate_over_eps / rows[1].rate_over_eps == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("step bound invariant is enforced")
{
    auto ou = make_potential("quadratic1d");
    SimConfig cfg;
    cfg.eps = 0.1;
    cfg.step = 0.5;  // far above eps/(10 L)
    cfg.ensemble = 128;
    CHECK_THROWS_AS(simulate_ensemble(cfg, *ou), std::invalid_argument);
    cfg.step = 1e-3;
    cfg.ensemble = 10;  // too small for rate estimation
    CHECK_THROWS_AS(simulate_ensemble(cfg, *ou), std::invalid_argument);
}
