#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/spectral.hpp"
#include "oracle_helpers.hpp"

using namespace gibbslab;

TEST_CASE("Laplace-Beltrami gaps on catalog manifolds")
{
    SpectrumResult c = laplace_beltrami_gap(*make_manifold("circle"), 256);
    CHECK(c.lambda1() == doctest::Approx(1.0).epsilon(2e-3));
    REQUIRE(c.multiplicities.size() >= 2);
    CHECK(c.multiplicities[1] == 2);  // e^{+-i theta}
    REQUIRE(c.extrapolated.has_value());
    CHECK(std::abs(*c.extrapolated - 1.0) <= std::abs(c.lambda1() - 1.0));

    SpectrumResult c2 = laplace_beltrami_gap(*make_manifold("circleR"), 256);
    CHECK(c2.lambda1() == doctest::Approx(0.25).epsilon(2e-3));

    SpectrumResult s = laplace_beltrami_gap(*make_manifold("sphere"), 128);
    CHECK(s.lambda1() == doctest::Approx(2.0).epsilon(2e-3));
    // three eigenvalues of the ell=1 band, then the jump to ell=2
    REQUIRE(s.eigenvalues.size() >= 5);
    for (int i = 1; i <= 3; ++i)
        CHECK(s.eigenvalues[std::size_t(i)] == doctest::Approx(2.0).epsilon(2e-3));
    CHECK(s.eigenvalues[4] > 5.0);
}

TEST_CASE("torus gap is stable under refinement")
{
    SpectrumResult a = laplace_beltrami_gap(*make_manifold("torus"), 96);
    SpectrumResult b = laplace_beltrami_gap(*make_manifold("torus"), 192);
    CHECK(a.lambda1() == doctest::Approx(b.lambda1()).epsilon(2e-3));
    CHECK(b.lambda1() > 0.2);
    CHECK(b.lambda1() < 0.3);
}

TEST_CASE("LB operator invariants")
{
    DiscreteOperator op = assemble_laplace_beltrami(*make_manifold("sphere"), 64);
    CHECK(op.symmetry_defect() <= 1e-10);
    CHECK(op.zero_mode_residual() <= 1e-10);
}

TEST_CASE("tensorization: min rule and the interval gap formula")
{
    CHECK(tensor_gap(1.0, 100.0) == 1.0);
    CHECK(tensor_gap(2.0, 2.0) == 2.0);
    CHECK_THROWS(tensor_gap(-1.0, 1.0));

    // circle tube, radius 0.05: normal-ball gap (pi/0.1)^2 dominates
    double normal_gap = interval_neumann_gap(0.05);
    CHECK(normal_gap == doctest::Approx(986.96).epsilon(1e-4));
    CHECK(tensor_gap(1.0, normal_gap) == 1.0);

    // cross-check the formula with the solver
    Vec lo(1), hi(1);
    lo << -0.05;
    hi << 0.05;
    GridDomain g = GridDomain::box(lo, hi, 0.1 / 512);
    double solver = smallest_eigenvalues(assemble_neumann_laplacian(g)).lambda1();
    CHECK(solver == doctest::Approx(normal_gap).epsilon(1e-3));
}

TEST_CASE("tube stability on the unit circle (short list)")
{
    TubeStabilityOptions opt;
    opt.cells_across = 24;
    TubeStabilityReport rep = tube_stability_report(*make_manifold("circle"), {0.2, 0.1, 0.05}, opt);
    CHECK(rep.lambda_S == doctest::Approx(1.0).epsilon(1e-3));
    for (const auto& row : rep.rows) {
        double oracle = oracles::shell_neumann_eigenvalue(1.0 - row.radius, 1.0 + row.radius, 1, 2,
                                                          0.5, 2.0);
        CHECK(std::abs(row.lambda1 - oracle) / oracle <= 5e-3);
    }
    CHECK(rep.monotone);
    CHECK(rep.B_admissible > 0);
    CHECK(std::abs(rep.extrapolated_limit - 1.0) <= 0.01);
}

TEST_CASE("tube stability on the 3d sphere shell (loose)")
{
    TubeStabilityOptions opt;
    opt.cells_across = 5;
    opt.max_h = 0.04;
    opt.lb_resolution = 128;
    TubeStabilityReport rep = tube_stability_report(*make_manifold("sphere"), {0.12, 0.1}, opt);
    CHECK(rep.lambda_S == doctest::Approx(2.0).epsilon(1e-3));
    for (const auto& row : rep.rows)
        CHECK(std::abs(row.lambda1 - 2.0) <= 0.2);
}

TEST_CASE("radius beyond reach is rejected")
{
    CHECK_THROWS(tube_stability_report(*make_manifold("circle"), {0.5, 1.2}));
}
