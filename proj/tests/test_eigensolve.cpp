#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/eigensolve.hpp"
#include "oracle_helpers.hpp"

using namespace gibbslab;

namespace {

Vec v1(double a)
{
    Vec x(1);
    x << a;
    return x;
}

DiscreteOperator diag_operator(const std::vector<double>& d)
{
    DiscreteOperator op;
    int n = int(d.size());
    op.B.resize(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, d[std::size_t(i)]);
    op.B.setFromTriplets(trip.begin(), trip.end());
    op.w = Vec::Ones(n);
    op.sqrt_w = Vec::Ones(n);
    op.tag = "diag";
    op.dim = 1;
    return op;
}

}  // namespace

TEST_CASE("diagonal operator smallest eigenvalues")
{
    DiscreteOperator op = diag_operator({0.0, 1.0, 4.0, 9.0});
    EigenOptions eo;
    eo.m = 2;
    SpectrumResult sp = smallest_eigenvalues(op, eo);
    REQUIRE(sp.eigenvalues.size() >= 2);
    CHECK(sp.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(sp.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("interval Neumann modes {0, pi^2, 4 pi^2}")
{
    GridDomain g = GridDomain::box(v1(0), v1(1), 1.0 / 512);
    DiscreteOperator op = assemble_neumann_laplacian(g);
    EigenOptions eo;
    eo.m = 4;
    SpectrumResult sp = smallest_eigenvalues(op, eo);
    CHECK(sp.eigenvalues[0] <= 1e-8);
    CHECK(sp.eigenvalues[1] == doctest::Approx(M_PI * M_PI).epsilon(2e-3));
    CHECK(sp.eigenvalues[2] == doctest::Approx(4 * M_PI * M_PI).epsilon(2e-3));
    for (double r : sp.residuals) CHECK(r <= 1e-6);
}

TEST_CASE("iterative path agrees with the dense oracle")
{
    GridDomain g = GridDomain::box(v1(0), v1(1), 1.0 / 1024);
    DiscreteOperator op = assemble_neumann_laplacian(g);
    SpectrumResult dense = smallest_eigenvalues(op);
    EigenOptions eo;
    eo.force_iterative = true;
    eo.m = 4;
    eo.shift_hint = M_PI * M_PI;
    SpectrumResult iter = smallest_eigenvalues(op, eo);
    CHECK(iter.converged);
    for (int i = 1; i < 4; ++i)
        CHECK(iter.eigenvalues[std::size_t(i)] ==
              doctest::Approx(dense.eigenvalues[std::size_t(i)]).epsilon(1e-9));
}

TEST_CASE("rayleigh quotient: witnesses and the min-max direction")
{
    GridDomain g = GridDomain::box(v1(0), v1(1), 1.0 / 512);
    DiscreteOperator op = assemble_neumann_laplacian(g);
    SpectrumResult sp = smallest_eigenvalues(op);
    double lam1 = sp.lambda1();

    Vec u(op.size());
    for (Eigen::Index i = 0; i < op.size(); ++i) {
        double x = (double(i) + 0.5) / double(op.size());
        u[i] = std::cos(M_PI * x);
    }
    double q = rayleigh_quotient(op, u);
    CHECK(q == doctest::Approx(M_PI * M_PI).epsilon(2e-3));
    CHECK(q >= lam1 - 1e-10);

    for (int trial = 0; trial < 50; ++trial) {
        Vec r(op.size());
        for (Eigen::Index i = 0; i < op.size(); ++i) {
            double z0, z1;
            Philox::normal_pair(11, std::uint32_t(trial), std::uint64_t(i), 0, z0, z1);
            r[i] = z0;
        }
        CHECK(rayleigh_quotient(op, r) >= lam1 - 1e-10);
    }

    Vec constant = Vec::Ones(op.size());
    CHECK_THROWS(rayleigh_quotient(op, constant));

    RayleighWitness w = make_rayleigh_witness(op, u);
    CHECK(w.mean_zero);
    CHECK(w.quotient == doctest::Approx(q));
}

TEST_CASE("first eigenvector reproduces lambda1 through the quotient")
{
    auto sdf = [](const Vec& x) { return 0.1 - std::abs(x.norm() - 1.0); };
    Vec lo(2), hi(2);
    lo << -1.15, -1.15;
    hi << 1.15, 1.15;
    GridDomain g = GridDomain::masked(lo, hi, 1.0 / 160, sdf);
    DiscreteOperator op = assemble_neumann_laplacian(g);
    Mat vecs;
    EigenOptions eo;
    eo.m = 3;
    eo.shift_hint = 1.0;
    SpectrumResult sp = smallest_eigenpairs(op, vecs, eo);
    Vec f = vecs.col(0).cwiseQuotient(op.sqrt_w);  // weighted-picture eigenvector
    double q = rayleigh_quotient(op, f);
    CHECK(q == doctest::Approx(sp.lambda1()).epsilon(1e-8));
}

TEST_CASE("grid refinement and Richardson monotonicity")
{
    double exact = M_PI * M_PI;
    std::vector<double> lam;
    for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256}) {
        GridDomain g = GridDomain::box(v1(0), v1(1), h);
        lam.push_back(smallest_eigenvalues(assemble_neumann_laplacian(g)).lambda1());
    }
    double e0 = std::abs(lam[0] - exact), e1 = std::abs(lam[1] - exact),
           e2 = std::abs(lam[2] - exact);
    CHECK(e1 <= e0);
    CHECK(e2 <= e1);
    // second-order model: halving h divides the error by about 4
    CHECK(e0 / e1 == doctest::Approx(4.0).epsilon(0.2));
    double rich = (4.0 * lam[2] - lam[1]) / 3.0;
    CHECK(std::abs(rich - exact) <= 0.1 * e2);
}
