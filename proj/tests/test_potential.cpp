#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/potential.hpp"
#include "oracle_helpers.hpp"

using namespace gibbslab;

namespace {

Vec v2(double a, double b)
{
    Vec x(2);
    x << a, b;
    return x;
}

Vec v1(double a)
{
    Vec x(1);
    x << a;
    return x;
}

}  // namespace

TEST_CASE("eval_bundle closed forms")
{
    auto circle = make_potential("circle2d");
    // catalog fields are stored with min value 0, hence the +1/6 offset
    EvalBundle e = eval_bundle(*circle, v2(2, 0));
    CHECK(e.value == doctest::Approx(2.0 / 3.0 + 1.0 / 6.0).epsilon(1e-14));
    CHECK(e.gradient[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e.gradient[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(e.laplacian == doctest::Approx(4.0).epsilon(1e-14));

    EvalBundle s = eval_bundle(*circle, v2(1, 0));
    CHECK(s.gradient.norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.value == doctest::Approx(0.0).epsilon(1e-14));

    auto quad = make_potential("quadratic");
    EvalBundle q = eval_bundle(*quad, v2(3, 4));
    CHECK(q.value == doctest::Approx(12.5));
    CHECK(q.gradient[0] == doctest::Approx(3.0));
    CHECK(q.gradient[1] == doctest::Approx(4.0));
    CHECK(q.laplacian == doctest::Approx(2.0));

    Vec bad = v2(1, std::nan(""));
    CHECK_THROWS_AS(eval_bundle(*circle, bad), std::invalid_argument);
}

TEST_CASE("finite-difference consistency of every catalog entry")
{
    for (const auto& name : potential_names()) {
        auto field = make_potential(name);
        auto val = [&](const Vec& x) { return field->value(x); };
        for (int p = 0; p < 24; ++p) {
            Vec x(field->dim());
            for (int a = 0; a < field->dim(); ++a) {
                double z0, z1;
                Philox::normal_pair(42, std::uint32_t(p), std::uint64_t(a), 0, z0, z1);
                x[a] = 0.3 + 0.5 * z0;
            }
            CAPTURE(name);
            CHECK(field->value(x) >= field->global_min() - 1e-12);
            Vec g = field->gradient(x);
            Vec gfd = oracles::fd_gradient(val, x);
            CHECK((g - gfd).norm() <= 1e-6 * (1.0 + g.norm()));
            double lap = field->laplacian(x);
            double lfd = oracles::fd_laplacian(val, x);
            CHECK(std::abs(lap - lfd) <= 1e-5 * (1.0 + std::abs(lap)));
            Mat H = field->hessian(x);
            CHECK(std::abs(H.trace() - lap) <= 1e-9 * (1.0 + std::abs(lap)));
        }
    }
}

TEST_CASE("PL certification")
{
    auto circle = make_potential("circle2d");
    RegionSpec ns = RegionSpec::annulus(Vec::Zero(2), 0.5, 1.5);
    ProbePlan plan;
    PLCertificate pl = certify_pl(*circle, ns, plan);
    // analytic oracle: r^2 (r-1)^2 / V(r) over [0.5, 1.5], minimum 0.75 at 0.5
    auto ratio = [](double r) {
        double V = r * r * r / 3.0 - r * r / 2.0 + 1.0 / 6.0;
        return V > 1e-12 ? r * r * (r - 1.0) * (r - 1.0) / V : 2.0;
    };
    double oracle = oracles::min_over_grid(ratio, 0.5, 1.5, 200000);
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(pl.nu_hat == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(pl.worst_point.norm() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(pl.low_confidence);

    auto quad = make_potential("quadratic");
    PLCertificate plq = certify_pl(*quad, RegionSpec::ball(Vec::Zero(2), 1.0), plan);
    CHECK(plq.nu_hat == doctest::Approx(2.0).epsilon(1e-12));

    auto dw = make_potential("doublewell1d");
    PLCertificate pld = certify_pl(*dw, RegionSpec::box(v1(-2), v1(2)), plan);
    CHECK(pld.nu_hat == 0.0);  // stationary point at 0 with positive excess
}

TEST_CASE("PL certificates: region monotonicity and resolution stability")
{
    auto circle = make_potential("circle2d");
    ProbePlan plan;
    PLCertificate outer = certify_pl(*circle, RegionSpec::annulus(Vec::Zero(2), 0.5, 1.5), plan);
    PLCertificate inner = certify_pl(*circle, RegionSpec::annulus(Vec::Zero(2), 0.7, 1.3), plan);
    CHECK(inner.nu_hat >= outer.nu_hat - 1e-12);

    auto quad = make_potential("quadratic");
    PLCertificate qa = certify_pl(*quad, RegionSpec::ball(Vec::Zero(2), 1.0), plan);
    PLCertificate qb = certify_pl(*quad, RegionSpec::ball(Vec::Zero(2), 0.5), plan);
    CHECK(qb.nu_hat >= qa.nu_hat - 1e-12);

    ProbePlan fine = plan;
    fine.shells *= 2;
    fine.directions *= 2;
    for (const char* name : {"circle2d", "softwell2d"}) {
        auto f = make_potential(name);
        auto region = *catalog_info(name).N_S;
        double a = certify_pl(*f, region, plan).nu_hat;
        double b = certify_pl(*f, region, fine).nu_hat;
        CHECK(std::abs(a - b) <= 0.05 * std::abs(a));
    }
}

TEST_CASE("error-bound certification")
{
    auto circle = make_potential("circle2d");
    ProbePlan plan;
    ErrorBoundCertificate eb =
        certify_error_bound(*circle, RegionSpec::annulus(Vec::Zero(2), 2.0, 10.0), plan);
    CHECK(eb.nu_eb_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(eb.worst_point.norm() == doctest::Approx(2.0).epsilon(1e-9));

    ErrorBoundCertificate ebn =
        certify_error_bound(*circle, RegionSpec::annulus(Vec::Zero(2), 0.9, 1.1), plan);
    CHECK(ebn.nu_eb_hat == doctest::Approx(0.9).epsilon(1e-12));

    auto quad = make_potential("quadratic");
    ErrorBoundCertificate ebq =
        certify_error_bound(*quad, RegionSpec::annulus(Vec::Zero(2), 1.0, 10.0), plan);
    CHECK(ebq.nu_eb_hat == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("growth certification")
{
    auto circle = make_potential("circle2d");
    ProbePlan plan;
    GrowthCertificate g = certify_growth(*circle, 2.0, plan, 100.0);
    double oracle = oracles::max_over_grid([](double r) { return (3.0 * r - 2.0) / (r * r); },
                                           2.0, 100.0);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.C_g == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_FALSE(g.diverging);

    auto quad = make_potential("quadratic");
    GrowthCertificate gq = certify_growth(*quad, 1.0, plan);
    CHECK(gq.C_g == doctest::Approx(2.0).epsilon(1e-12));  // lap V = d at |x| = 1

    auto quartic = make_potential("quartic");
    GrowthCertificate g4 = certify_growth(*quartic, 1.0, plan);
    CHECK(g4.C_g == doctest::Approx(4.0).epsilon(1e-12));  // lap V = (d+2) r^2 exactly
    CHECK_FALSE(g4.diverging);
}

TEST_CASE("critical point location and g0")
{
    auto circle = make_potential("circle2d");
    RegionSpec region = RegionSpec::minus(
        RegionSpec::box(v2(-3, -3), v2(3, 3)),
        {RegionSpec::annulus(Vec::Zero(2), 0.75, 1.25), RegionSpec::ball(Vec::Zero(2), 0.25)});
    CriticalPointReport rep = locate_critical_points(*circle, region);
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].location.norm() <= 1e-7);
    CHECK(rep.points[0].type == CriticalPoint::Type::Maximum);
    CHECK(rep.points[0].smallest_eigenvalue == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.points[0].largest_eigenvalue == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(rep.points[0].gradient_norm <= 1e-8);
    // analytic: min of r|r-1| over [0.25, 0.75] u [1.25, 3 sqrt(2)]
    CHECK(rep.g0 == doctest::Approx(0.1875).epsilon(1e-9));

    auto dw = make_potential("doublewell1d");
    CriticalPointReport rd = locate_critical_points(*dw, RegionSpec::box(v1(-2), v1(2)));
    REQUIRE(rd.points.size() == 3);
    int minima = 0, maxima = 0;
    for (const auto& p : rd.points) {
        if (p.type == CriticalPoint::Type::Minimum) {
            ++minima;
            CHECK(std::abs(std::abs(p.location[0]) - 1.0) <= 1e-8);
            CHECK(p.smallest_eigenvalue == doctest::Approx(2.0).epsilon(1e-6));
        }
        if (p.type == CriticalPoint::Type::Maximum) {
            ++maxima;
            CHECK(std::abs(p.location[0]) <= 1e-8);
            CHECK(p.largest_eigenvalue == doctest::Approx(-1.0).epsilon(1e-6));
        }
    }
    CHECK(minima == 2);
    CHECK(maxima == 1);

    auto quad = make_potential("quadratic");
    CriticalPointReport rq = locate_critical_points(*quad, RegionSpec::box(v2(-2, -2), v2(2, 2)));
    REQUIRE(rq.points.size() == 1);
    CHECK(rq.points[0].type == CriticalPoint::Type::Minimum);
    CHECK(rq.points[0].location.norm() <= 1e-8);
}

TEST_CASE("connectivity probe")
{
    auto circle = make_potential("circle2d");
    RegionSpec box = RegionSpec::box(v2(-2, -2), v2(2, 2));
    for (double c : {0.01, 0.08, 0.16, 0.2, 0.5})
        CHECK(connectivity_probe(*circle, c, box) == 1);

    auto dw = make_potential("doublewell1d");
    RegionSpec boxd = RegionSpec::box(v1(-2), v1(2));
    CHECK(connectivity_probe(*dw, 0.1, boxd, 4001) == 2);
    CHECK(connectivity_probe(*dw, 0.24, boxd, 4001) == 2);
    CHECK(connectivity_probe(*dw, 0.26, boxd, 4001) == 1);

    auto quad = make_potential("quadratic");
    for (double c : {0.1, 1.0, 3.0})
        CHECK(connectivity_probe(*quad, c, RegionSpec::box(v2(-3, -3), v2(3, 3))) == 1);

    CHECK_THROWS(connectivity_probe(*quad, -0.1, box));
}

TEST_CASE("softwell profile matches its declared constants")
{
    auto soft = make_potential("softwell2d");
    for (double r : {0.2, 0.8}) {
        Vec xm = v2(r - 1e-7, 0), xp = v2(r + 1e-7, 0);
        CHECK(std::abs(soft->value(xp) - soft->value(xm)) <= 1e-6);
        CHECK((soft->gradient(xp) - soft->gradient(xm)).norm() <= 1e-5);
    }
    CHECK(soft->value(v2(0, 0)) == doctest::Approx(0.165).epsilon(1e-12));
    CHECK(soft->value(v2(1, 0)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(soft->value(v2(1.2, 0)) == doctest::Approx(0.02).epsilon(1e-13));
    CHECK(soft->laplacian(v2(0.05, 0)) == doctest::Approx(-1.0).epsilon(1e-13));
}
