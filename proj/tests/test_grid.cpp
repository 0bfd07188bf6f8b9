#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gibbslab/grid.hpp"

#include <cmath>

using namespace gibbslab;

namespace {

Vec v2(double a, double b)
{
    Vec x(2);
    x << a, b;
    return x;
}

}  // namespace

TEST_CASE("box grid layout")
{
    GridDomain g = GridDomain::box(v2(-1, -1), v2(1, 1), 0.25);
    CHECK(g.n[0] == 8);
    CHECK(g.n[1] == 8);
    CHECK(g.n_active() == 64);
    CHECK(g.connected_components() == 1);
    Vec c = g.cell_center(0);
    CHECK(c[0] == doctest::Approx(-1 + 0.125));
    CHECK(c[1] == doctest::Approx(-1 + 0.125));
}

TEST_CASE("cut-cell annulus: area and connectivity")
{
    double R = 1.0, et = 0.1, h = 1.0 / 200;
    auto sdf = [&](const Vec& x) { return et - std::abs(x.norm() - R); };
    GridDomain g = GridDomain::masked(v2(-1.2, -1.2), v2(1.2, 1.2), h, sdf);
    CHECK(g.connected_components() == 1);
    double area = 0.0, cellvol = g.h[0] * g.h[1];
    for (std::size_t i = 0; i < g.n_active(); ++i)
        area += g.volfrac[std::size_t(g.active[i])] * cellvol;
    double exact = M_PI * (std::pow(R + et, 2) - std::pow(R - et, 2));
    CHECK(area == doctest::Approx(exact).epsilon(1e-5));
}

TEST_CASE("cut-cell 3d shell volume")
{
    double et = 0.1, h = 0.03;
    auto sdf = [&](const Vec& x) { return et - std::abs(x.norm() - 1.0); };
    Vec lo = Vec::Constant(3, -1.25), hi = Vec::Constant(3, 1.25);
    GridDomain g = GridDomain::masked(lo, hi, h, sdf);
    CHECK(g.connected_components() == 1);
    double vol = 0.0, cellvol = g.h[0] * g.h[1] * g.h[2];
    for (std::size_t i = 0; i < g.n_active(); ++i)
        vol += g.volfrac[std::size_t(g.active[i])] * cellvol;
    double exact = 4.0 * M_PI / 3.0 * (std::pow(1.1, 3) - std::pow(0.9, 3));
    CHECK(vol == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("disconnected masks are detected")
{
    auto sdf = [](const Vec& x) {
        double d1 = 0.2 - (x - v2(-0.5, 0)).norm();
        double d2 = 0.2 - (x - v2(0.5, 0)).norm();
        return std::max(d1, d2);
    };
    GridDomain g = GridDomain::masked(v2(-1, -1), v2(1, 1), 0.02, sdf);
    CHECK(g.connected_components() == 2);
}

TEST_CASE("mask RLE round-trip")
{
    auto sdf = [](const Vec& x) { return 0.15 - std::abs(x.norm() - 0.7); };
    GridDomain g = GridDomain::masked(v2(-1, -1), v2(1, 1), 0.01, sdf);
    auto rle = mask_to_rle(g);
    auto mask = rle_to_mask(rle, g.total_cells());
    std::size_t active = 0;
    for (std::size_t c = 0; c < g.total_cells(); ++c) {
        CHECK(mask[c] == (g.index[c] >= 0));
        if (mask[c]) ++active;
    }
    CHECK(active == g.n_active());
    CHECK_THROWS(rle_to_mask(rle, g.total_cells() + 1));
}
