#include "gibbslab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gibbslab {

std::size_t GridDomain::total_cells() const
{
    std::size_t t = 1;
    for (int a = 0; a < dim; ++a) t *= std::size_t(n[a]);
    return t;
}

std::size_t GridDomain::stride(int axis) const
{
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= std::size_t(n[a]);
    return s;
}

Vec GridDomain::cell_center(std::int64_t cell) const
{
    Vec x(dim);
    std::int64_t rem = cell;
    for (int a = 0; a < dim; ++a) {
        int ia = int(rem % n[a]);
        rem /= n[a];
        x[a] = lo[a] + (ia + 0.5) * h[a];
    }
    return x;
}

std::int64_t GridDomain::cell_of(const std::vector<int>& multi) const
{
    std::int64_t c = 0;
    for (int a = dim - 1; a >= 0; --a) c = c * n[a] + multi[a];
    return c;
}

namespace {

void init_box(GridDomain& g, const Vec& lo, const Vec& hi, double target_h,
              GridDomain::Boundary b)
{
    g.dim = int(lo.size());
    g.lo = lo;
    g.hi = hi;
    g.boundary = b;
    g.n.resize(g.dim);
    g.h.resize(g.dim);
    for (int a = 0; a < g.dim; ++a) {
        g.n[a] = std::max(2, int(std::ceil((hi[a] - lo[a]) / target_h)));
        g.h[a] = (hi[a] - lo[a]) / g.n[a];
    }
}

/// Clipped-polygon area fraction of {sdf >= 0} in the unit square, from the
/// four corner values (linear interpolation along edges).
double square_fraction(double s00, double s10, double s11, double s01)
{
    const double sv[4] = {s00, s10, s11, s01};
    const double px[4] = {0, 1, 1, 0};
    const double py[4] = {0, 0, 1, 1};
    if (sv[0] >= 0 && sv[1] >= 0 && sv[2] >= 0 && sv[3] >= 0) return 1.0;
    if (sv[0] < 0 && sv[1] < 0 && sv[2] < 0 && sv[3] < 0) return 0.0;
    double qx[8], qy[8];
    int m = 0;
    for (int k = 0; k < 4; ++k) {
        int k2 = (k + 1) % 4;
        if (sv[k] >= 0) {
            qx[m] = px[k];
            qy[m] = py[k];
            ++m;
        }
        if ((sv[k] >= 0) != (sv[k2] >= 0)) {
            double t = sv[k] / (sv[k] - sv[k2]);
            qx[m] = px[k] + t * (px[k2] - px[k]);
            qy[m] = py[k] + t * (py[k2] - py[k]);
            ++m;
        }
    }
    double area = 0.0;
    for (int k = 0; k < m; ++k) {
        int k2 = (k + 1) % m;
        area += qx[k] * qy[k2] - qx[k2] * qy[k];
    }
    return std::abs(area) * 0.5;
}

double edge_fraction(double s0, double s1)
{
    if (s0 >= 0 && s1 >= 0) return 1.0;
    if (s0 < 0 && s1 < 0) return 0.0;
    double t = s0 / (s0 - s1);
    return s0 >= 0 ? t : 1.0 - t;
}

}  // namespace

GridDomain GridDomain::box(const Vec& lo, const Vec& hi, double target_h, Boundary b)
{
    GridDomain g;
    init_box(g, lo, hi, target_h, b);
    std::size_t total = g.total_cells();
    g.volfrac.assign(total, 1.0);
    g.index.resize(total);
    g.active.resize(total);
    for (std::size_t c = 0; c < total; ++c) {
        g.index[c] = std::int64_t(c);
        g.active[c] = std::int64_t(c);
    }
    // aperture[a][c] refers to the face between c and its +a neighbor; cells
    // on the upper axis boundary have no such face
    g.aperture.assign(g.dim, std::vector<double>(total, 1.0));
    for (int a = 0; a < g.dim; ++a) {
        for (std::size_t c = 0; c < total; ++c) {
            std::size_t rem = c;
            for (int b = 0; b < a; ++b) rem /= std::size_t(g.n[b]);
            if (int(rem % std::size_t(g.n[a])) + 1 == g.n[a]) g.aperture[a][c] = 0.0;
        }
    }
    return g;
}

GridDomain GridDomain::masked(const Vec& lo, const Vec& hi, double target_h,
                              const std::function<double(const Vec&)>& sdf, Boundary b)
{
    GridDomain g;
    init_box(g, lo, hi, target_h, b);
    const int d = g.dim;
    if (d < 1 || d > 3) throw std::invalid_argument("GridDomain::masked: dim must be 1..3");
    std::size_t total = g.total_cells();

    // corner lattice of sdf values
    std::vector<int> cn(d);
    std::size_t ctotal = 1;
    for (int a = 0; a < d; ++a) {
        cn[a] = g.n[a] + 1;
        ctotal *= std::size_t(cn[a]);
    }
    std::vector<double> S(ctotal);
    std::vector<std::size_t> cstride(d);
    cstride[0] = 1;
    for (int a = 1; a < d; ++a) cstride[a] = cstride[a - 1] * std::size_t(cn[a - 1]);
    parallel_for(ctotal, [&](std::size_t lo_i, std::size_t hi_i) {
        for (std::size_t ci = lo_i; ci < hi_i; ++ci) {
            std::size_t rem = ci;
            Vec x(d);
            for (int a = 0; a < d; ++a) {
                int ia = int(rem % std::size_t(cn[a]));
                rem /= std::size_t(cn[a]);
                x[a] = g.lo[a] + ia * g.h[a];
            }
            S[ci] = sdf(x);
        }
    });
    auto corner = [&](const std::vector<int>& ic) {
        std::size_t c = 0;
        for (int a = 0; a < d; ++a) c += std::size_t(ic[a]) * cstride[a];
        return S[c];
    };

    g.volfrac.assign(total, 0.0);
    parallel_for(total, [&](std::size_t lo_i, std::size_t hi_i) {
        std::vector<int> ic(d);
        for (std::size_t c = lo_i; c < hi_i; ++c) {
            std::size_t rem = c;
            for (int a = 0; a < d; ++a) {
                ic[a] = int(rem % std::size_t(g.n[a]));
                rem /= std::size_t(g.n[a]);
            }
            if (d == 1) {
                g.volfrac[c] = edge_fraction(corner({ic[0]}), corner({ic[0] + 1}));
            } else if (d == 2) {
                g.volfrac[c] = square_fraction(
                    corner({ic[0], ic[1]}), corner({ic[0] + 1, ic[1]}),
                    corner({ic[0] + 1, ic[1] + 1}), corner({ic[0], ic[1] + 1}));
            } else {
                // volume by 4-point Gauss along x of (y,z) slice areas,
                // sdf evaluated directly on slice corners
                double s000 = corner({ic[0], ic[1], ic[2]});
                double smin = s000, smax = s000;
                for (int dx = 0; dx <= 1; ++dx)
                    for (int dy = 0; dy <= 1; ++dy)
                        for (int dz = 0; dz <= 1; ++dz) {
                            double v = corner({ic[0] + dx, ic[1] + dy, ic[2] + dz});
                            smin = std::min(smin, v);
                            smax = std::max(smax, v);
                        }
                if (smin >= 0) {
                    g.volfrac[c] = 1.0;
                } else if (smax < 0) {
                    g.volfrac[c] = 0.0;
                } else {
                    static const double gx[4] = {0.069431844202973714, 0.33000947820757187,
                                                 0.66999052179242813, 0.93056815579702623};
                    static const double gw[4] = {0.17392742256872693, 0.32607257743127307,
                                                 0.32607257743127307, 0.17392742256872693};
                    double x0 = g.lo[0] + ic[0] * g.h[0];
                    double y0 = g.lo[1] + ic[1] * g.h[1];
                    double z0 = g.lo[2] + ic[2] * g.h[2];
                    double acc = 0.0;
                    for (int q = 0; q < 4; ++q) {
                        double x = x0 + gx[q] * g.h[0];
                        Vec p(3);
                        auto ev = [&](double y, double z) {
                            p << x, y, z;
                            return sdf(p);
                        };
                        acc += gw[q] * square_fraction(ev(y0, z0), ev(y0 + g.h[1], z0),
                                                       ev(y0 + g.h[1], z0 + g.h[2]),
                                                       ev(y0, z0 + g.h[2]));
                    }
                    g.volfrac[c] = acc;
                }
            }
        }
    });

    // face apertures
    g.aperture.assign(d, std::vector<double>(total, 0.0));
    parallel_for(total, [&](std::size_t lo_i, std::size_t hi_i) {
        std::vector<int> ic(d);
        for (std::size_t c = lo_i; c < hi_i; ++c) {
            std::size_t rem = c;
            for (int a = 0; a < d; ++a) {
                ic[a] = int(rem % std::size_t(g.n[a]));
                rem /= std::size_t(g.n[a]);
            }
            for (int a = 0; a < d; ++a) {
                if (ic[a] + 1 >= g.n[a]) continue;  // interior faces only
                std::vector<int> f(ic.begin(), ic.end());
                f[a] += 1;  // corner lattice plane of the shared face
                double ap = 0.0;
                if (d == 1) {
                    ap = corner({f[0]}) >= 0 ? 1.0 : 0.0;
                } else if (d == 2) {
                    int o = 1 - a;
                    std::vector<int> c0 = f, c1 = f;
                    c1[o] += 1;
                    ap = edge_fraction(corner(c0), corner(c1));
                } else {
                    int o1 = (a + 1) % 3, o2 = (a + 2) % 3;
                    std::vector<int> c00 = f, c10 = f, c11 = f, c01 = f;
                    c10[o1] += 1;
                    c11[o1] += 1;
                    c11[o2] += 1;
                    c01[o2] += 1;
                    ap = square_fraction(corner(c00), corner(c10), corner(c11), corner(c01));
                }
                g.aperture[a][c] = ap;
            }
        }
    });

    // activate cells with meaningful volume; close faces into inactive cells
    const double vol_cut = 1e-8;
    g.index.assign(total, -1);
    g.active.clear();
    for (std::size_t c = 0; c < total; ++c) {
        if (g.volfrac[c] > vol_cut) {
            g.index[c] = std::int64_t(g.active.size());
            g.active.push_back(std::int64_t(c));
        } else {
            g.volfrac[c] = 0.0;
        }
    }
    for (int a = 0; a < d; ++a) {
        std::size_t st = g.stride(a);
        for (std::size_t c = 0; c < total; ++c) {
            if (g.aperture[a][c] == 0.0) continue;
            if (g.index[c] < 0 || (c + st < total && g.index[c + st] < 0)) g.aperture[a][c] = 0.0;
        }
    }
    return g;
}

int GridDomain::connected_components() const
{
    std::vector<char> seen(active.size(), 0);
    std::vector<std::int64_t> stack;
    int comps = 0;
    for (std::size_t s = 0; s < active.size(); ++s) {
        if (seen[s]) continue;
        ++comps;
        seen[s] = 1;
        stack.push_back(std::int64_t(s));
        while (!stack.empty()) {
            std::int64_t id = stack.back();
            stack.pop_back();
            std::int64_t cell = active[std::size_t(id)];
            std::int64_t rem = cell;
            for (int a = 0; a < dim; ++a) {
                std::int64_t st = std::int64_t(stride(a));
                int ia = int(rem % n[a]);
                rem /= n[a];
                if (ia > 0 && aperture[a][std::size_t(cell - st)] > 0.0) {
                    std::int64_t nb = index[std::size_t(cell - st)];
                    if (nb >= 0 && !seen[std::size_t(nb)]) {
                        seen[std::size_t(nb)] = 1;
                        stack.push_back(nb);
                    }
                }
                if (ia + 1 < n[a] && aperture[a][std::size_t(cell)] > 0.0) {
                    std::int64_t nb = index[std::size_t(cell + st)];
                    if (nb >= 0 && !seen[std::size_t(nb)]) {
                        seen[std::size_t(nb)] = 1;
                        stack.push_back(nb);
                    }
                }
            }
        }
    }
    return comps;
}

std::vector<std::int64_t> mask_to_rle(const GridDomain& g)
{
    std::vector<std::int64_t> rle;
    std::size_t total = g.total_cells();
    bool cur = false;  // runs start with the inactive state
    std::int64_t run = 0;
    for (std::size_t c = 0; c < total; ++c) {
        bool on = g.index[c] >= 0;
        if (on == cur) {
            ++run;
        } else {
            rle.push_back(run);
            cur = on;
            run = 1;
        }
    }
    rle.push_back(run);
    return rle;
}

std::vector<bool> rle_to_mask(const std::vector<std::int64_t>& rle, std::size_t total)
{
    std::vector<bool> mask;
    mask.reserve(total);
    bool cur = false;
    for (std::int64_t run : rle) {
        for (std::int64_t i = 0; i < run; ++i) mask.push_back(cur);
        cur = !cur;
    }
    if (mask.size() != total)
        throw std::invalid_argument("rle_to_mask: length mismatch");
    return mask;
}

}  // namespace gibbslab
