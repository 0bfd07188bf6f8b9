#include "gibbslab/spectral.hpp"

#include <cmath>
#include <sstream>

namespace gibbslab {

DiscreteOperator assemble_laplace_beltrami(const ChartedManifold& m, int cells_per_axis)
{
    const int k = m.intrinsic_dim();
    std::vector<int> n(k, cells_per_axis);
    std::vector<double> h(k);
    std::size_t total = 1;
    for (int a = 0; a < k; ++a) {
        h[a] = (m.domain_hi()[a] - m.domain_lo()[a]) / n[a];
        total *= std::size_t(n[a]);
    }
    auto center = [&](std::size_t c) {
        Vec u(k);
        std::size_t rem = c;
        for (int a = 0; a < k; ++a) {
            int ia = int(rem % std::size_t(n[a]));
            rem /= std::size_t(n[a]);
            u[a] = m.domain_lo()[a] + (ia + 0.5) * h[a];
        }
        return u;
    };

    double cellvol = 1.0;
    for (int a = 0; a < k; ++a) cellvol *= h[a];

    // cell metric data
    std::vector<double> sqrtg(total);
    parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c) {
            MetricData md = metric_at(m, center(c), false);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    if (i != j && std::abs(md.g(i, j)) > 1e-10 * md.g.norm())
                        throw std::runtime_error(
                            "assemble_laplace_beltrami: non-diagonal chart metric unsupported");
            sqrtg[c] = std::sqrt(md.det_g);
        }
    });

    Vec w = Vec::Zero(Eigen::Index(total));
    for (std::size_t c = 0; c < total; ++c) w[Eigen::Index(c)] = sqrtg[c] * cellvol;

    std::vector<Eigen::Triplet<double>> trip;
    Vec diag = Vec::Zero(Eigen::Index(total));
    std::vector<std::size_t> stride(k);
    stride[0] = 1;
    for (int a = 1; a < k; ++a) stride[a] = stride[a - 1] * std::size_t(n[a - 1]);

    for (int a = 0; a < k; ++a) {
        for (std::size_t c = 0; c < total; ++c) {
            std::size_t rem = c;
            for (int b = 0; b < a; ++b) rem /= std::size_t(n[b]);
            int ia = int(rem % std::size_t(n[a]));
            bool wraps = (ia + 1 == n[a]);
            if (wraps && !m.periodic(a)) continue;  // closed end (degenerate or Neumann)
            std::size_t cn = wraps ? c - std::size_t(n[a] - 1) * stride[a] : c + stride[a];

            // face-centered sqrt(g) g^{aa}
            Vec uf = center(c);
            uf[a] += 0.5 * h[a];
            if (wraps && uf[a] > m.domain_hi()[a]) uf[a] = m.domain_hi()[a];
            MetricData mf = metric_at(m, uf, false);
            double coef = std::sqrt(mf.det_g) * mf.g_inv(a, a) * cellvol / (h[a] * h[a]);
            if (coef <= 0.0) continue;

            double off = -coef / std::sqrt(w[Eigen::Index(c)] * w[Eigen::Index(cn)]);
            trip.emplace_back(int(c), int(cn), off);
            trip.emplace_back(int(cn), int(c), off);
            diag[Eigen::Index(c)] += coef / w[Eigen::Index(c)];
            diag[Eigen::Index(cn)] += coef / w[Eigen::Index(cn)];
        }
    }
    for (std::size_t c = 0; c < total; ++c) trip.emplace_back(int(c), int(c), diag[Eigen::Index(c)]);

    DiscreteOperator op;
    op.B.resize(Eigen::Index(total), Eigen::Index(total));
    op.B.setFromTriplets(trip.begin(), trip.end());
    op.B.makeCompressed();
    op.w = std::move(w);
    op.sqrt_w = op.w.cwiseSqrt();
    std::ostringstream tag;
    tag << "laplace_beltrami " << m.name() << " n=" << cells_per_axis;
    op.tag = tag.str();
    op.h = *std::max_element(h.begin(), h.end());
    op.dim = k;
    return op;
}

SpectrumResult laplace_beltrami_gap(const ChartedManifold& m, int cells_per_axis)
{
    DiscreteOperator op = assemble_laplace_beltrami(m, cells_per_axis);
    EigenOptions opt;
    opt.m = 5;
    // grid symmetry splits exact multiplicities by O(h^2); cluster at that scale
    opt.cluster_rel_tol = std::max(1e-6, op.h * op.h);
    SpectrumResult res = smallest_eigenvalues(op, opt);
    // second-order Richardson value from a half-resolution companion solve
    DiscreteOperator coarse = assemble_laplace_beltrami(m, cells_per_axis / 2);
    double lam_c = smallest_eigenvalues(coarse, opt).lambda1();
    res.extrapolated = (4.0 * res.lambda1() - lam_c) / 3.0;
    return res;
}

TubeStabilityReport tube_stability_report(const ChartedManifold& m,
                                          const std::vector<double>& radii,
                                          const TubeStabilityOptions& opt)
{
    if (radii.size() < 2)
        throw std::invalid_argument("tube_stability_report: need at least two radii");
    double reach = reach_estimate(m, 48);
    for (double r : radii)
        if (r > reach)
            throw std::invalid_argument("tube_stability_report: radius beyond the reach bound");

    TubeStabilityReport rep;
    rep.lambda_S = laplace_beltrami_gap(m, opt.lb_resolution).lambda1();

    const int d = m.ambient_dim();
    for (double rad : radii) {
        // ambient bounding box of the tube
        Vec lo = Vec::Constant(d, std::numeric_limits<double>::infinity());
        Vec hi = -lo;
        auto us = std::vector<Vec>();
        {
            int np = 64;
            std::vector<int> idx(m.intrinsic_dim(), 0);
            while (true) {
                Vec u(m.intrinsic_dim());
                for (int a = 0; a < m.intrinsic_dim(); ++a)
                    u[a] = m.domain_lo()[a] +
                           (m.domain_hi()[a] - m.domain_lo()[a]) * (idx[a] + 0.5) / np;
                Vec y = m.embed(u);
                for (int a = 0; a < d; ++a) {
                    lo[a] = std::min(lo[a], y[a]);
                    hi[a] = std::max(hi[a], y[a]);
                }
                int a = 0;
                for (; a < m.intrinsic_dim(); ++a) {
                    if (++idx[a] < np) break;
                    idx[a] = 0;
                }
                if (a == m.intrinsic_dim()) break;
            }
        }
        double h = std::min(opt.max_h, 2.0 * rad / opt.cells_across);
        lo.array() -= rad + 3 * h;
        hi.array() += rad + 3 * h;

        auto sdf = [&](const Vec& x) { return rad - m.ambient_distance(x); };
        GridDomain g = GridDomain::masked(lo, hi, h, sdf);
        DiscreteOperator op = assemble_neumann_laplacian(g);
        EigenOptions eo;
        eo.m = opt.eigen_m;
        eo.shift_hint = rep.lambda_S;
        SpectrumResult sp = smallest_eigenvalues(op, eo);

        TubeStabilityRow row;
        row.radius = rad;
        row.lambda1 = sp.lambda1();
        row.deviation = std::abs(row.lambda1 - rep.lambda_S);
        row.h = h;
        row.cells = g.n_active();
        rep.rows.push_back(row);
    }

    std::sort(rep.rows.begin(), rep.rows.end(),
              [](const auto& a, const auto& b) { return a.radius > b.radius; });
    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
        xs.push_back(r.radius);
        ys.push_back(r.deviation);
        rep.B_admissible = std::max(rep.B_admissible, r.deviation / (r.radius * rep.lambda_S));
    }
    rep.fit_r_squared = linear_fit(xs, ys).r_squared;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i)
        if (rep.rows[i].deviation < rep.rows[i + 1].deviation - 1e-12) rep.monotone = false;

    // least squares on (1, radius^2); the leading deviation is quadratic
    {
        Mat A(Eigen::Index(xs.size()), 2);
        Vec b(Eigen::Index(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            A(Eigen::Index(i), 0) = 1.0;
            A(Eigen::Index(i), 1) = xs[i] * xs[i];
            b[Eigen::Index(i)] = rep.rows[i].lambda1;
        }
        Vec coef = A.colPivHouseholderQr().solve(b);
        rep.extrapolated_limit = coef[0];
    }
    return rep;
}

double tensor_gap(double gap_tangential, double gap_normal)
{
    if (gap_tangential < 0 || gap_normal < 0)
        throw std::invalid_argument("tensor_gap: gaps must be nonnegative");
    return std::min(gap_tangential, gap_normal);
}

double interval_neumann_gap(double a)
{
    double L = 2.0 * a;
    return M_PI * M_PI / (L * L);
}

}  // namespace gibbslab
