#include "gibbslab/manifold.hpp"

#include <cmath>

namespace gibbslab {

Mat ChartedManifold::tangents_fd(const Vec& u, double h) const
{
    Mat T(d_, k_);
    for (int i = 0; i < k_; ++i) {
        Vec up = u, um = u;
        up[i] += h;
        um[i] -= h;
        T.col(i) = (embed(up) - embed(um)) / (2.0 * h);
    }
    return T;
}

// ------------------------------------------------------------------- catalog

namespace {

class Circle : public ChartedManifold {
public:
    explicit Circle(double R, std::string name)
        : ChartedManifold(1, 2, std::move(name), Vec::Zero(1), Vec::Constant(1, 2.0 * M_PI),
                          {true}),
          R_(R)
    {}
    Vec embed(const Vec& u) const override
    {
        Vec y(2);
        y << R_ * std::cos(u[0]), R_ * std::sin(u[0]);
        return y;
    }
    Mat tangents(const Vec& u) const override
    {
        Mat T(2, 1);
        T << -R_ * std::sin(u[0]), R_ * std::cos(u[0]);
        return T;
    }
    Mat normals(const Vec& u) const override
    {
        Mat N(2, 1);
        N << std::cos(u[0]), std::sin(u[0]);  // outward
        return N;
    }
    Vec second_deriv(const Vec& u, int, int) const override
    {
        Vec s(2);
        s << -R_ * std::cos(u[0]), -R_ * std::sin(u[0]);
        return s;
    }
    double ambient_distance(const Vec& x) const override
    {
        return std::abs(std::hypot(x[0], x[1]) - R_);
    }

private:
    double R_;
};

/// Unit sphere in colatitude-longitude coordinates; theta in (0, pi) open.
class Sphere : public ChartedManifold {
public:
    Sphere()
        : ChartedManifold(2, 3, "sphere", Vec::Zero(2),
                          (Vec(2) << M_PI, 2.0 * M_PI).finished(), {false, true})
    {}
    Vec embed(const Vec& u) const override
    {
        double st = std::sin(u[0]), ct = std::cos(u[0]);
        Vec y(3);
        y << st * std::cos(u[1]), st * std::sin(u[1]), ct;
        return y;
    }
    Mat tangents(const Vec& u) const override
    {
        double st = std::sin(u[0]), ct = std::cos(u[0]);
        double cp = std::cos(u[1]), sp = std::sin(u[1]);
        Mat T(3, 2);
        T.col(0) << ct * cp, ct * sp, -st;
        T.col(1) << -st * sp, st * cp, 0.0;
        return T;
    }
    Mat normals(const Vec& u) const override
    {
        Mat N(3, 1);
        N.col(0) = embed(u);  // outward radial
        return N;
    }
    Vec second_deriv(const Vec& u, int i, int j) const override
    {
        double st = std::sin(u[0]), ct = std::cos(u[0]);
        double cp = std::cos(u[1]), sp = std::sin(u[1]);
        Vec s(3);
        if (i == 0 && j == 0) {
            s << -st * cp, -st * sp, -ct;
        } else if (i == 1 && j == 1) {
            s << -st * cp, -st * sp, 0.0;
        } else {
            s << -ct * sp, ct * cp, 0.0;
        }
        return s;
    }
    double ambient_distance(const Vec& x) const override { return std::abs(x.norm() - 1.0); }
};

/// Torus of revolution: (R + r cos v) about the z axis.
class Torus : public ChartedManifold {
public:
    Torus(double R, double r)
        : ChartedManifold(2, 3, "torus", Vec::Zero(2),
                          (Vec(2) << 2.0 * M_PI, 2.0 * M_PI).finished(), {true, true}),
          R_(R), r_(r)
    {}
    Vec embed(const Vec& u) const override
    {
        double w = R_ + r_ * std::cos(u[1]);
        Vec y(3);
        y << w * std::cos(u[0]), w * std::sin(u[0]), r_ * std::sin(u[1]);
        return y;
    }
    Mat tangents(const Vec& u) const override
    {
        double w = R_ + r_ * std::cos(u[1]);
        double cu = std::cos(u[0]), su = std::sin(u[0]);
        double cv = std::cos(u[1]), sv = std::sin(u[1]);
        Mat T(3, 2);
        T.col(0) << -w * su, w * cu, 0.0;
        T.col(1) << -r_ * sv * cu, -r_ * sv * su, r_ * cv;
        return T;
    }
    Mat normals(const Vec& u) const override
    {
        double cu = std::cos(u[0]), su = std::sin(u[0]);
        double cv = std::cos(u[1]), sv = std::sin(u[1]);
        Mat N(3, 1);
        N.col(0) << cv * cu, cv * su, sv;  // outward from the tube core
        return N;
    }
    Vec second_deriv(const Vec& u, int i, int j) const override
    {
        double w = R_ + r_ * std::cos(u[1]);
        double cu = std::cos(u[0]), su = std::sin(u[0]);
        double cv = std::cos(u[1]), sv = std::sin(u[1]);
        Vec s(3);
        if (i == 0 && j == 0) {
            s << -w * cu, -w * su, 0.0;
        } else if (i == 1 && j == 1) {
            s << -r_ * cv * cu, -r_ * cv * su, -r_ * sv;
        } else {
            s << r_ * sv * su, -r_ * sv * cu, 0.0;
        }
        return s;
    }
    double ambient_distance(const Vec& x) const override
    {
        double rho = std::hypot(x[0], x[1]);
        return std::abs(std::hypot(rho - R_, x[2]) - r_);
    }

private:
    double R_, r_;
};

}  // namespace

ManifoldPtr make_manifold(const std::string& name)
{
    if (name == "circle") return std::make_shared<Circle>(1.0, "circle");
    if (name == "circleR" || name == "circle2") return std::make_shared<Circle>(2.0, "circleR");
    if (name == "sphere") return std::make_shared<Sphere>();
    if (name == "torus") return std::make_shared<Torus>(2.0, 0.5);
    throw std::invalid_argument("unknown manifold '" + name + "'");
}

std::vector<std::string> manifold_names()
{
    return {"circle", "circleR", "sphere", "torus"};
}

// ------------------------------------------------------------------ geometry

MetricData metric_at(const ChartedManifold& m, const Vec& u, bool fd_check)
{
    Mat T = m.tangents(u);
    MetricData md;
    md.g = T.transpose() * T;
    if (fd_check) {
        Mat Tf = m.tangents_fd(u);
        Mat gf = Tf.transpose() * Tf;
        double scale = std::max(1.0, md.g.norm());
        if ((gf - md.g).norm() > 1e-6 * scale)
            throw std::runtime_error("metric_at: analytic and finite-difference metrics disagree");
    }
    Eigen::LLT<Mat> llt(md.g);
    md.det_g = md.g.determinant();
    if (llt.info() != Eigen::Success || md.det_g <= 0.0)
        throw std::runtime_error("metric_at: rank-deficient tangent map (not an embedding)");
    md.g_inv = md.g.inverse();
    return md;
}

SecondFundamental second_fundamental_at(const ChartedManifold& m, const Vec& u)
{
    const int k = m.intrinsic_dim(), nc = m.ambient_dim() - k;
    MetricData md = metric_at(m, u, false);
    Mat N = m.normals(u);
    SecondFundamental sf;
    sf.G.reserve(nc);
    sf.G_tilde.reserve(nc);
    for (int l = 0; l < nc; ++l) {
        Mat G(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                double v = -m.second_deriv(u, i, j).dot(N.col(l));
                G(i, j) = v;
                G(j, i) = v;
            }
        Mat Gt = md.g_inv * G;
        if ((Gt - Gt.transpose()).norm() > 1e-8 * std::max(1.0, Gt.norm()))
            throw std::runtime_error("second_fundamental_at: shape operator asymmetry beyond tolerance");
        Gt = 0.5 * (Gt + Gt.transpose());
        Eigen::SelfAdjointEigenSolver<Mat> es(Gt);
        sf.sup_norm = std::max(sf.sup_norm, es.eigenvalues().cwiseAbs().maxCoeff());
        sf.G.push_back(std::move(G));
        sf.G_tilde.push_back(std::move(Gt));
    }
    return sf;
}

namespace {

std::vector<Vec> chart_grid(const ChartedManifold& m, int n_per_axis)
{
    const int k = m.intrinsic_dim();
    std::vector<Vec> us;
    std::vector<int> idx(k, 0);
    while (true) {
        Vec u(k);
        for (int a = 0; a < k; ++a) {
            double lo = m.domain_lo()[a], hi = m.domain_hi()[a];
            // midpoint layout keeps chart-degenerate edges (sphere poles) out
            u[a] = lo + (hi - lo) * (idx[a] + 0.5) / n_per_axis;
        }
        us.push_back(u);
        int a = 0;
        for (; a < k; ++a) {
            if (++idx[a] < n_per_axis) break;
            idx[a] = 0;
        }
        if (a == k) break;
    }
    return us;
}

}  // namespace

double reach_estimate(const ChartedManifold& m, int probes_per_axis)
{
    auto us = chart_grid(m, probes_per_axis);
    double max_curv = 0.0;
    std::vector<Vec> ys(us.size());
    std::vector<Mat> Ns(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        ys[i] = m.embed(us[i]);
        Ns[i] = m.normals(us[i]);
        max_curv = std::max(max_curv, second_fundamental_at(m, us[i]).sup_norm);
    }
    double reach = max_curv > 0 ? 1.0 / max_curv : std::numeric_limits<double>::infinity();

    // point-pair estimator: reach <= |y'-y|^2 / (2 |P_N (y'-y)|); detects
    // bottlenecks the curvature bound misses
    for (std::size_t i = 0; i < us.size(); ++i) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
            if (i == j) continue;
            Vec d = ys[j] - ys[i];
            double dist2 = d.squaredNorm();
            if (dist2 < 1e-24) {
                // distinct chart points mapping to the same ambient point
                Vec du = us[j] - us[i];
                bool wrapped_same = true;
                for (int a = 0; a < m.intrinsic_dim(); ++a) {
                    double span = m.domain_hi()[a] - m.domain_lo()[a];
                    double delta = m.periodic(a) ? std::remainder(du[a], span) : du[a];
                    if (std::abs(delta) > 1e-9) wrapped_same = false;
                }
                if (!wrapped_same)
                    throw std::runtime_error("reach_estimate: chart self-intersection detected");
                continue;
            }
            double normal_comp = (Ns[i].transpose() * d).norm();
            if (normal_comp < 1e-12) continue;
            reach = std::min(reach, dist2 / (2.0 * normal_comp));
        }
    }
    return reach;
}

// --------------------------------------------------------------------- tubes

TubularNeighborhood make_tube(ManifoldPtr m, double radius)
{
    TubularNeighborhood t;
    t.reach_lower_bound = reach_estimate(*m, 48);
    if (!(radius > 0) || radius > t.reach_lower_bound)
        throw std::invalid_argument("make_tube: radius exceeds the reach lower bound");
    t.base = std::move(m);
    t.radius = radius;
    return t;
}

Vec tube_point(const TubularNeighborhood& tube, const Vec& u, const Vec& r)
{
    if (r.norm() > tube.radius * (1.0 + 1e-12))
        throw std::invalid_argument("tube_point: |r| exceeds the tube radius");
    return tube.base->embed(u) + tube.base->normals(u) * r;
}

double weyl_density(const ChartedManifold& m, const Vec& u, const Vec& r)
{
    SecondFundamental sf = second_fundamental_at(m, u);
    const int k = m.intrinsic_dim();
    Mat A = Mat::Identity(k, k);
    for (std::size_t l = 0; l < sf.G_tilde.size(); ++l) A += r[int(l)] * sf.G_tilde[l];
    double det = A.determinant();
    if (det <= 0.0)
        throw std::runtime_error("weyl_density: nonpositive Jacobian (radius beyond focal distance)");
    return det;
}

namespace {

struct Quad1D {
    std::vector<double> x, w;
};

Quad1D axis_rule(const ChartedManifold& m, int axis, int n)
{
    Quad1D q;
    double lo = m.domain_lo()[axis], hi = m.domain_hi()[axis];
    if (m.periodic(axis)) {
        double h = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {
            q.x.push_back(lo + (i + 0.5) * h);
            q.w.push_back(h);
        }
    } else {
        gauss_legendre(n, lo, hi, q.x, q.w);
    }
    return q;
}

double tube_quadrature(const TubularNeighborhood& tube, const std::function<double(const Vec&)>& phi,
                       int nt, int nn)
{
    const ChartedManifold& m = *tube.base;
    const int k = m.intrinsic_dim(), nc = m.ambient_dim() - k;
    if (nc > 2)
        throw std::invalid_argument("tube_integrate: normal dimension > 2 not supported");

    std::vector<Quad1D> trules;
    for (int a = 0; a < k; ++a) trules.push_back(axis_rule(m, a, nt));

    // normal rule over the (d-k)-ball
    std::vector<Vec> rn;
    std::vector<double> rw;
    if (nc == 1) {
        std::vector<double> x, w;
        gauss_legendre(nn, -tube.radius, tube.radius, x, w);
        for (int i = 0; i < nn; ++i) {
            rn.push_back(Vec::Constant(1, x[i]));
            rw.push_back(w[i]);
        }
    } else {
        std::vector<double> x, w;
        gauss_legendre(nn, 0.0, tube.radius, x, w);
        int na = 4 * nn;
        for (int i = 0; i < nn; ++i)
            for (int j = 0; j < na; ++j) {
                double th = 2.0 * M_PI * (j + 0.5) / na;
                Vec r(2);
                r << x[i] * std::cos(th), x[i] * std::sin(th);
                rn.push_back(r);
                rw.push_back(w[i] * x[i] * 2.0 * M_PI / na);
            }
    }

    // tensor loop over tangential nodes
    std::vector<int> idx(k, 0);
    std::vector<Vec> us;
    std::vector<double> uw;
    while (true) {
        Vec u(k);
        double w = 1.0;
        for (int a = 0; a < k; ++a) {
            u[a] = trules[a].x[idx[a]];
            w *= trules[a].w[idx[a]];
        }
        us.push_back(u);
        uw.push_back(w);
        int a = 0;
        for (; a < k; ++a) {
            if (++idx[a] < int(trules[a].x.size())) break;
            idx[a] = 0;
        }
        if (a == k) break;
    }

    std::vector<double> partial(us.size(), 0.0);
    parallel_for(us.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Vec& u = us[i];
            MetricData md = metric_at(m, u, false);
            SecondFundamental sf = second_fundamental_at(m, u);
            Vec base = m.embed(u);
            Mat N = m.normals(u);
            double sg = std::sqrt(md.det_g);
            double acc = 0.0;
            for (std::size_t q = 0; q < rn.size(); ++q) {
                Mat A = Mat::Identity(k, k);
                for (int l = 0; l < nc; ++l) A += rn[q][l] * sf.G_tilde[l];
                double det = A.determinant();
                if (det <= 0.0)
                    throw std::runtime_error("tube_integrate: radius beyond focal distance");
                acc += rw[q] * phi(base + N * rn[q]) * det;
            }
            partial[i] = acc * uw[i] * sg;
        }
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace

TubeIntegral tube_integrate(const TubularNeighborhood& tube,
                            const std::function<double(const Vec&)>& phi,
                            const QuadratureSpec& spec)
{
    TubeIntegral out;
    out.value = tube_quadrature(tube, phi, spec.tangential, spec.normal);
    out.refined_value = tube_quadrature(tube, phi, 2 * spec.tangential, 2 * spec.normal);
    out.refinement_delta = std::abs(out.refined_value - out.value);
    return out;
}

Vec pushforward_gradient(const TubularNeighborhood& tube,
                         const std::function<Vec(const Vec&)>& grad_phi, const Vec& u,
                         const Vec& r)
{
    const ChartedManifold& m = *tube.base;
    const int k = m.intrinsic_dim(), nc = m.ambient_dim() - k;
    Mat T = m.tangents(u);
    Mat N = m.normals(u);
    SecondFundamental sf = second_fundamental_at(m, u);
    Mat A = Mat::Identity(k, k);
    for (int l = 0; l < nc; ++l) A += r[l] * sf.G_tilde[l];

    Vec gy = grad_phi(tube_point(tube, u, r));
    Vec out(k + nc);
    out.head(k) = A.transpose() * (T.transpose() * gy);
    out.tail(nc) = N.transpose() * gy;
    return out;
}

}  // namespace gibbslab
