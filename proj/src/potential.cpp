#include "gibbslab/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gibbslab {

Mat ScalarField::hessian(const Vec& x) const
{
    Mat H(dim_, dim_);
    Vec e = Vec::Zero(dim_);
    for (int j = 0; j < dim_; ++j) {
        e[j] = 1.0;
        H.col(j) = hessian_apply(x, e);
        e[j] = 0.0;
    }
    return 0.5 * (H + H.transpose());
}

EvalBundle eval_bundle(const ScalarField& field, const Vec& x)
{
    if (x.size() != field.dim() || !x.allFinite())
        throw std::invalid_argument("eval_bundle: non-finite or wrong-dimension input for " +
                                    field.name());
    return EvalBundle{field.value(x), field.gradient(x), field.laplacian(x)};
}

// ----------------------------------------------------------------- RegionSpec

RegionSpec::RegionSpec(const RegionSpec& o)
    : kind(o.kind), center(o.center), r_inner(o.r_inner), r_outer(o.r_outer), lo(o.lo), hi(o.hi),
      exclusions(o.exclusions)
{
    if (o.base) base = std::make_unique<RegionSpec>(*o.base);
}

RegionSpec& RegionSpec::operator=(const RegionSpec& o)
{
    if (this == &o) return *this;
    kind = o.kind; center = o.center; r_inner = o.r_inner; r_outer = o.r_outer;
    lo = o.lo; hi = o.hi; exclusions = o.exclusions;
    base = o.base ? std::make_unique<RegionSpec>(*o.base) : nullptr;
    return *this;
}

RegionSpec RegionSpec::ball(const Vec& c, double r)
{
    RegionSpec s;
    s.kind = Kind::Ball;
    s.center = c;
    s.r_outer = r;
    return s;
}

RegionSpec RegionSpec::annulus(const Vec& c, double r_in, double r_out)
{
    RegionSpec s;
    s.kind = Kind::Annulus;
    s.center = c;
    s.r_inner = r_in;
    s.r_outer = r_out;
    if (!(r_out > r_in && r_in >= 0.0))
        throw std::invalid_argument("RegionSpec::annulus: need 0 <= r_in < r_out");
    return s;
}

RegionSpec RegionSpec::box(const Vec& lo, const Vec& hi)
{
    RegionSpec s;
    s.kind = Kind::Box;
    s.lo = lo;
    s.hi = hi;
    for (int i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) throw std::invalid_argument("RegionSpec::box: empty box");
    return s;
}

RegionSpec RegionSpec::minus(RegionSpec base, std::vector<RegionSpec> exclusions)
{
    RegionSpec s;
    s.kind = Kind::ComplementIntersection;
    s.base = std::make_unique<RegionSpec>(std::move(base));
    s.exclusions = std::move(exclusions);
    return s;
}

bool RegionSpec::contains(const Vec& x) const
{
    switch (kind) {
        case Kind::Ball:
            return (x - center).norm() <= r_outer;
        case Kind::Annulus: {
            double r = (x - center).norm();
            return r >= r_inner && r <= r_outer;
        }
        case Kind::Box:
            for (int i = 0; i < x.size(); ++i)
                if (x[i] < lo[i] || x[i] > hi[i]) return false;
            return true;
        case Kind::ComplementIntersection:
            if (!base->contains(x)) return false;
            for (const auto& e : exclusions)
                if (e.interior_contains(x)) return false;
            return true;
    }
    return false;
}

bool RegionSpec::interior_contains(const Vec& x) const
{
    switch (kind) {
        case Kind::Ball:
            return (x - center).norm() < r_outer;
        case Kind::Annulus: {
            double r = (x - center).norm();
            return r > r_inner && r < r_outer;
        }
        case Kind::Box:
            for (int i = 0; i < x.size(); ++i)
                if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
            return true;
        case Kind::ComplementIntersection:
            if (!base->interior_contains(x)) return false;
            for (const auto& e : exclusions)
                if (e.contains(x)) return false;
            return true;
    }
    return false;
}

void RegionSpec::bounding_box(Vec& lo_out, Vec& hi_out) const
{
    switch (kind) {
        case Kind::Ball:
        case Kind::Annulus:
            lo_out = center.array() - r_outer;
            hi_out = center.array() + r_outer;
            return;
        case Kind::Box:
            lo_out = lo;
            hi_out = hi;
            return;
        case Kind::ComplementIntersection:
            base->bounding_box(lo_out, hi_out);
            return;
    }
}

std::string RegionSpec::describe() const
{
    std::ostringstream os;
    switch (kind) {
        case Kind::Ball: os << "ball(r=" << r_outer << ")"; break;
        case Kind::Annulus: os << "annulus(" << r_inner << "," << r_outer << ")"; break;
        case Kind::Box: {
            os << "box[";
            for (int i = 0; i < lo.size(); ++i) os << (i ? "x" : "") << "(" << lo[i] << "," << hi[i] << ")";
            os << "]";
            break;
        }
        case Kind::ComplementIntersection:
            os << base->describe() << " minus " << exclusions.size() << " region(s)";
            break;
    }
    return os.str();
}

// ----------------------------------------------------------------- probes

namespace {

// Unit directions: equi-angular in 2D, Fibonacci sphere in 3D.
std::vector<Vec> unit_directions(int dim, int n)
{
    std::vector<Vec> dirs;
    dirs.reserve(n);
    if (dim == 1) {
        dirs.push_back(Vec::Constant(1, 1.0));
        dirs.push_back(Vec::Constant(1, -1.0));
        return dirs;
    }
    if (dim == 2) {
        for (int i = 0; i < n; ++i) {
            double th = 2.0 * M_PI * i / n;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            dirs.push_back(v);
        }
        return dirs;
    }
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = ga * i;
        Vec v(3);
        v << rho * std::cos(th), rho * std::sin(th), z;
        dirs.push_back(v);
    }
    return dirs;
}

void radial_probes(int dim, const Vec& c, double r_in, double r_out, const ProbePlan& plan,
                   std::vector<Vec>& out)
{
    auto dirs = unit_directions(dim, plan.directions);
    int ns = std::max(2, plan.shells);
    for (int s = 0; s <= ns; ++s) {
        double r = r_in + (r_out - r_in) * double(s) / ns;
        if (r == 0.0) {
            out.push_back(c);
            continue;
        }
        for (const auto& d : dirs) out.push_back(c + r * d);
    }
}

}  // namespace

std::vector<Vec> probe_points(int dim, const RegionSpec& region, const ProbePlan& plan)
{
    std::vector<Vec> pts;
    switch (region.kind) {
        case RegionSpec::Kind::Ball:
            radial_probes(dim, region.center, 0.0, region.r_outer, plan, pts);
            break;
        case RegionSpec::Kind::Annulus:
            radial_probes(dim, region.center, region.r_inner, region.r_outer, plan, pts);
            break;
        case RegionSpec::Kind::Box: {
            int n = std::max(2, plan.grid_per_axis);
            std::vector<int> idx(dim, 0);
            while (true) {
                Vec x(dim);
                for (int a = 0; a < dim; ++a)
                    x[a] = region.lo[a] + (region.hi[a] - region.lo[a]) * double(idx[a]) / (n - 1);
                pts.push_back(x);
                int a = 0;
                for (; a < dim; ++a) {
                    if (++idx[a] < n) break;
                    idx[a] = 0;
                }
                if (a == dim) break;
            }
            break;
        }
        case RegionSpec::Kind::ComplementIntersection: {
            auto raw = probe_points(dim, *region.base, plan);
            for (auto& x : raw)
                if (region.contains(x)) pts.push_back(std::move(x));
            // boundary shells of ball/annulus exclusions carry the infima
            for (const auto& e : region.exclusions) {
                std::vector<Vec> shell;
                if (e.kind == RegionSpec::Kind::Ball) {
                    radial_probes(dim, e.center, e.r_outer, e.r_outer, plan, shell);
                } else if (e.kind == RegionSpec::Kind::Annulus) {
                    radial_probes(dim, e.center, e.r_inner, e.r_inner, plan, shell);
                    radial_probes(dim, e.center, e.r_outer, e.r_outer, plan, shell);
                }
                for (auto& x : shell)
                    if (region.contains(x)) pts.push_back(std::move(x));
            }
            break;
        }
    }
    if (plan.random_probes > 0) {
        Vec lo, hi;
        region.bounding_box(lo, hi);
        std::uint64_t k = 0;
        int added = 0;
        while (added < plan.random_probes && k < std::uint64_t(plan.random_probes) * 64) {
            Vec x(dim);
            for (int a = 0; a < dim; ++a)
                x[a] = lo[a] + (hi[a] - lo[a]) * Philox::uniform(plan.seed, 7u, k, a);
            ++k;
            if (region.contains(x)) {
                pts.push_back(x);
                ++added;
            }
        }
    }
    if (pts.empty()) throw std::runtime_error("probe_points: region produced no probes");
    return pts;
}

// ------------------------------------------------------------- certification

namespace {

PLCertificate pl_once(const ScalarField& field, const RegionSpec& region, const ProbePlan& plan)
{
    auto pts = probe_points(field.dim(), region, plan);
    PLCertificate cert;
    cert.potential = field.name();
    cert.region = region;
    cert.sample_count = pts.size();
    double vmin = std::numeric_limits<double>::infinity();
    for (const auto& x : pts) vmin = std::min(vmin, field.value(x));
    cert.region_min = vmin;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : pts) {
        double excess = field.value(x) - vmin;
        if (excess <= 1e-12) continue;  // vacuous at minima
        double ratio = field.gradient(x).squaredNorm() / excess;
        if (ratio < best) {
            best = ratio;
            cert.worst_point = x;
        }
    }
    if (!std::isfinite(best)) {
        cert.nu_hat = 0.0;
        cert.low_confidence = true;
        return cert;
    }
    cert.nu_hat = best < 1e-10 ? 0.0 : best;
    return cert;
}

}  // namespace

PLCertificate certify_pl(const ScalarField& field, const RegionSpec& region, const ProbePlan& plan)
{
    PLCertificate cert = pl_once(field, region, plan);
    // refinement probe: if the region minimum moves under doubling, the
    // excess denominators were unreliable
    ProbePlan fine = plan;
    fine.shells *= 2;
    fine.grid_per_axis = 2 * plan.grid_per_axis - 1;
    PLCertificate c2 = pl_once(field, region, fine);
    if (std::abs(c2.region_min - cert.region_min) > 1e-9 * (1.0 + std::abs(cert.region_min)))
        cert.low_confidence = true;
    return cert;
}

ErrorBoundCertificate certify_error_bound(const ScalarField& field, const RegionSpec& region,
                                          const ProbePlan& plan)
{
    auto pts = probe_points(field.dim(), region, plan);
    ErrorBoundCertificate cert;
    cert.potential = field.name();
    cert.region = region;
    cert.sample_count = pts.size();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : pts) {
        double dist = field.dist_to_optimal(x);
        if (dist <= 1e-12) continue;  // on S
        double ratio = field.gradient(x).norm() / dist;
        if (ratio < best) {
            best = ratio;
            cert.worst_point = x;
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("certify_error_bound: all probes lie on the optimal set");
    cert.nu_eb_hat = best;
    return cert;
}

GrowthCertificate certify_growth(const ScalarField& field, double R0, const ProbePlan& plan,
                                 double r_max)
{
    if (!(R0 > 0)) throw std::invalid_argument("certify_growth: R0 must be positive");
    if (r_max <= R0) r_max = 4.0 * R0;
    GrowthCertificate cert;
    cert.potential = field.name();
    cert.R0 = R0;
    auto dirs = unit_directions(field.dim(), plan.directions);
    int ns = std::max(4, plan.shells);
    std::vector<double> shell_max(ns + 1, 0.0);
    double best = 0.0;
    for (int s = 0; s <= ns; ++s) {
        double r = R0 + (r_max - R0) * double(s) / ns;
        for (const auto& d : dirs) {
            Vec x = r * d;
            double ratio = std::abs(field.laplacian(x)) / (r * r);
            shell_max[s] = std::max(shell_max[s], ratio);
            if (ratio > best) {
                best = ratio;
                cert.worst_point = x;
            }
        }
    }
    cert.C_g = best;
    // diverging if the per-shell max keeps climbing through the outer shells
    cert.diverging = ns >= 3 && shell_max[ns] > shell_max[ns - 1] &&
                     shell_max[ns - 1] > shell_max[ns - 2] &&
                     shell_max[ns] > 1.02 * shell_max[ns / 2];
    return cert;
}

// ------------------------------------------------- critical point location

namespace {

/// Newton iteration on grad V = 0 with |grad|^2 backtracking.
bool refine_critical(const ScalarField& field, Vec& x, double tol, int max_iters)
{
    for (int it = 0; it < max_iters; ++it) {
        Vec g = field.gradient(x);
        if (g.norm() <= tol) return true;
        Mat H = field.hessian(x);
        Vec step;
        Eigen::FullPivLU<Mat> lu(H);
        if (lu.isInvertible()) {
            step = -lu.solve(g);
        } else {
            step = -g;
        }
        double f0 = g.squaredNorm();
        double t = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vec xn = x + t * step;
            if (field.gradient(xn).squaredNorm() < f0) {
                x = xn;
                ok = true;
                break;
            }
            t *= 0.5;
        }
        if (!ok) return field.gradient(x).norm() <= tol;
    }
    return field.gradient(x).norm() <= tol;
}

}  // namespace

CriticalPointReport locate_critical_points(const ScalarField& field, const RegionSpec& region,
                                           const CriticalPointOptions& opt)
{
    const int d = field.dim();
    const RegionSpec& search =
        region.kind == RegionSpec::Kind::ComplementIntersection ? *region.base : region;
    Vec lo, hi;
    search.bounding_box(lo, hi);
    const int n = opt.grid_per_axis;

    std::vector<Vec> grid;
    std::vector<int> idx(d, 0);
    while (true) {
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * double(idx[a]) / (n - 1);
        grid.push_back(x);
        int a = 0;
        for (; a < d; ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
        if (a == d) break;
    }

    CriticalPointReport report;
    double g0 = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, Vec>> seeds;
    double h_box = (hi - lo).maxCoeff() / (n - 1);

    for (const auto& x : grid) {
        if (!search.contains(x)) continue;
        if (region.contains(x)) {
            double gn = field.gradient(x).norm();
            if (gn < g0) {
                g0 = gn;
                report.g0_location = x;
            }
        }
        seeds.emplace_back(field.gradient(x).norm(), x);
    }

    // boundary shells of excluded balls/annuli often carry the g0 infimum
    if (region.kind == RegionSpec::Kind::ComplementIntersection) {
        ProbePlan shell_plan;
        shell_plan.directions = 512;
        for (const auto& e : region.exclusions) {
            std::vector<Vec> shell;
            if (e.kind == RegionSpec::Kind::Ball) {
                radial_probes(d, e.center, e.r_outer, e.r_outer, shell_plan, shell);
            } else if (e.kind == RegionSpec::Kind::Annulus) {
                radial_probes(d, e.center, e.r_inner, e.r_inner, shell_plan, shell);
                radial_probes(d, e.center, e.r_outer, e.r_outer, shell_plan, shell);
            }
            for (const auto& x : shell) {
                if (!region.contains(x)) continue;
                double gn = field.gradient(x).norm();
                if (gn < g0) {
                    g0 = gn;
                    report.g0_location = x;
                }
            }
        }
    }
    report.g0 = g0;

    // refine the most stationary seeds
    std::sort(seeds.begin(), seeds.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t tried = 0;
    for (const auto& [gn, x0] : seeds) {
        if (gn > 0.5 * h_box * std::max(1.0, field.hessian(x0).norm()) && tried > 0) break;
        if (tried++ > 64) break;
        Vec x = x0;
        if (!refine_critical(field, x, opt.stationarity_tol, opt.max_refine_iters)) continue;
        if (!search.contains(x)) continue;
        // a continuum optimal set is not a list of isolated critical points
        if (field.optimal_dim() >= 1 && field.dist_to_optimal(x) <= 1e-6) continue;
        bool dup = false;
        for (const auto& p : report.points)
            if ((p.location - x).norm() < 2.0 * h_box) dup = true;
        if (dup) continue;

        CriticalPoint cp;
        cp.location = x;
        cp.gradient_norm = field.gradient(x).norm();
        Eigen::SelfAdjointEigenSolver<Mat> es(field.hessian(x));
        cp.smallest_eigenvalue = es.eigenvalues().minCoeff();
        cp.largest_eigenvalue = es.eigenvalues().maxCoeff();
        double scale = std::max(1.0, std::abs(cp.largest_eigenvalue));
        double small_mag = es.eigenvalues().cwiseAbs().minCoeff();
        bool on_S = field.dist_to_optimal(x) <= 1e-6;
        if (small_mag < opt.degenerate_tol * scale && !on_S)
            cp.type = CriticalPoint::Type::Degenerate;
        else if (cp.smallest_eigenvalue > -opt.degenerate_tol * scale)
            cp.type = CriticalPoint::Type::Minimum;
        else if (cp.largest_eigenvalue < opt.degenerate_tol * scale)
            cp.type = CriticalPoint::Type::Maximum;
        else
            cp.type = CriticalPoint::Type::Saddle;
        report.points.push_back(std::move(cp));
    }
    return report;
}

int connectivity_probe(const ScalarField& field, double c, const RegionSpec& region,
                       int grid_per_axis)
{
    if (!(c > field.global_min()))
        throw std::invalid_argument("connectivity_probe: level must exceed the global minimum");
    const int d = field.dim();
    Vec lo, hi;
    region.bounding_box(lo, hi);
    const int n = grid_per_axis;
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= std::size_t(n);

    std::vector<char> in(total, 0);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        Vec p(d);
        for (int a = 0; a < d; ++a) {
            int ia = int(rem % n);
            rem /= n;
            p[a] = lo[a] + (hi[a] - lo[a]) * double(ia) / (n - 1);
        }
        in[i] = field.value(p) <= c ? 1 : 0;
    }

    std::vector<std::size_t> strides(d);
    strides[0] = 1;
    for (int a = 1; a < d; ++a) strides[a] = strides[a - 1] * n;

    std::vector<char> seen(total, 0);
    std::vector<std::size_t> stack;
    int comps = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (!in[i] || seen[i]) continue;
        ++comps;
        stack.push_back(i);
        seen[i] = 1;
        while (!stack.empty()) {
            std::size_t j = stack.back();
            stack.pop_back();
            std::size_t rem = j;
            for (int a = 0; a < d; ++a) {
                int ia = int((rem / strides[a]) % n);
                if (ia > 0 && in[j - strides[a]] && !seen[j - strides[a]]) {
                    seen[j - strides[a]] = 1;
                    stack.push_back(j - strides[a]);
                }
                if (ia + 1 < n && in[j + strides[a]] && !seen[j + strides[a]]) {
                    seen[j + strides[a]] = 1;
                    stack.push_back(j + strides[a]);
                }
            }
        }
    }
    return comps;
}

// -------------------------------------------------------------------- catalog

namespace {

/// Radial potential V(|x|) with analytic slope/r and curvature profiles.
class RadialField : public ScalarField {
public:
    RadialField(int dim, std::string name) : ScalarField(dim, std::move(name)) {}

    virtual double profile(double r) const = 0;
    virtual double slope(double r) const = 0;          // V'(r)
    virtual double slope_over_r(double r) const = 0;   // V'(r)/r, finite at r=0
    virtual double curvature(double r) const = 0;      // V''(r)

    double value(const Vec& x) const override { return profile(x.norm()); }

    Vec gradient(const Vec& x) const override { return slope_over_r(x.norm()) * x; }

    void gradient_into(const Vec& x, Vec& out) const override
    {
        out = x;
        out *= slope_over_r(x.norm());
    }

    Vec hessian_apply(const Vec& x, const Vec& v) const override
    {
        double r = x.norm();
        if (r < 1e-14) return curvature(0.0) * v;
        Vec u = x / r;
        double ud = u.dot(v);
        return slope_over_r(r) * (v - ud * u) + curvature(r) * ud * u;
    }

    double laplacian(const Vec& x) const override
    {
        double r = x.norm();
        return curvature(r) + (dim_ - 1) * slope_over_r(r);
    }
};

/// V = r^3/3 - r^2/2 + 1/6; optimal set is the unit sphere |x| = 1.
class CircleWell : public RadialField {
public:
    explicit CircleWell(int dim, std::string name) : RadialField(dim, std::move(name)) {}
    double profile(double r) const override { return r * r * r / 3.0 - r * r / 2.0 + 1.0 / 6.0; }
    double slope(double r) const override { return r * (r - 1.0); }
    double slope_over_r(double r) const override { return r - 1.0; }
    double curvature(double r) const override { return 2.0 * r - 1.0; }
    double dist_to_optimal(const Vec& x) const override { return std::abs(x.norm() - 1.0); }
    int optimal_dim() const override { return dim_ - 1; }
};

class Quadratic : public RadialField {
public:
    explicit Quadratic(int dim) : RadialField(dim, dim == 1 ? "quadratic1d" : "quadratic") {}
    double profile(double r) const override { return 0.5 * r * r; }
    double slope(double r) const override { return r; }
    double slope_over_r(double) const override { return 1.0; }
    double curvature(double) const override { return 1.0; }
    double dist_to_optimal(const Vec& x) const override { return x.norm(); }
    int optimal_dim() const override { return 0; }
};

class Quartic : public RadialField {
public:
    explicit Quartic(int dim) : RadialField(dim, "quartic") {}
    double profile(double r) const override { return 0.25 * r * r * r * r; }
    double slope(double r) const override { return r * r * r; }
    double slope_over_r(double r) const override { return r * r; }
    double curvature(double r) const override { return 3.0 * r * r; }
    double dist_to_optimal(const Vec& x) const override { return x.norm(); }
    int optimal_dim() const override { return 0; }
};

/// V = (x^2-1)^2/4 in 1D; two separated wells, the PL check fails by design.
class DoubleWell : public ScalarField {
public:
    DoubleWell() : ScalarField(1, "doublewell1d") {}
    double value(const Vec& x) const override
    {
        double t = x[0] * x[0] - 1.0;
        return 0.25 * t * t;
    }
    Vec gradient(const Vec& x) const override
    {
        Vec g(1);
        g[0] = x[0] * (x[0] * x[0] - 1.0);
        return g;
    }
    void gradient_into(const Vec& x, Vec& out) const override
    {
        out[0] = x[0] * (x[0] * x[0] - 1.0);
    }
    Vec hessian_apply(const Vec& x, const Vec& v) const override
    {
        Vec r(1);
        r[0] = (3.0 * x[0] * x[0] - 1.0) * v[0];
        return r;
    }
    double laplacian(const Vec& x) const override { return 3.0 * x[0] * x[0] - 1.0; }
    double dist_to_optimal(const Vec& x) const override
    {
        return std::min(std::abs(x[0] - 1.0), std::abs(x[0] + 1.0));
    }
    int optimal_dim() const override { return 0; }
};

/// Radial well around the unit circle with a gentle profile: quadratic cap at
/// the origin maximum, cubic gradient glue, harmonic well of curvature 1 near
/// |x| = 1. Constants are engineered so the final-bound prefactor stays
/// within a few orders of magnitude of measured spectra.
class SoftWell : public RadialField {
public:
    static constexpr double mu = 0.5;    // cap curvature
    static constexpr double a = 0.2;     // cap radius = glue start
    static constexpr double b = 0.8;     // glue end = 1 - w
    static constexpr double V0 = 0.165;  // value at the origin

    SoftWell() : RadialField(2, "softwell2d") {}

    // glue cubic for V'(r) in s = (r-a)/(b-a): -0.1 - 0.3 s - 0.3 s^2 + 0.5 s^3
    static double phi(double s) { return -0.1 + s * (-0.3 + s * (-0.3 + 0.5 * s)); }
    static double dphi_ds(double s) { return -0.3 + s * (-0.6 + 1.5 * s); }

    double profile(double r) const override
    {
        if (r <= a) return V0 - 0.5 * mu * r * r;
        if (r >= b) return 0.5 * (r - 1.0) * (r - 1.0);
        double L = b - a, s = (r - a) / L;
        // integral of phi from 0 to s, times L, plus V(a)
        double I = s * (-0.1 + s * (-0.15 + s * (-0.1 + 0.125 * s)));
        return (V0 - 0.5 * mu * a * a) + L * I;
    }
    double slope(double r) const override
    {
        if (r <= a) return -mu * r;
        if (r >= b) return r - 1.0;
        return phi((r - a) / (b - a));
    }
    double slope_over_r(double r) const override
    {
        if (r <= a) return -mu;
        return slope(r) / r;
    }
    double curvature(double r) const override
    {
        if (r <= a) return -mu;
        if (r >= b) return 1.0;
        double L = b - a;
        return dphi_ds((r - a) / L) / L;
    }
    double dist_to_optimal(const Vec& x) const override { return std::abs(x.norm() - 1.0); }
    int optimal_dim() const override { return 1; }
};

/// Quartic torus potential in R^3: V = P^2 / c with
/// P(x) = (|x|^2 + R^2 - r^2)^2 - 4 R^2 (x^2 + y^2), zero exactly on the torus.
class TorusWell : public ScalarField {
public:
    static constexpr double R = 2.0;
    static constexpr double r = 0.5;

    TorusWell() : ScalarField(3, "torus3d"), norm_(64.0 * R * R * r * r * (R + r) * (R + r)) {}

    double P(const Vec& x) const
    {
        double q = x.squaredNorm() + R * R - r * r;
        return q * q - 4.0 * R * R * (x[0] * x[0] + x[1] * x[1]);
    }
    Vec gradP(const Vec& x) const
    {
        double q = x.squaredNorm() + R * R - r * r;
        Vec g = 4.0 * q * x;
        g[0] -= 8.0 * R * R * x[0];
        g[1] -= 8.0 * R * R * x[1];
        return g;
    }
    double value(const Vec& x) const override
    {
        double p = P(x);
        return p * p / norm_;
    }
    Vec gradient(const Vec& x) const override { return 2.0 * P(x) * gradP(x) / norm_; }
    Vec hessian_apply(const Vec& x, const Vec& v) const override
    {
        double q = x.squaredNorm() + R * R - r * r;
        Vec gp = gradP(x);
        // H_P v = 4 q v + 8 (x.v) x - 8 R^2 diag(1,1,0) v
        Vec hp = 4.0 * q * v + 8.0 * x.dot(v) * x;
        hp[0] -= 8.0 * R * R * v[0];
        hp[1] -= 8.0 * R * R * v[1];
        return (2.0 / norm_) * (gp.dot(v) * gp + P(x) * hp);
    }
    double laplacian(const Vec& x) const override
    {
        double q = x.squaredNorm() + R * R - r * r;
        double lapP = 12.0 * q + 8.0 * x.squaredNorm() - 16.0 * R * R;
        return (2.0 / norm_) * (gradP(x).squaredNorm() + P(x) * lapP);
    }
    double dist_to_optimal(const Vec& x) const override
    {
        double rho = std::hypot(x[0], x[1]);
        return std::abs(std::hypot(rho - R, x[2]) - r);
    }
    int optimal_dim() const override { return 2; }

private:
    double norm_;
};

Vec zero2()
{
    return Vec::Zero(2);
}

}  // namespace

FieldPtr make_potential(const std::string& name)
{
    if (name == "circle2d") return std::make_shared<CircleWell>(2, "circle2d");
    if (name == "quadratic") return std::make_shared<Quadratic>(2);
    if (name == "quadratic1d") return std::make_shared<Quadratic>(1);
    if (name == "doublewell1d") return std::make_shared<DoubleWell>();
    if (name == "quartic") return std::make_shared<Quartic>(2);
    if (name == "torus3d") return std::make_shared<TorusWell>();
    if (name == "softwell2d") return std::make_shared<SoftWell>();
    throw std::invalid_argument("unknown potential '" + name + "'");
}

std::vector<std::string> potential_names()
{
    return {"circle2d", "quadratic", "quadratic1d", "doublewell1d", "quartic", "torus3d",
            "softwell2d"};
}

CatalogInfo catalog_info(const std::string& name)
{
    CatalogInfo info;
    info.name = name;
    if (name == "circle2d") {
        info.dim = 2;
        info.optimal_dim = 1;
        info.manifold = "circle";
        info.N_S = RegionSpec::annulus(zero2(), 0.5, 1.5);
        info.N_X = RegionSpec::ball(zero2(), 0.25);
        info.delta0 = 0.5;
        info.R1 = 0.25;
        info.R0 = 2.0;
        info.eb_outer = 10.0;
        info.pl_circ = true;
        return info;
    }
    if (name == "softwell2d") {
        info.dim = 2;
        info.optimal_dim = 1;
        info.manifold = "circle";
        info.N_S = RegionSpec::annulus(zero2(), 0.8, 1.2);
        info.N_X = RegionSpec::ball(zero2(), 0.2);
        info.delta0 = 0.2;
        info.R1 = 0.2;
        info.R0 = 1.0;
        info.eb_outer = 10.0;
        info.pl_circ = true;
        return info;
    }
    if (name == "quadratic" || name == "quadratic1d") {
        info.dim = name == "quadratic" ? 2 : 1;
        info.optimal_dim = 0;
        info.N_S = RegionSpec::ball(Vec::Zero(info.dim), 0.2);
        info.delta0 = 0.2;
        info.R0 = 1.0;
        info.eb_outer = 10.0;
        info.pl_circ = true;  // singleton optimal set; PL and error bound hold globally
        return info;
    }
    if (name == "quartic") {
        info.dim = 2;
        info.optimal_dim = 0;
        info.N_S = RegionSpec::ball(zero2(), 0.5);
        info.delta0 = 0.5;
        info.R0 = 1.0;
        info.eb_outer = 6.0;
        info.pl_circ = false;  // PL ratio degenerates at the quartic bottom
        return info;
    }
    if (name == "doublewell1d") {
        info.dim = 1;
        info.optimal_dim = 0;
        Vec lo(1), hi(1);
        lo << -2.0;
        hi << 2.0;
        info.N_S = RegionSpec::box(lo, hi);
        info.R0 = 0.5;
        info.eb_outer = 8.0;
        info.pl_circ = false;  // separated wells: the metastable contrast case
        return info;
    }
    if (name == "torus3d") {
        info.dim = 3;
        info.optimal_dim = 2;
        info.manifold = "torus";
        Vec c = Vec::Zero(3);
        info.N_S = RegionSpec::annulus(c, 1.3, 2.7);  // bounding shell around the tube
        info.R0 = 3.0;
        info.eb_outer = 6.0;
        info.pl_circ = false;  // axisymmetric maxima rings are degenerate
        return info;
    }
    throw std::invalid_argument("unknown potential '" + name + "'");
}

}  // namespace gibbslab
