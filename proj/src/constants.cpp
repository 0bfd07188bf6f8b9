#include "gibbslab/constants.hpp"

#include <cmath>
#include <sstream>

namespace gibbslab {

void ConstantsLedger::recompute_derived()
{
    if (M_delta < d * mu_minus) mu_minus = M_delta / d;  // WLOG normalization
    C = 4.0 * M_delta / (nu * nu);
    C_bar = 4.0 * L * C;
    double pref = 0.25 * (d * mu_minus) / (d * mu_minus + M_delta);
    log_C_P = std::log(pref) - C_bar;
}

ConstantsLedger build_ledger(const ScalarField& field, const ProbePlan& plan)
{
    CatalogInfo info = catalog_info(field.name());
    if (!info.N_S)
        throw std::runtime_error("build_ledger: " + field.name() + " declares no PL region");

    ConstantsLedger led;
    led.potential = field.name();
    led.d = field.dim();
    led.k = info.optimal_dim;
    led.delta0 = info.delta0;
    led.R0 = info.R0;
    led.R1 = info.R1;

    // Assumption: local PL on N(S)
    PLCertificate pl = certify_pl(field, *info.N_S, plan);
    if (pl.nu_hat <= 0.0)
        throw std::runtime_error("build_ledger: PL certification failed on N(S) for " +
                                 field.name() + " (interior stationary point with positive excess)");
    led.nu = pl.nu_hat;

    // Assumption: error bound + Laplacian growth beyond R0
    RegionSpec eb = RegionSpec::annulus(Vec::Zero(field.dim()), info.R0, info.eb_outer);
    ErrorBoundCertificate ebc = certify_error_bound(field, eb, plan);
    if (ebc.nu_eb_hat <= 0.0)
        throw std::runtime_error("build_ledger: error-bound certification failed for " +
                                 field.name());
    led.nu_eb = ebc.nu_eb_hat;

    GrowthCertificate gc = certify_growth(field, info.R0, plan, 2.0 * info.eb_outer);
    if (gc.diverging)
        throw std::runtime_error("build_ledger: Laplacian growth beyond quadratic for " +
                                 field.name());
    led.C_g = gc.C_g;

    // Hessian bound on N(S)
    {
        auto pts = probe_points(field.dim(), *info.N_S, plan);
        double Lmax = 0.0;
        for (const auto& x : pts) {
            Eigen::SelfAdjointEigenSolver<Mat> es(field.hessian(x));
            Lmax = std::max(Lmax, es.eigenvalues().cwiseAbs().maxCoeff());
        }
        led.L = Lmax;
    }

    // Laplacian bound on the R0 ball
    {
        RegionSpec ball = RegionSpec::ball(Vec::Zero(field.dim()), info.R0);
        auto pts = probe_points(field.dim(), ball, plan);
        double Mmax = 0.0;
        for (const auto& x : pts) Mmax = std::max(Mmax, std::abs(field.laplacian(x)));
        led.M_delta = Mmax;
    }

    // g0 and the local maxima: critical point scan over the R0 ball minus
    // the declared neighborhoods
    {
        Vec lo = Vec::Constant(field.dim(), -2.0 * info.R0);
        Vec hi = Vec::Constant(field.dim(), 2.0 * info.R0);
        std::vector<RegionSpec> excl;
        excl.push_back(*info.N_S);
        if (info.N_X) excl.push_back(*info.N_X);
        RegionSpec scan = RegionSpec::minus(RegionSpec::box(lo, hi), std::move(excl));
        CriticalPointOptions cp_opt;
        cp_opt.grid_per_axis = field.dim() >= 3 ? 41 : 121;
        CriticalPointReport rep = locate_critical_points(field, scan, cp_opt);
        led.g0 = rep.g0;
        for (const auto& p : rep.points) {
            if (p.type == CriticalPoint::Type::Saddle)
                throw std::runtime_error("build_ledger: saddle point found for " + field.name());
        }
    }

    // mu^-: curvature at the located maxima; N(X) must stay strictly concave
    if (info.N_X) {
        RegionSpec inner = RegionSpec::box(Vec::Constant(field.dim(), -info.R1 * 1.5),
                                           Vec::Constant(field.dim(), info.R1 * 1.5));
        CriticalPointReport rep = locate_critical_points(field, inner);
        double mu = 0.0;
        bool found = false;
        for (const auto& p : rep.points) {
            if (p.type == CriticalPoint::Type::Maximum) {
                mu = std::max(mu, -p.largest_eigenvalue);
                found = true;
            }
        }
        if (!found)
            throw std::runtime_error("build_ledger: no local maximum found inside N(X) for " +
                                     field.name());
        auto pts = probe_points(field.dim(), *info.N_X, plan);
        for (const auto& x : pts) {
            Eigen::SelfAdjointEigenSolver<Mat> es(field.hessian(x));
            if (es.eigenvalues().maxCoeff() >= 0.0)
                throw std::runtime_error("build_ledger: N(X) not strictly concave for " +
                                         field.name());
        }
        led.mu_minus = mu;
    } else {
        led.mu_minus = led.M_delta / field.dim();  // no maxima: WLOG value
    }

    led.recompute_derived();
    return led;
}

SigmaB sigma_b(const ConstantsLedger& led, double eps, bool enforce_threshold)
{
    if (!(eps > 0)) throw std::invalid_argument("sigma_b: eps must be positive");
    if (enforce_threshold) {
        double thr = epsilon_threshold(led);
        if (eps > thr) {
            std::ostringstream os;
            os << "sigma_b: eps = " << eps << " exceeds the threshold " << thr
               << " (binding constraint: "
               << (thr == led.nu_eb * led.nu_eb / (64.0 * led.C_g) ? "nu_eb^2/64C_g"
                   : thr == led.delta0 * led.delta0 / led.C        ? "delta0^2/C"
                                                                   : "g0^2/4M_delta or geometry")
               << ")";
            throw std::invalid_argument(os.str());
        }
    }
    SigmaB sb;
    double s_eb = led.nu_eb * led.nu_eb * led.R0 * led.R0 / (128.0 * eps * eps);
    double s_mu = led.d * led.mu_minus / (2.0 * eps);
    sb.eb_branch = s_eb < s_mu;
    sb.sigma = std::min(s_eb, s_mu);
    sb.b = sb.sigma + led.M_delta / (2.0 * eps);
    return sb;
}

double sigma_branch_crossing(const ConstantsLedger& led)
{
    return led.nu_eb * led.nu_eb * led.R0 * led.R0 / (64.0 * led.d * led.mu_minus);
}

OscillationReport oscillation_on_U(const ScalarField& field, const ConstantsLedger& led,
                                   double eps, int probes)
{
    OscillationReport rep;
    rep.quad_bound = 4.0 * led.L * led.C * eps;
    double w = std::sqrt(led.C * eps);
    // scan a dense ambient grid over N(S)'s bounding box, keeping U members
    CatalogInfo info = catalog_info(field.name());
    Vec lo, hi;
    info.N_S->bounding_box(lo, hi);
    int n = std::max(8, int(std::round(std::pow(double(probes), 1.0 / field.dim()))));
    double vmax = -std::numeric_limits<double>::infinity();
    double vmin = std::numeric_limits<double>::infinity();
    std::vector<int> idx(field.dim(), 0);
    while (true) {
        Vec x(field.dim());
        for (int a = 0; a < field.dim(); ++a)
            x[a] = lo[a] + (hi[a] - lo[a]) * (idx[a] + 0.5) / n;
        if (field.dist_to_optimal(x) <= w) {
            double v = field.value(x);
            vmax = std::max(vmax, v);
            vmin = std::min(vmin, v);
        }
        int a = 0;
        for (; a < field.dim(); ++a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
        if (a == field.dim()) break;
    }
    rep.direct = vmax > vmin ? vmax - vmin : 0.0;
    return rep;
}

double epsilon_threshold(const ConstantsLedger& led)
{
    double t = std::min({led.nu_eb * led.nu_eb / (64.0 * led.C_g),
                         led.delta0 * led.delta0 / led.C,
                         led.g0 * led.g0 / (4.0 * led.M_delta)});
    if (led.reach) t = std::min(t, *led.reach);
    if (led.B_stability && *led.B_stability > 0)
        t = std::min(t, 1.0 / (led.C * 4.0 * (*led.B_stability) * (*led.B_stability)));
    return t;
}

LyapunovCheckReport verify_lyapunov(const ScalarField& field, const ConstantsLedger& led,
                                    double eps, double grid_h, double extent)
{
    if (extent <= 0.0) extent = 4.0 * led.R0;
    SigmaB sb = sigma_b(led, eps);

    LyapunovCheckReport rep;
    rep.eps = eps;
    rep.sigma = sb.sigma;
    rep.b = sb.b;
    rep.tube_radius = std::sqrt(led.C * eps);
    rep.grid_h = grid_h;

    const int d = field.dim();
    int n = int(std::ceil(2.0 * extent / grid_h));
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= std::size_t(n);

    struct Slot {
        std::size_t count = 0;
        std::size_t violations = 0;
        double worst = std::numeric_limits<double>::infinity();
        Vec where;
    };
    unsigned nt = thread_count();
    std::vector<Slot> slots(nt);

    parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        // map range start to a slot deterministically
        std::size_t chunk = (total + nt - 1) / nt;
        Slot& slot = slots[std::min<std::size_t>(lo / std::max<std::size_t>(chunk, 1), nt - 1)];
        Vec x(d);
        for (std::size_t c = lo; c < hi; ++c) {
            std::size_t rem = c;
            for (int a = 0; a < d; ++a) {
                int ia = int(rem % std::size_t(n));
                rem /= std::size_t(n);
                x[a] = -extent + (ia + 0.5) * grid_h;
            }
            if (x.norm() > extent) continue;
            ++slot.count;
            double lhs = field.laplacian(x) / (2.0 * eps) -
                         field.gradient(x).squaredNorm() / (4.0 * eps * eps);
            bool in_U = field.dist_to_optimal(x) <= rep.tube_radius;
            double rhs = -sb.sigma + (in_U ? sb.b : 0.0);
            double margin = rhs - lhs;  // >= 0 means the inequality holds
            if (margin < slot.worst) {
                slot.worst = margin;
                slot.where = x;
            }
            if (margin < 0.0) ++slot.violations;
        }
    });

    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : slots) {
        rep.nodes += s.count;
        rep.violations += s.violations;
        if (s.count && s.worst < rep.worst_margin) {
            rep.worst_margin = s.worst;
            rep.worst_point = s.where;
        }
    }
    return rep;
}

double combine_lyapunov_pi(double sigma, double b, double rho_U)
{
    if (!(sigma > 0) || !(b > 0) || !(rho_U > 0))
        throw std::invalid_argument("combine_lyapunov_pi: inputs must be positive");
    return sigma * rho_U / (b + rho_U);
}

double holley_stroock(double rho_base, double oscillation, double eps)
{
    if (oscillation < 0) throw std::invalid_argument("holley_stroock: oscillation must be >= 0");
    return std::exp(-oscillation / eps) * rho_base;
}

FinalBound final_bound(const ConstantsLedger& led, double lambda1n_U, double lambda1_S, double eps)
{
    double thr = epsilon_threshold(led);
    if (!(eps > 0) || eps > thr) {
        std::ostringstream os;
        os << "final_bound: eps = " << eps << " exceeds the threshold " << thr
           << "; bound refused";
        throw std::invalid_argument(os.str());
    }
    if (lambda1n_U <= 0.0 || lambda1_S <= 0.0)
        throw std::invalid_argument("final_bound: degenerate eigenvalue input; bound is 0");

    FinalBound fb;
    fb.eps = eps;
    fb.lambda_input = lambda1_S;
    double pref = (led.d * led.mu_minus) / (led.d * led.mu_minus + led.M_delta);
    fb.log_half = std::log(0.5);
    fb.log_prefactor = std::log(pref);
    fb.log_exp = -led.C_bar;
    fb.log_lambda = std::log(lambda1n_U);
    fb.log_intermediate = fb.log_half + fb.log_prefactor + fb.log_exp + fb.log_lambda;
    fb.log_final = led.log_C_P + std::log(lambda1_S);
    return fb;
}

}  // namespace gibbslab
