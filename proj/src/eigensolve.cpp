#include "gibbslab/eigensolve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>

namespace gibbslab {

double SpectrumResult::lambda1() const
{
    for (double ev : eigenvalues)
        if (ev > 1e-8) return ev;
    throw std::runtime_error("SpectrumResult::lambda1: no nonzero eigenvalue found");
}

namespace {

Vec random_vec(Eigen::Index n, std::uint64_t seed, std::uint32_t stream)
{
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double z0, z1;
        Philox::normal_pair(seed, stream, std::uint64_t(i), 0, z0, z1);
        v[i] = z0;
    }
    return v;
}

void cluster_and_stamp(SpectrumResult& res, const DiscreteOperator& op, double cluster_rel_tol)
{
    std::size_t i = 0;
    while (i < res.eigenvalues.size()) {
        std::size_t j = i + 1;
        double scale = std::max(std::abs(res.eigenvalues[i]), 1e-12);
        while (j < res.eigenvalues.size() &&
               std::abs(res.eigenvalues[j] - res.eigenvalues[i]) <= cluster_rel_tol * scale)
            ++j;
        res.cluster_values.push_back(res.eigenvalues[i]);
        res.multiplicities.push_back(int(j - i));
        i = j;
    }
    res.h = op.h;
    res.tag = op.tag;
}

void finalize(SpectrumResult& res, const DiscreteOperator& op, const std::vector<double>& evs,
              const std::vector<Vec>& vecs, double cluster_rel_tol)
{
    // zero mode first, with its actual residual
    Vec null = op.sqrt_w / op.sqrt_w.norm();
    res.eigenvalues.push_back(0.0);
    res.residuals.push_back((op.B * null).norm());
    for (std::size_t i = 0; i < evs.size(); ++i) {
        res.eigenvalues.push_back(evs[i]);
        res.residuals.push_back((op.B * vecs[i] - evs[i] * vecs[i]).norm());
    }
    cluster_and_stamp(res, op, cluster_rel_tol);
}

/// True when the operator annihilates constants (the usual grid case); ops
/// handed in with some other kernel are solved without deflation.
bool constant_kernel(const DiscreteOperator& op)
{
    Vec null = op.sqrt_w / op.sqrt_w.norm();
    double scale = 0.0;
    for (Eigen::Index i = 0; i < op.size(); ++i) scale = std::max(scale, op.B.coeff(i, i));
    return (op.B * null).norm() <= 1e-10 * std::max(scale, 1e-300);
}

void finalize_raw(SpectrumResult& res, const DiscreteOperator& op, const std::vector<double>& evs,
                  const std::vector<Vec>& vecs, double cluster_rel_tol)
{
    for (std::size_t i = 0; i < evs.size(); ++i) {
        res.eigenvalues.push_back(evs[i]);
        res.residuals.push_back((op.B * vecs[i] - evs[i] * vecs[i]).norm());
    }
    cluster_and_stamp(res, op, cluster_rel_tol);
}

void dense_path(const DiscreteOperator& op, int m, SpectrumResult& res, Mat* vectors,
                double cluster_rel_tol)
{
    Mat Bd = Mat(op.B);
    Eigen::SelfAdjointEigenSolver<Mat> es(Bd);
    std::vector<double> evs;
    std::vector<Vec> vecs;
    bool deflate = constant_kernel(op);
    Vec null = op.sqrt_w / op.sqrt_w.norm();
    bool zero_dropped = false;
    int want = deflate ? m - 1 : m;
    for (Eigen::Index i = 0; i < es.eigenvalues().size() && int(evs.size()) < want; ++i) {
        double lam = es.eigenvalues()[i];
        Vec v = es.eigenvectors().col(i);
        if (deflate && !zero_dropped && std::abs(v.dot(null)) > 0.5) {
            zero_dropped = true;  // constant mode, reported separately as 0
            continue;
        }
        evs.push_back(deflate ? std::max(lam, 0.0) : lam);
        vecs.push_back(v);
    }
    if (deflate)
        finalize(res, op, evs, vecs, cluster_rel_tol);
    else
        finalize_raw(res, op, evs, vecs, cluster_rel_tol);
    if (vectors) {
        vectors->resize(op.size(), Eigen::Index(vecs.size()));
        for (std::size_t i = 0; i < vecs.size(); ++i) vectors->col(Eigen::Index(i)) = vecs[i];
    }
}

/// One shift-invert Lanczos sweep with full reorthogonalization; the Krylov
/// space is kept orthogonal to `deflate` (the constant mode plus any
/// eigenvectors found in an earlier sweep, so exact multiplicities are
/// recovered). `solve` applies (B + sigma I)^{-1}.
std::vector<std::pair<double, Vec>> lanczos_sweep(const DiscreteOperator& op,
                                                  const EigenOptions& opt, double sigma,
                                                  const std::function<Vec(const Vec&)>& solve,
                                                  const std::vector<Vec>& deflate, int want,
                                                  std::uint32_t stream)
{
    const Eigen::Index n = op.size();
    auto project = [&](Vec& v) {
        for (const auto& d : deflate) v -= d.dot(v) * d;
    };

    int maxit = int(std::min<Eigen::Index>(opt.max_iters, n - Eigen::Index(deflate.size()) - 1));
    std::vector<Vec> Q;
    Q.reserve(maxit + 1);
    Vec q = random_vec(n, 777, stream);
    project(q);
    q.normalize();
    Q.push_back(q);
    std::vector<double> alpha, beta;

    auto ritz_converged = [&](int k) {
        Mat T = Mat::Zero(k, k);
        for (int i = 0; i < k; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < k; ++i) {
            T(i, i + 1) = beta[i];
            T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Mat> tes(T);
        int converged = 0;
        for (int r = 0; r < want && r < k; ++r) {
            int col = k - 1 - r;
            double theta = tes.eigenvalues()[col];
            double resid = std::abs(beta.back() * tes.eigenvectors()(k - 1, col));
            if (theta > 0 && resid < 1e-11 * theta) ++converged;
        }
        return converged >= want;
    };

    for (int j = 0; j < maxit; ++j) {
        Vec z = solve(Q[j]);
        project(z);
        double a = Q[j].dot(z);
        alpha.push_back(a);
        z -= a * Q[j];
        if (j > 0) z -= beta[j - 1] * Q[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qq : Q) z -= qq.dot(z) * qq;
        double b = z.norm();
        if (b < 1e-14) break;
        beta.push_back(b);
        Q.push_back(z / b);
        if (j >= want + 4 && j % 4 == 0 && ritz_converged(j + 1)) break;
    }

    int k = int(alpha.size());
    std::vector<std::pair<double, Vec>> pairs;
    if (k < 2) return pairs;
    Mat T = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 < k; ++i) {
        T(i, i + 1) = beta[i];
        T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Mat> tes(T);
    for (int r = 0; r < want && r < k; ++r) {
        int col = k - 1 - r;
        double theta = tes.eigenvalues()[col];
        if (theta <= 0) break;
        double lam = 1.0 / theta - sigma;
        Vec v = Vec::Zero(n);
        for (int i = 0; i < k; ++i) v += tes.eigenvectors()(i, col) * Q[i];
        v.normalize();
        pairs.emplace_back(std::max(lam, 0.0), std::move(v));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return pairs;
}

/// Two deflated sweeps recover degenerate clusters a single Krylov vector
/// cannot see; both reuse the same factorization.
bool lanczos_outer(const DiscreteOperator& op, const EigenOptions& opt, double sigma,
                   const std::function<Vec(const Vec&)>& solve, SpectrumResult& res, Mat* vectors)
{
    const Eigen::Index n = op.size();
    const int want = opt.m - 1;
    Vec null = op.sqrt_w / op.sqrt_w.norm();

    std::vector<Vec> deflate = {null};
    auto pass1 = lanczos_sweep(op, opt, sigma, solve, deflate, want, 1);
    if (int(pass1.size()) < std::min<int>(want, int(n) - 2)) return false;
    for (const auto& [lam, v] : pass1) deflate.push_back(v);
    auto pass2 = lanczos_sweep(op, opt, sigma, solve, deflate, want, 2);

    std::vector<std::pair<double, Vec>> pairs = std::move(pass1);
    for (auto& p : pass2) pairs.push_back(std::move(p));
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (int(pairs.size()) > want) pairs.resize(std::size_t(want));
    if (int(pairs.size()) < want) return false;

    std::vector<double> evs;
    std::vector<Vec> vecs;
    for (auto& [lam, v] : pairs) {
        evs.push_back(lam);
        vecs.push_back(std::move(v));
    }
    finalize(res, op, evs, vecs, opt.cluster_rel_tol);
    res.converged = true;
    for (std::size_t i = 1; i < res.residuals.size(); ++i) {
        double lam = res.eigenvalues[i];
        if (res.residuals[i] > 100 * opt.tol * std::max(1.0, lam)) res.converged = false;
    }
    if (vectors) {
        vectors->resize(n, Eigen::Index(vecs.size()));
        for (std::size_t i = 0; i < vecs.size(); ++i) vectors->col(Eigen::Index(i)) = vecs[i];
    }
    return true;
}

double pick_shift(const DiscreteOperator& op, const EigenOptions& opt)
{
    if (opt.shift_hint > 0) return 0.1 * opt.shift_hint;
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < op.size(); ++i) dmin = std::min(dmin, op.B.coeff(i, i));
    return std::max(1e-10, 1e-4 * dmin);
}

}  // namespace

SpectrumResult smallest_eigenpairs(const DiscreteOperator& op, Mat& vectors,
                                   const EigenOptions& opt)
{
    SpectrumResult res;
    if (op.size() <= 4096 && !opt.force_iterative) {
        dense_path(op, opt.m, res, &vectors, opt.cluster_rel_tol);
        return res;
    }

    double sigma = pick_shift(op, opt);
    SpMat Bs = op.B;
    for (Eigen::Index i = 0; i < op.size(); ++i) Bs.coeffRef(i, i) += sigma;

    bool use_factor = op.dim <= 2;  // simplicial LDLT degrades badly in 3D
    if (use_factor) {
        auto ldlt = std::make_shared<Eigen::SimplicialLDLT<SpMat>>();
        ldlt->compute(Bs);
        if (ldlt->info() == Eigen::Success) {
            auto solve = [ldlt](const Vec& x) -> Vec { return ldlt->solve(x); };
            if (lanczos_outer(op, opt, sigma, solve, res, &vectors)) return res;
            res = SpectrumResult{};
        }
    }
    // matrix-free fallback: IC-preconditioned CG as the inner solver
    auto cg = std::make_shared<
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>>>();
    cg->setTolerance(1e-10);
    cg->setMaxIterations(8000);
    cg->compute(Bs);
    auto solve = [cg](const Vec& x) -> Vec { return cg->solve(x); };
    if (!lanczos_outer(op, opt, sigma, solve, res, &vectors)) {
        res.converged = false;  // partial result flagged
    }
    return res;
}

SpectrumResult smallest_eigenvalues(const DiscreteOperator& op, const EigenOptions& opt)
{
    Mat dummy;
    return smallest_eigenpairs(op, dummy, opt);
}

RayleighWitness make_rayleigh_witness(const DiscreteOperator& op, const Vec& raw)
{
    RayleighWitness w;
    double mean = op.w.dot(raw) / op.w.sum();
    w.values = raw.array() - mean;
    w.mean_zero = std::abs(op.w.dot(w.values)) <= 1e-10 * op.w.sum() * 
                  std::max(1.0, w.values.cwiseAbs().maxCoeff());
    w.quotient = rayleigh_quotient(op, raw);
    return w;
}

double rayleigh_quotient(const DiscreteOperator& op, const Vec& witness)
{
    if (witness.size() != op.size())
        throw std::invalid_argument("rayleigh_quotient: size mismatch");
    double wsum = op.w.sum();
    double mean = op.w.dot(witness) / wsum;
    Vec u = witness.array() - mean;
    double denom = op.weighted_inner(u, u);
    if (denom <= 1e-24 * wsum)
        throw std::invalid_argument("rayleigh_quotient: witness vanishes after mean projection");
    Vec Au = op.apply_weighted(u);
    return op.weighted_inner(Au, u) / denom;
}

}  // namespace gibbslab
