#include "gibbslab/operators.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace gibbslab {

Vec DiscreteOperator::apply_weighted(const Vec& f) const
{
    return (B * (sqrt_w.cwiseProduct(f))).cwiseQuotient(sqrt_w);
}

double DiscreteOperator::weighted_inner(const Vec& f, const Vec& g) const
{
    return (f.cwiseProduct(g)).dot(w);
}

double DiscreteOperator::symmetry_defect(int pairs, std::uint64_t seed) const
{
    const Eigen::Index n = size();
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        Vec f(n), g(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double z0, z1;
            Philox::normal_pair(seed, std::uint32_t(p), std::uint64_t(i), 0, z0, z1);
            f[i] = z0;
            g[i] = z1;
        }
        Vec Af = apply_weighted(f), Ag = apply_weighted(g);
        double lhs = weighted_inner(Af, g), rhs = weighted_inner(f, Ag);
        double scale = std::max({1e-300, std::abs(lhs), std::abs(rhs)});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

double DiscreteOperator::zero_mode_residual() const
{
    Vec ones = Vec::Ones(size());
    Vec A1 = apply_weighted(ones);
    double num = std::sqrt(weighted_inner(A1, A1));
    double den = std::sqrt(weighted_inner(ones, ones));
    // normalize by a representative operator scale so the residual is relative
    double scale = B.coeffs().cwiseAbs().maxCoeff();
    return num / (den * std::max(scale, 1e-300));
}

namespace {

struct FaceTriplets {
    std::vector<Eigen::Triplet<double>> trip;
    Vec diag;
};

/// Assemble B from face conductances c_f and node weights w:
/// B_ij = -c_f / sqrt(w_i w_j), B_ii = sum_f c_f / w_i.
DiscreteOperator build_from_faces(const GridDomain& g,
                                  const std::function<double(std::int64_t, std::int64_t, int)>& face_coef,
                                  Vec w, std::string tag)
{
    const std::size_t na = g.n_active();
    Vec sw = w.cwiseSqrt();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(na * (2 * g.dim + 1));
    Vec diag = Vec::Zero(Eigen::Index(na));

    std::size_t total = g.total_cells();
    for (int a = 0; a < g.dim; ++a) {
        std::size_t st = g.stride(a);
        for (std::size_t c = 0; c + st < total; ++c) {
            double ap = g.aperture[a][c];
            if (ap <= 0.0) continue;
            std::size_t rem = c;
            for (int b = 0; b < a; ++b) rem /= std::size_t(g.n[b]);
            if (int(rem % std::size_t(g.n[a])) + 1 == g.n[a]) continue;  // axis boundary
            std::int64_t i = g.index[c], j = g.index[c + st];
            if (i < 0 || j < 0) continue;
            double cf = face_coef(std::int64_t(c), std::int64_t(c + st), a) * ap;
            if (cf <= 0.0) continue;
            double off = -cf / (sw[i] * sw[j]);
            trip.emplace_back(int(i), int(j), off);
            trip.emplace_back(int(j), int(i), off);
            diag[i] += cf / w[i];
            diag[j] += cf / w[j];
        }
    }
    for (std::size_t i = 0; i < na; ++i) trip.emplace_back(int(i), int(i), diag[Eigen::Index(i)]);

    DiscreteOperator op;
    op.B.resize(Eigen::Index(na), Eigen::Index(na));
    op.B.setFromTriplets(trip.begin(), trip.end());
    op.B.makeCompressed();
    op.w = std::move(w);
    op.sqrt_w = op.w.cwiseSqrt();
    op.tag = std::move(tag);
    op.h = g.h.maxCoeff();
    op.dim = g.dim;
    return op;
}

}  // namespace

DiscreteOperator assemble_neumann_laplacian(const GridDomain& domain)
{
    if (domain.connected_components() != 1)
        throw std::runtime_error(
            "assemble_neumann_laplacian: mask is disconnected (lambda_1 would be spurious)");

    double cellvol = 1.0;
    for (int a = 0; a < domain.dim; ++a) cellvol *= domain.h[a];

    Vec w = Vec::Zero(Eigen::Index(domain.n_active()));
    for (std::size_t i = 0; i < domain.n_active(); ++i)
        w[Eigen::Index(i)] = domain.volfrac[std::size_t(domain.active[i])] * cellvol;

    auto face = [&](std::int64_t, std::int64_t, int a) {
        return cellvol / (domain.h[a] * domain.h[a]);  // area/h = cellvol/h^2
    };
    std::ostringstream tag;
    tag << "neumann_laplacian dim=" << domain.dim << " h=" << domain.h.maxCoeff();
    return build_from_faces(domain, face, std::move(w), tag.str());
}

DiscreteOperator assemble_weighted_generator(const ScalarField& field, double eps,
                                             const GridDomain& domain)
{
    if (!(eps > 0)) throw std::invalid_argument("assemble_weighted_generator: eps must be > 0");
    if (field.dim() != domain.dim)
        throw std::invalid_argument("assemble_weighted_generator: dimension mismatch");

    std::size_t total = domain.total_cells();
    std::vector<double> V(total, 0.0);
    parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t c = lo; c < hi; ++c)
            V[c] = field.value(domain.cell_center(std::int64_t(c)));
    });
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < total; ++c)
        if (domain.index[c] >= 0) vmin = std::min(vmin, V[c]);

    // coverage: the reflecting truncation boundary must sit in the tail
    for (std::size_t c = 0; c < total; ++c) {
        if (domain.index[c] < 0) continue;
        std::int64_t rem = std::int64_t(c);
        bool edge = false;
        for (int a = 0; a < domain.dim; ++a) {
            int ia = int(rem % domain.n[a]);
            rem /= domain.n[a];
            if (ia == 0 || ia == domain.n[a] - 1) edge = true;
        }
        if (edge && V[c] - vmin <= 20.0 * eps) {
            std::ostringstream os;
            os << "assemble_weighted_generator: coverage violation at boundary cell " << c
               << " (V - min V = " << V[c] - vmin << " <= 20 eps)";
            throw std::runtime_error(os.str());
        }
    }

    double cellvol = 1.0;
    for (int a = 0; a < domain.dim; ++a) cellvol *= domain.h[a];

    Vec w = Vec::Zero(Eigen::Index(domain.n_active()));
    for (std::size_t i = 0; i < domain.n_active(); ++i) {
        std::size_t c = std::size_t(domain.active[i]);
        w[Eigen::Index(i)] = std::exp(-(V[c] - vmin) / eps) * domain.volfrac[c] * cellvol;
    }

    auto face = [&, vmin, eps](std::int64_t c0, std::int64_t c1, int a) {
        double vf = 0.5 * (V[std::size_t(c0)] + V[std::size_t(c1)]) - vmin;
        return eps * std::exp(-vf / eps) * cellvol / (domain.h[a] * domain.h[a]);
    };
    std::ostringstream tag;
    tag << "generator " << field.name() << " eps=" << eps;
    return build_from_faces(domain, face, std::move(w), tag.str());
}

}  // namespace gibbslab
