#pragma once

#include "gibbslab/common.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gibbslab {

// ------------------------------------------------------------ ChartedManifold

/// Compact embedded submanifold of R^d described by a single chart
/// M: Gamma in R^k -> R^d with per-coordinate periodicity flags, plus an
/// orthonormal normal frame N_l, l = 1..d-k. Catalog entries supply analytic
/// derivatives; finite differences are used for cross-checks.
class ChartedManifold {
public:
    virtual ~ChartedManifold() = default;

    int intrinsic_dim() const { return k_; }
    int ambient_dim() const { return d_; }
    const std::string& name() const { return name_; }
    const Vec& domain_lo() const { return lo_; }
    const Vec& domain_hi() const { return hi_; }
    bool periodic(int axis) const { return periodic_[axis]; }

    virtual Vec embed(const Vec& u) const = 0;
    /// d x k matrix of tangent vectors dM/du^i.
    virtual Mat tangents(const Vec& u) const = 0;
    /// d x (d-k) orthonormal normal frame.
    virtual Mat normals(const Vec& u) const = 0;
    /// Second derivative d^2 M / du^i du^j.
    virtual Vec second_deriv(const Vec& u, int i, int j) const = 0;
    /// Distance from an ambient point to the manifold (analytic for catalog).
    virtual double ambient_distance(const Vec& x) const = 0;

    /// Finite-difference tangents, for cross-checking analytic frames.
    Mat tangents_fd(const Vec& u, double h = 1e-6) const;

protected:
    ChartedManifold(int k, int d, std::string name, Vec lo, Vec hi, std::vector<bool> periodic)
        : k_(k), d_(d), name_(std::move(name)), lo_(std::move(lo)), hi_(std::move(hi)),
          periodic_(std::move(periodic))
    {}
    int k_, d_;
    std::string name_;
    Vec lo_, hi_;
    std::vector<bool> periodic_;
};

using ManifoldPtr = std::shared_ptr<const ChartedManifold>;

ManifoldPtr make_manifold(const std::string& name);  // circle, circleR, sphere, torus
std::vector<std::string> manifold_names();

// ------------------------------------------------------------------ geometry

struct MetricData {
    Mat g;      // first fundamental form, k x k
    Mat g_inv;
    double det_g = 0.0;
};

struct SecondFundamental {
    std::vector<Mat> G;        // G(l), l = 1..d-k
    std::vector<Mat> G_tilde;  // g^{-1} G(l)
    double sup_norm = 0.0;     // max_l spectral norm of G_tilde(l)
};

/// Metric from analytic tangents; cross-checked against finite differences.
MetricData metric_at(const ChartedManifold& m, const Vec& u, bool fd_check = true);

SecondFundamental second_fundamental_at(const ChartedManifold& m, const Vec& u);

/// Lower bound for the reach from curvature and chart self-distance probes.
double reach_estimate(const ChartedManifold& m, int probes_per_axis = 64);

// -------------------------------------------------------------------- tubes

struct TubularNeighborhood {
    ManifoldPtr base;
    double radius = 0.0;
    double reach_lower_bound = 0.0;
};

/// Rejects radii beyond the estimated reach.
TubularNeighborhood make_tube(ManifoldPtr m, double radius);

/// y(u, r) = M(u) + sum_l r^l N_l(u); |r| <= tube radius.
Vec tube_point(const TubularNeighborhood& tube, const Vec& u, const Vec& r);

/// det(I_k + sum_l r^l Gtilde(l)); positive below the focal distance.
double weyl_density(const ChartedManifold& m, const Vec& u, const Vec& r);

struct QuadratureSpec {
    int tangential = 256;  // nodes per tangential axis
    int normal = 32;       // nodes per normal axis
};

struct TubeIntegral {
    double value = 0.0;
    double refined_value = 0.0;  // doubled resolution
    double refinement_delta = 0.0;
};

/// Integral of an ambient scalar over the tube via the co-area factorization:
/// tangential trapezoid/Gauss nodes times normal Gauss nodes times
/// sqrt(det g) * |det(I + sum r^l Gtilde(l))|.
TubeIntegral tube_integrate(const TubularNeighborhood& tube,
                            const std::function<double(const Vec&)>& phi,
                            const QuadratureSpec& spec = {});

/// Gradient of phi(y(u,r)) in chart coordinates from the ambient gradient.
Vec pushforward_gradient(const TubularNeighborhood& tube,
                         const std::function<Vec(const Vec&)>& grad_phi, const Vec& u,
                         const Vec& r);

}  // namespace gibbslab
