#pragma once

#include "gibbslab/common.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gibbslab {

// --------------------------------------------------------------- ScalarField

/// A potential on R^d with analytic derivatives. Catalog entries are stored
/// shifted so that the global minimum value is 0.
class ScalarField {
public:
    virtual ~ScalarField() = default;

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    double global_min() const { return 0.0; }

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    virtual Vec hessian_apply(const Vec& x, const Vec& v) const = 0;
    virtual double laplacian(const Vec& x) const = 0;

    /// Allocation-free gradient for simulation hot loops.
    virtual void gradient_into(const Vec& x, Vec& out) const { out = gradient(x); }

    /// Distance to the optimal set S; analytic for catalog entries.
    virtual double dist_to_optimal(const Vec& x) const = 0;

    /// Intrinsic dimension of S (0 for isolated minima).
    virtual int optimal_dim() const = 0;

    /// Full Hessian assembled column by column (d <= 3 in practice).
    Mat hessian(const Vec& x) const;

protected:
    ScalarField(int dim, std::string name) : dim_(dim), name_(std::move(name)) {}
    int dim_;
    std::string name_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

/// value/gradient/laplacian triple; rejects non-finite input.
struct EvalBundle {
    double value;
    Vec gradient;
    double laplacian;
};
EvalBundle eval_bundle(const ScalarField& field, const Vec& x);

// ---------------------------------------------------------------- RegionSpec

/// Geometric region of the ambient space: ball, annulus, box, or a base
/// region with open exclusions removed (complement-intersection).
struct RegionSpec {
    enum class Kind { Ball, Annulus, Box, ComplementIntersection };

    Kind kind = Kind::Ball;
    Vec center;                  // ball/annulus
    double r_inner = 0.0;        // annulus
    double r_outer = 0.0;        // ball/annulus
    Vec lo, hi;                  // box
    std::vector<RegionSpec> exclusions;  // ComplementIntersection
    std::unique_ptr<RegionSpec> base;    // ComplementIntersection

    RegionSpec() = default;
    RegionSpec(const RegionSpec& o);
    RegionSpec& operator=(const RegionSpec& o);
    RegionSpec(RegionSpec&&) = default;
    RegionSpec& operator=(RegionSpec&&) = default;

    static RegionSpec ball(const Vec& c, double r);
    static RegionSpec annulus(const Vec& c, double r_in, double r_out);
    static RegionSpec box(const Vec& lo, const Vec& hi);
    static RegionSpec minus(RegionSpec base, std::vector<RegionSpec> exclusions);

    bool contains(const Vec& x) const;           // closed
    bool interior_contains(const Vec& x) const;  // open
    /// Axis-aligned bounding box of the region.
    void bounding_box(Vec& lo_out, Vec& hi_out) const;
    std::string describe() const;
};

// ---------------------------------------------------------------- ProbePlan

/// Deterministic probe layout. Ball/annulus regions are probed on inclusive
/// radial shells times directions so infima attained on region boundaries are
/// hit exactly; boxes on inclusive tensor grids.
struct ProbePlan {
    int shells = 64;
    int directions = 256;
    int grid_per_axis = 65;
    int random_probes = 0;
    std::uint64_t seed = 12345;
};

std::vector<Vec> probe_points(int dim, const RegionSpec& region, const ProbePlan& plan);

// -------------------------------------------------------------- certificates

struct PLCertificate {
    std::string potential;
    RegionSpec region;
    double nu_hat = 0.0;  // 0 signals failure
    Vec worst_point;
    std::size_t sample_count = 0;
    double region_min = 0.0;
    bool low_confidence = false;
};

struct ErrorBoundCertificate {
    std::string potential;
    RegionSpec region;
    double nu_eb_hat = 0.0;
    Vec worst_point;
    std::size_t sample_count = 0;
};

struct GrowthCertificate {
    std::string potential;
    double R0 = 0.0;
    double C_g = 0.0;
    Vec worst_point;
    bool diverging = false;  // ratio still growing across outer shells
};

struct CriticalPoint {
    Vec location;
    double gradient_norm = 0.0;
    enum class Type { Minimum, Maximum, Saddle, Degenerate } type = Type::Degenerate;
    double smallest_eigenvalue = 0.0;
    double largest_eigenvalue = 0.0;
};

struct CriticalPointReport {
    std::vector<CriticalPoint> points;
    double g0 = 0.0;  // min gradient norm over the region minus excluded parts
    Vec g0_location;
};

/// Local PL constant over a region: infimum of |grad V|^2 / (V - region min),
/// probes with excess <= 1e-12 skipped.
PLCertificate certify_pl(const ScalarField& field, const RegionSpec& region, const ProbePlan& plan);

/// Error-bound constant: infimum of |grad V| / dist(x, S) over probes off S.
ErrorBoundCertificate certify_error_bound(const ScalarField& field, const RegionSpec& region,
                                          const ProbePlan& plan);

/// Smallest C_g with |lap V| <= C_g |x|^2 on probes with |x| >= R0.
GrowthCertificate certify_growth(const ScalarField& field, double R0, const ProbePlan& plan,
                                 double r_max = 0.0);

struct CriticalPointOptions {
    int grid_per_axis = 121;
    double stationarity_tol = 1e-8;
    double degenerate_tol = 1e-6;
    int max_refine_iters = 80;
};

/// Scans the region's base box for critical points (clustered grid seeds,
/// Newton refinement on grad V = 0, Hessian classification). Points on a
/// continuum optimal set (k >= 1) are not listed individually. g0 is the
/// minimum gradient norm over the region with its exclusions applied,
/// exclusion boundaries included.
CriticalPointReport locate_critical_points(const ScalarField& field, const RegionSpec& region,
                                           const CriticalPointOptions& opt = {});

/// Connected components (face adjacency) of the sublevel set {V <= c} on a
/// grid over the region's bounding box.
int connectivity_probe(const ScalarField& field, double c, const RegionSpec& region,
                       int grid_per_axis = 201);

// ------------------------------------------------------------------- catalog

/// Declared certification regions and structure metadata for a catalog entry.
struct CatalogInfo {
    std::string name;
    int dim = 0;
    int optimal_dim = 0;                    // k; 0 for singleton optimal sets
    std::string manifold;                   // catalog manifold matching S ("" if none)
    std::optional<RegionSpec> N_S;          // PL neighborhood of S
    std::optional<RegionSpec> N_X;          // neighborhood of the local maxima
    double delta0 = 0.0;                    // dist(boundary of N_S, S)
    double R1 = 0.0;                        // radius of N_X
    double R0 = 0.0;                        // error-bound / growth radius
    double eb_outer = 0.0;                  // outer radius for error-bound probes
    bool pl_circ = false;                   // expected to satisfy the full assumption set
};

FieldPtr make_potential(const std::string& name);
CatalogInfo catalog_info(const std::string& name);
std::vector<std::string> potential_names();

}  // namespace gibbslab
