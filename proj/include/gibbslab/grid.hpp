#pragma once

#include "gibbslab/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gibbslab {

/// Cell-centered tensor grid with an optional cut-cell mask. Partial cells
/// carry volume fractions and faces carry aperture fractions so that masked
/// Neumann problems converge on smooth domains; plain boxes have all
/// fractions equal to one.
struct GridDomain {
    enum class Boundary { Neumann, Truncation };

    int dim = 0;
    Vec lo, hi;
    Eigen::VectorXi n;  // cells per axis
    Vec h;              // per-axis spacing
    Boundary boundary = Boundary::Neumann;

    std::vector<double> volfrac;        // per cell, 0 if inactive
    std::vector<std::int64_t> index;    // cell -> active id (-1 inactive)
    std::vector<std::int64_t> active;   // active id -> cell
    // aperture[a][c]: fraction of the face between cell c and c + stride(a)
    std::vector<std::vector<double>> aperture;

    std::size_t total_cells() const;
    std::size_t n_active() const { return active.size(); }
    std::size_t stride(int axis) const;
    Vec cell_center(std::int64_t cell) const;
    std::int64_t cell_of(const std::vector<int>& multi) const;

    /// Number of face-connected components of the active set.
    int connected_components() const;

    /// Plain box, all cells active.
    static GridDomain box(const Vec& lo, const Vec& hi, double target_h,
                          Boundary b = Boundary::Neumann);

    /// Cut-cell mask of {sdf >= 0}; sdf must be smooth near its zero set.
    static GridDomain masked(const Vec& lo, const Vec& hi, double target_h,
                             const std::function<double(const Vec&)>& sdf,
                             Boundary b = Boundary::Neumann);
};

/// Run-length encoding of the binary active mask (row-major, starts with the
/// count of inactive cells). Round-trips exactly.
std::vector<std::int64_t> mask_to_rle(const GridDomain& g);
std::vector<bool> rle_to_mask(const std::vector<std::int64_t>& rle, std::size_t total);

}  // namespace gibbslab
