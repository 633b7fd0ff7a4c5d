#pragma once

#include "flexflip/elastica.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace flexflip {

/// Node lattice over contact-#2 positions, endpoints included:
/// px_i = px_min + i (px_max - px_min)/(nx - 1), likewise for pz.
struct GridSpec {
    double px_min = -1.0, px_max = 1.0;
    int nx = 41;
    double pz_min = 0.0, pz_max = 1.0;
    int nz = 21;

    /// [-L, L] x [0, L], the full reachable half-disk of the rod.
    static GridSpec half_disk(const RodSpec& rod, int nx = 41, int nz = 21);

    double px(int i) const;
    double pz(int j) const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * nz; }
    /// Row-major, pz outer: index = j * nx + i.
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    void validate() const;
};

struct FieldCell {
    double px = 0.0, pz = 0.0;
    bool reachable = false;
    bool converged = false;
    /// NaN unless reachable and converged.
    double energy = std::numeric_limits<double>::quiet_NaN();
    Vec2 force = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    FrictionBound friction;
    int iterations = 0;
};

struct EnergyField {
    GridSpec grid;
    RodSpec rod;
    std::vector<FieldCell> cells;

    const FieldCell& at(int i, int j) const { return cells[grid.index(i, j)]; }
};

/// Solves every reachable cell independently from the flat rod. Per-cell
/// failures are recorded in the cell; the result does not depend on `threads`.
/// `shapes`, if given, receives the converged shape of each cell (empty phi
/// elsewhere).
EnergyField compute_energy_field(const RodSpec& rod, const GridSpec& grid,
                                 const SolverConfig& cfg = {}, int threads = 1,
                                 std::vector<RodShape>* shapes = nullptr);

/// dU*/dp per cell: the stored contact force on reachable converged cells,
/// empty elsewhere.
std::vector<std::optional<Vec2>> energy_gradient_field(const EnergyField& field);

/// Central differences of the stored energies on cells whose four neighbours
/// are reachable and converged; empty elsewhere.
std::vector<std::optional<Vec2>> central_difference_gradient(const EnergyField& field);

}  // namespace flexflip
