#include "flexflip/energy_field.hpp"

#include "flexflip/errors.hpp"
#include "flexflip/parallel.hpp"

#include <cmath>

namespace flexflip {

GridSpec GridSpec::half_disk(const RodSpec& rod, int nx, int nz) {
    return {-rod.length, rod.length, nx, 0.0, rod.length, nz};
}

double GridSpec::px(int i) const {
    if (nx == 1) return px_min;
    if (i == nx - 1) return px_max;
    return px_min + (px_max - px_min) * i / (nx - 1);
}

double GridSpec::pz(int j) const {
    if (nz == 1) return pz_min;
    if (j == nz - 1) return pz_max;
    return pz_min + (pz_max - pz_min) * j / (nz - 1);
}

void GridSpec::validate() const {
    if (nx < 1 || nz < 1) throw InvalidArgument("grid needs at least one cell per axis");
    if (!std::isfinite(px_min) || !std::isfinite(px_max) || !std::isfinite(pz_min) ||
        !std::isfinite(pz_max))
        throw InvalidArgument("grid extents must be finite");
    if (px_max < px_min || pz_max < pz_min) throw InvalidArgument("grid axis ranges are reversed");
    if (pz_min < 0.0) throw InvalidArgument("grid must lie in the closed upper half-plane");
}

EnergyField compute_energy_field(const RodSpec& rod, const GridSpec& grid, const SolverConfig& cfg,
                                 int threads, std::vector<RodShape>* shapes) {
    rod.validate();
    grid.validate();
    cfg.validate();
    if (shapes) shapes->assign(grid.size(), RodShape{});
    EnergyField field{grid, rod, std::vector<FieldCell>(grid.size())};
    parallel_for(grid.size(), threads, [&](std::size_t k) {
        const int i = static_cast<int>(k % grid.nx);
        const int j = static_cast<int>(k / grid.nx);
        FieldCell cell;
        cell.px = grid.px(i);
        cell.pz = grid.pz(j);
        const Vec2 p(cell.px, cell.pz);
        // The mask is the exact half-disk; the solver's tol_c slack is not used here.
        cell.reachable = p.norm() <= rod.length && p.y() >= 0.0;
        if (cell.reachable) {
            const ContactSolution sol = solve_min_energy_shape(rod, p, cfg);
            cell.converged = sol.converged;
            cell.iterations = sol.iterations;
            if (sol.converged) {
                cell.energy = sol.energy;
                cell.force = sol.force;
                cell.friction = sol.friction;
                if (shapes) (*shapes)[k] = sol.shape;
            }
        }
        field.cells[k] = cell;
    });
    return field;
}

std::vector<std::optional<Vec2>> energy_gradient_field(const EnergyField& field) {
    std::vector<std::optional<Vec2>> out(field.cells.size());
    for (std::size_t k = 0; k < field.cells.size(); ++k) {
        const FieldCell& c = field.cells[k];
        if (c.reachable && c.converged) out[k] = c.force;
    }
    return out;
}

std::vector<std::optional<Vec2>> central_difference_gradient(const EnergyField& field) {
    const GridSpec& g = field.grid;
    std::vector<std::optional<Vec2>> out(field.cells.size());
    auto ok = [&](int i, int j) {
        const FieldCell& c = field.at(i, j);
        return c.reachable && c.converged;
    };
    for (int j = 1; j + 1 < g.nz; ++j) {
        for (int i = 1; i + 1 < g.nx; ++i) {
            if (!ok(i, j) || !ok(i - 1, j) || !ok(i + 1, j) || !ok(i, j - 1) || !ok(i, j + 1)) continue;
            const double dx = g.px(i + 1) - g.px(i - 1);
            const double dz = g.pz(j + 1) - g.pz(j - 1);
            out[g.index(i, j)] = Vec2((field.at(i + 1, j).energy - field.at(i - 1, j).energy) / dx,
                                      (field.at(i, j + 1).energy - field.at(i, j - 1).energy) / dz);
        }
    }
    return out;
}

}  // namespace flexflip
