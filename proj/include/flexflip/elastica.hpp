#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace flexflip {

using Vec2 = Eigen::Vector2d;

/// Planar inextensible elastic rod. Contact #1 sits at the origin with the
/// tangent clamped along +x; contact #2 pins the far end.
struct RodSpec {
    double length = 1.0;    // mm (or 1 in nondimensional mode)
    double rigidity = 1.0;  // N mm^2
    int segments = 100;

    static RodSpec nondimensional(int segments = 100) { return {1.0, 1.0, segments}; }

    double segment_length() const { return length / segments; }
    void validate() const;
};

/// Discrete tangent-angle shape. Node i sits at
///   x_i = h * sum_{j<i} cos(phi_j),  z_i = h * sum_{j<i} sin(phi_j)
/// so phi_j is the heading of segment j and phi_N is the free-end tangent that
/// only enters the bending energy.
struct RodShape {
    std::vector<double> phi;  // N+1 tangent angles, phi[0] == 0
    double h = 0.0;

    static RodShape straight(const RodSpec& rod);

    int segments() const { return static_cast<int>(phi.size()) - 1; }
    double length() const { return h * segments(); }
    std::vector<Vec2> nodes() const;
    Vec2 endpoint() const;
    /// kappa_i = (phi_{i+1} - phi_i) / h, i = 0..N-1.
    std::vector<double> curvature() const;
    Vec2 end_tangent() const;
};

struct SolverConfig {
    double tol_c = 1e-8;  // constraint tolerance, fraction of rod length
    double tol_g = 1e-6;  // scaled stationarity tolerance
    int max_iter = 200;   // Newton iterations per continuation step
    int continuation_steps = 20;
    std::uint64_t restart_seed = 0;

    void validate() const;
};

/// Minimum friction coefficient at contact #2. `feasible == false` means the
/// contact force pulls on the rod and no friction coefficient keeps contact.
struct FrictionBound {
    double mu = 0.0;
    bool feasible = true;
};

struct Residuals {
    double constraint = 0.0;    // |x(L) - p|_inf / L
    double stationarity = 0.0;  // |grad_phi (U - lambda.c)|_inf * L^2 / (R_f h)
};

struct ContactSolution {
    RodShape shape;
    Vec2 target = Vec2::Zero();
    double energy = 0.0;
    /// Endpoint-constraint multipliers: force applied by the finger on the rod,
    /// equal to dU*/dp.
    Vec2 force = Vec2::Zero();
    FrictionBound friction;
    Residuals residuals;
    int iterations = 0;
    bool converged = false;
    /// Endpoint within tol_c of the reachable boundary (taut rod).
    bool near_singular = false;
};

/// Bending energy 1/2 R_f h sum kappa_i^2 of an arbitrary shape.
double flexural_energy(const RodShape& shape, double rigidity);

/// True when p lies in the closed upper half-disk of radius L(1 + tol_c).
bool is_reachable(const RodSpec& rod, const Vec2& p, double tol_c);

/// Minimum-energy shape with the end pinned at `endpoint`, tracked by endpoint
/// continuation from the flat rod. Throws UnreachableEndpoint; an unconverged
/// solve returns the best iterate with `converged == false`.
ContactSolution solve_min_energy_shape(const RodSpec& rod, const Vec2& endpoint,
                                       const SolverConfig& cfg = {});

/// Continuation from an existing equilibrium of the same rod to a new
/// endpoint. Used to follow a moving fingertip without restarting from flat.
ContactSolution continue_min_energy_shape(const RodSpec& rod, const ContactSolution& from,
                                          const Vec2& endpoint, const SolverConfig& cfg = {});

/// Lagrange multipliers of the endpoint constraints (force on the rod from the
/// finger). Throws UnconvergedSolution.
Vec2 compute_contact_force(const ContactSolution& sol, const RodSpec& rod);

/// Unit contact normal at contact #2 pointing from the finger into the rod.
/// The finger rests on the upper face of the rod, so this is the downward
/// normal (sin phi_N, -cos phi_N).
Vec2 contact_normal(const RodShape& shape);

/// tan of the angle between `force` and the contact normal, given rod end
/// tangent and normal. Zero force gives 0.
FrictionBound friction_bound(const Vec2& force, const Vec2& tangent, const Vec2& normal);

FrictionBound min_friction_coefficient(const ContactSolution& sol);

/// Strict sign changes of the discrete curvature, ignoring |kappa| below
/// `noise_floor`. The default floor is tol_g / h.
int inflection_count(const RodShape& shape, double noise_floor);
int inflection_count(const RodShape& shape, const SolverConfig& cfg = {});

}  // namespace flexflip
