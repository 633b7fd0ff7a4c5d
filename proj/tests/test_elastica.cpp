#include "flexflip/elastica.hpp"
#include "flexflip/errors.hpp"

#include "support/generators.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace flexflip;
using Catch::Approx;

namespace {

const RodSpec kUnit = RodSpec::nondimensional(100);

double energy_at(const RodSpec& rod, const Vec2& p) {
    const ContactSolution s = solve_min_energy_shape(rod, p);
    REQUIRE(s.converged);
    return s.energy;
}

/// Central differences of U* with step 1e-4 L.
Vec2 fd_gradient(const RodSpec& rod, const Vec2& p) {
    const double d = 1e-4 * rod.length;
    const Vec2 ex(d, 0.0), ez(0.0, d);
    return {(energy_at(rod, p + ex) - energy_at(rod, p - ex)) / (2 * d),
            (energy_at(rod, p + ez) - energy_at(rod, p - ez)) / (2 * d)};
}

RodShape shape_from(const std::vector<double>& phi, double length) {
    RodShape s;
    s.phi = phi;
    s.h = length / (static_cast<int>(phi.size()) - 1);
    return s;
}

}  // namespace

TEST_CASE("flat rod at the undeformed endpoint") {
    const ContactSolution s = solve_min_energy_shape(kUnit, {1.0, 0.0});
    CHECK(s.converged);
    CHECK(s.energy <= 1e-10);
    CHECK(s.force.norm() <= 1e-8);
    CHECK(s.shape.phi.size() == 101);
    CHECK(s.shape.phi[0] == 0.0);
    CHECK(min_friction_coefficient(s).mu == 0.0);
    CHECK(min_friction_coefficient(s).feasible);
}

TEST_CASE("unreachable endpoints are rejected") {
    CHECK_THROWS_AS(solve_min_energy_shape(kUnit, {1.2, 0.0}), UnreachableEndpoint);
    CHECK_THROWS_AS(solve_min_energy_shape(kUnit, {0.5, -0.01}), UnreachableEndpoint);
    CHECK_FALSE(is_reachable(kUnit, {0.0, 1.001}, 1e-8));
    CHECK(is_reachable(kUnit, {0.0, 1.0}, 1e-8));
}

TEST_CASE("taut endpoints are flagged near-singular") {
    const ContactSolution s = solve_min_energy_shape(kUnit, {0.6, 0.8});
    CHECK(s.near_singular);
    CHECK_FALSE(solve_min_energy_shape(kUnit, {0.8, 0.2}).near_singular);
}

TEST_CASE("invalid rod and solver settings") {
    CHECK_THROWS_AS(RodSpec({0.0, 1.0, 100}).validate(), InvalidArgument);
    CHECK_THROWS_AS(RodSpec({1.0, -1.0, 100}).validate(), InvalidArgument);
    CHECK_THROWS_AS(RodSpec({1.0, 1.0, 7}).validate(), InvalidArgument);
    SolverConfig cfg;
    cfg.tol_c = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
    cfg = {};
    cfg.continuation_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("energy of constructed shapes") {
    std::vector<double> arc(101);
    const double c = 1.7;
    for (int i = 0; i <= 100; ++i) arc[i] = c * i / 100.0;
    CHECK(flexural_energy(shape_from(arc, 1.0), 1.0) == Approx(0.5 * c * c).epsilon(1e-12));
    CHECK(flexural_energy(shape_from(arc, 1.0), 3.0) == Approx(1.5 * c * c).epsilon(1e-12));
    CHECK(flexural_energy(RodShape::straight(kUnit), 1.0) == 0.0);
}

TEST_CASE("node positions follow the left Riemann rule") {
    std::vector<double> phi(9, std::numbers::pi / 2);
    phi[0] = 0.0;
    const RodShape s = shape_from(phi, 8.0);
    const auto nodes = s.nodes();
    REQUIRE(nodes.size() == 9);
    CHECK(nodes[1].x() == Approx(1.0));
    CHECK(nodes[1].y() == Approx(0.0).margin(1e-15));
    CHECK(nodes[8].x() == Approx(1.0));
    CHECK(nodes[8].y() == Approx(7.0));
    CHECK((s.endpoint() - nodes[8]).norm() < 1e-15);
}

TEST_CASE("inflection count on constructed shapes") {
    const int n = 100;
    std::vector<double> straight(n + 1, 0.0), arc(n + 1), wave(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        arc[i] = 2.0 * s;
        // kappa(s) = cos(pi s), integrated.
        wave[i] = std::sin(std::numbers::pi * s) / std::numbers::pi;
    }
    CHECK(inflection_count(shape_from(straight, 1.0)) == 0);
    CHECK(inflection_count(shape_from(arc, 1.0)) == 0);
    CHECK(inflection_count(shape_from(wave, 1.0)) == 1);
}

TEST_CASE("S-shaped solution at (0.8, 0.2)") {
    const ContactSolution s = solve_min_energy_shape(kUnit, {0.8, 0.2});
    REQUIRE(s.converged);
    CHECK(s.residuals.constraint <= 1e-8);
    CHECK(s.residuals.stationarity <= 1e-6);
    CHECK(s.energy > 0.0);
    CHECK(inflection_count(s.shape) == 1);
    CHECK((s.shape.endpoint() - Vec2(0.8, 0.2)).norm() <= 1e-8);
    // Free end carries no moment.
    CHECK(std::abs(s.shape.curvature().back()) <= 1e-6 / s.shape.h);
}

TEST_CASE("contact force equals the finite-difference energy gradient") {
    const Vec2 p(0.8, 0.2);
    const ContactSolution s = solve_min_energy_shape(kUnit, p);
    REQUIRE(s.converged);
    const Vec2 fd = fd_gradient(kUnit, p);
    CHECK((compute_contact_force(s, kUnit) - fd).norm() <= 1e-3 * fd.norm());
}

TEST_CASE("friction bound agrees with the finite-difference force") {
    const Vec2 p(0.8, 0.2);
    const ContactSolution s = solve_min_energy_shape(kUnit, p);
    REQUIRE(s.converged);
    const Vec2 fd = fd_gradient(kUnit, p);
    const FrictionBound from_fd = friction_bound(fd, s.shape.end_tangent(), contact_normal(s.shape));
    const FrictionBound solved = min_friction_coefficient(s);
    REQUIRE(solved.feasible);
    REQUIRE(from_fd.feasible);
    CHECK(std::abs(solved.mu - from_fd.mu) <= 1e-3 * std::abs(from_fd.mu));
}

TEST_CASE("force is linear in rigidity") {
    const Vec2 p(0.7, 0.3);
    const ContactSolution a = solve_min_energy_shape(kUnit, p);
    const ContactSolution b = solve_min_energy_shape({1.0, 2.0, 100}, p);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK((b.force - 2.0 * a.force).norm() <= 1e-12 * a.force.norm());
    CHECK(b.energy == Approx(2.0 * a.energy).epsilon(1e-12));
}

TEST_CASE("unconverged solutions are rejected by the force query") {
    ContactSolution s;
    CHECK_THROWS_AS(compute_contact_force(s, kUnit), UnconvergedSolution);
    CHECK_THROWS_AS(min_friction_coefficient(s), UnconvergedSolution);
}

TEST_CASE("friction bound on constructed forces") {
    const Vec2 t(1.0, 0.0), n(0.0, -1.0);
    CHECK(friction_bound({0.0, -2.0}, t, n).mu == Approx(0.0).margin(1e-15));
    CHECK(friction_bound({1.0, -1.0}, t, n).mu == Approx(1.0));
    CHECK(friction_bound({-3.0, -1.0}, t, n).mu == Approx(3.0));
    CHECK_FALSE(friction_bound({0.0, 1.0}, t, n).feasible);
    CHECK_FALSE(friction_bound({1.0, 0.0}, t, n).feasible);
    const FrictionBound zero = friction_bound(Vec2::Zero(), t, n);
    CHECK(zero.feasible);
    CHECK(zero.mu == 0.0);
}

TEST_CASE("contact normal points into the rod from above") {
    const RodShape flat = RodShape::straight(kUnit);
    CHECK((contact_normal(flat) - Vec2(0.0, -1.0)).norm() < 1e-15);
    CHECK((flat.end_tangent() - Vec2(1.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("energy grows as the fingers close in") {
    double prev = -1.0;
    for (double px = 0.9; px >= 0.5 - 1e-12; px -= 0.05) {
        const double u = energy_at(kUnit, {px, 0.05});
        CHECK(u > prev);
        prev = u;
    }
}

TEST_CASE("solves are bit-identical on repetition") {
    const ContactSolution a = solve_min_energy_shape(kUnit, {0.55, 0.35});
    const ContactSolution b = solve_min_energy_shape(kUnit, {0.55, 0.35});
    CHECK(a.shape.phi == b.shape.phi);
    CHECK(a.energy == b.energy);
    CHECK(a.force == b.force);
}

TEST_CASE("continuation from a neighbour matches a fresh solve") {
    const ContactSolution a = solve_min_energy_shape(kUnit, {0.8, 0.2});
    const ContactSolution b = continue_min_energy_shape(kUnit, a, {0.75, 0.22});
    const ContactSolution c = solve_min_energy_shape(kUnit, {0.75, 0.22});
    REQUIRE(b.converged);
    REQUIRE(c.converged);
    CHECK(b.energy == Approx(c.energy).epsilon(1e-8));
    ContactSolution bad;
    CHECK_THROWS_AS(continue_min_energy_shape(kUnit, bad, {0.7, 0.2}), UnconvergedSolution);
}

TEST_CASE("scaling law under length and rigidity") {
    const std::vector<Vec2> endpoints{{0.8, 0.2}, {0.6, 0.3}, {0.5, 0.05}, {0.9, 0.1}};
    for (const Vec2& p : endpoints) {
        const double base = energy_at(kUnit, p);
        for (double c : {0.5, 2.0, 125.0}) {
            const double scaled = energy_at({c, 1.0, 100}, c * p);
            CHECK(std::abs(scaled - base / c) <= 1e-6 * base / c);
        }
    }
}

TEST_CASE("property: sensitivity identity on random endpoints") {
    gen::EndpointSampler sample(20240611);
    int checked = 0;
    while (checked < 20) {
        const Vec2 p = sample.lower_sector();
        const ContactSolution s = solve_min_energy_shape(kUnit, p);
        if (!s.converged) continue;
        const Vec2 fd = fd_gradient(kUnit, p);
        INFO("endpoint " << p.transpose());
        CHECK((s.force - fd).norm() <= 1e-3 * fd.norm());
        ++checked;
    }
}

TEST_CASE("property: converged interior shapes have at most one inflection") {
    for (int i = 1; i <= 20; ++i) {
        for (int j = 1; j <= 10; ++j) {
            const Vec2 p(i / 21.0, j / 11.0);
            if (p.norm() >= 1.0) continue;
            const ContactSolution s = solve_min_energy_shape(kUnit, p);
            if (!s.converged) continue;
            INFO("endpoint " << p.transpose());
            CHECK(inflection_count(s.shape) <= 1);
            CHECK(std::abs(s.shape.curvature().back()) <= 1e-6 / s.shape.h);
            CHECK(s.energy >= 0.0);
        }
    }
}
