// Acceptance checks: one PASS/FAIL line per criterion.

#include "flexflip/elastica.hpp"
#include "flexflip/energy_field.hpp"
#include "flexflip/finger.hpp"
#include "flexflip/grasp.hpp"
#include "flexflip/io.hpp"
#include "flexflip/sweep.hpp"

#include "support/band.hpp"
#include "support/generators.hpp"
#include "support/penalty_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace flexflip;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void run(const char* name, double budget_s, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < budget_s;
    const bool ok = v.pass && in_time;
    if (!ok) ++failures;
    std::printf("%s  %-28s %7.2fs (limit %gs)  %s%s\n", ok ? "PASS" : "FAIL", name, dt, budget_s,
                v.detail.c_str(), in_time ? "" : " [over time]");
    std::fflush(stdout);
}

const RodSpec kUnit = RodSpec::nondimensional(100);

AttemptSetup hardware_setup() {
    AttemptSetup s;
    s.rod = {125.0, 1.0, 100};
    s.ramp = PressureRamp::linear(0.0, 0.3, 61);
    return s;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict undeformed() {
    const ContactSolution s = solve_min_energy_shape(kUnit, {1.0, 0.0});
    return {s.converged && s.energy <= 1e-10 && s.force.norm() <= 1e-8,
            fmt("U=%.2e |f|=%.2e", s.energy, s.force.norm())};
}

Verdict scaling() {
    gen::EndpointSampler rng(101);
    const RodSpec big{125.0, 1.0, 100};
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const Vec2 p = rng.lower_sector();
        const ContactSolution a = solve_min_energy_shape(kUnit, p);
        const ContactSolution b = solve_min_energy_shape(big, 125.0 * p);
        if (!a.converged || !b.converged) return {false, "unconverged endpoint"};
        worst = std::max(worst, std::abs(b.energy - a.energy / 125.0) / (a.energy / 125.0));
    }
    return {worst <= 1e-6, fmt("max rel err %.2e over 10 endpoints", worst)};
}

Verdict sensitivity() {
    gen::EndpointSampler rng(20240611);
    auto energy = [](const Vec2& p) {
        const ContactSolution s = solve_min_energy_shape(kUnit, p);
        if (!s.converged) throw std::runtime_error("unconverged finite-difference point");
        return s.energy;
    };
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const Vec2 p = rng.lower_sector();
        const ContactSolution s = solve_min_energy_shape(kUnit, p);
        if (!s.converged) return {false, "unconverged endpoint"};
        const double d = 1e-4;
        const Vec2 fd((energy(p + Vec2(d, 0)) - energy(p - Vec2(d, 0))) / (2 * d),
                      (energy(p + Vec2(0, d)) - energy(p - Vec2(0, d))) / (2 * d));
        worst = std::max(worst, (s.force - fd).norm() / fd.norm());
    }
    return {worst <= 1e-3, fmt("max rel err %.2e over 20 endpoints", worst)};
}

Verdict oracle_equivalence() {
    const std::vector<Vec2> endpoints{{0.8, 0.2}, {0.9, 0.05}, {0.5, 0.05}, {0.5, 0.3}, {0.7, 0.4},
                                      {0.3, 0.1}, {0.6, 0.15}, {0.85, 0.3}, {0.4, 0.2}, {0.2, 0.05}};
    const RodSpec rod = RodSpec::nondimensional(16);
    double worst = 0.0;
    for (std::size_t k = 0; k < endpoints.size(); ++k) {
        const ContactSolution s = solve_min_energy_shape(rod, endpoints[k]);
        const auto ref = oracle::penalty_multistart(16, 1.0, 1.0, endpoints[k], 200, 1000 + k);
        if (!s.converged || ref.accepted == 0) return {false, "no comparison"};
        worst = std::max(worst, std::abs(s.energy - ref.energy) / ref.energy);
    }
    return {worst <= 0.02, fmt("max rel diff %.2e over 10 endpoints", worst)};
}

Verdict s_shape() {
    int converged = 0, worst = 0;
    for (int i = 1; i <= 20; ++i)
        for (int j = 1; j <= 10; ++j) {
            const Vec2 p(i / 21.0, j / 11.0);
            if (p.norm() >= 1.0) continue;
            const ContactSolution s = solve_min_energy_shape(kUnit, p);
            if (!s.converged) continue;
            ++converged;
            worst = std::max(worst, inflection_count(s.shape));
        }
    return {worst <= 1, fmt("max inflections %d over %d converged shapes", worst, converged)};
}

Verdict friction_map() {
    const GridSpec g = GridSpec::half_disk(kUnit, 30, 15);
    const EnergyField f = compute_energy_field(kUnit, g);
    const FieldCell& tip = f.at(29, 0);
    bool ok = tip.converged && tip.friction.feasible && tip.friction.mu == 0.0;
    const double spacing = (g.px_max - g.px_min) / (g.nx - 1);
    int cells = 0, infeasible = 0;
    for (const FieldCell& c : f.cells) {
        if (!c.reachable || !c.converged) continue;
        ++cells;
        if (c.friction.feasible) {
            ok = ok && std::isfinite(c.friction.mu) && c.friction.mu >= 0.0;
        } else {
            ++infeasible;
            ok = ok && 1.0 - std::hypot(c.px, c.pz) <= 1.5 * spacing;
        }
    }
    return {ok, fmt("mu(L,0)=%g, %d converged cells, %d infeasible at the boundary", tip.friction.mu, cells,
                    infeasible)};
}

Verdict finger_kinematics() {
    const FingerSpec f;
    const double L = f.arc_length;
    const Pose2 base{Vec2::Zero(), 0.0, 1};
    const double quarter = (fingertip_position(f, std::numbers::pi / (2 * L), base) -
                            Vec2(2 * L / std::numbers::pi, 2 * L / std::numbers::pi))
                               .norm();
    const double full = fingertip_position(f, 2 * std::numbers::pi / L, base).norm();
    const double limit = (fingertip_position(f, 1e-9, base) - Vec2(L, 0.0)).norm();
    double lowest = 1e300;
    const PressureRamp ramp = PressureRamp::linear(0.0, 0.3, 61);
    for (const HandConfig& c : Lattice::hardware().points()) {
        const FingertipPath path = nominal_tip_path(f, c, ramp, HandGeometry{}, 125.0);
        for (const Vec2& q : path.points) lowest = std::min(lowest, q.y());
    }
    const bool ok = quarter <= 1e-9 * L && full <= 1e-9 * L && limit <= 1e-6 * L && lowest >= 0.0;
    return {ok, fmt("quarter %.1e, full %.1e, kappa->0 %.1e, min z %g", quarter, full, limit, lowest)};
}

Verdict fit_machinery() {
    std::vector<std::pair<double, double>> exact;
    for (int z = 116; z <= 135; ++z) exact.emplace_back(z, band::reference_theta(z));
    const AffineFit f = fit_affine(exact);
    bool ok = std::abs(f.slope + 0.90) <= 1e-9 && std::abs(f.intercept - 120.5) <= 1e-9;
    gen::EndpointSampler rng(31337);
    double ds = 0.0, di = 0.0;
    for (int r = 0; r < 100; ++r) {
        std::vector<std::pair<double, double>> pts;
        for (int z = 116; z <= 135; ++z)
            for (int t = 0; t < 5; ++t) pts.emplace_back(z, band::reference_theta(z) + rng.uniform(-0.5, 0.5));
        const AffineFit n = fit_affine(pts);
        ds = std::max(ds, std::abs(n.slope + 0.90));
        di = std::max(di, std::abs(n.intercept - 120.5));
    }
    ok = ok && ds <= 0.05 && di <= 2.0;
    return {ok, fmt("exact slope %.12g intercept %.12g; noisy max |dslope| %.3f |dintercept| %.3f", f.slope,
                    f.intercept, ds, di)};
}

Verdict interval_machinery() {
    const SweepResult r = band::synthetic(Lattice::hardware(), [](double x, double z, double th) {
        return x >= 50.0 && x <= 70.0 && std::abs(th - band::reference_theta(z)) <= 1.0;
    });
    const XInterval iv = feasible_x_interval(r);
    return {iv.x_min == 50.0 && iv.x_max == 70.0, fmt("[%g, %g] mm", iv.x_min, iv.x_max)};
}

SweepResult coupled;

Verdict bookkeeping() {
    const SweepResult a = sweep(hardware_setup(), Lattice::hardware(), {}, 1);
    const SweepResult b = sweep(hardware_setup(), Lattice::hardware(), {}, 4);
    const std::string ta = sweep_csv(a), tb = sweep_csv(b);
    std::size_t lines = 0;
    for (char c : ta) lines += c == '\n';
    coupled = a;
    return {lines == 1821 && ta == tb, fmt("%zu rows, threads 1 vs 4 %s", lines - 1, ta == tb ? "identical" : "differ")};
}

Verdict coupled_band() {
    if (coupled.entries.empty()) coupled = sweep(hardware_setup(), Lattice::hardware());
    const XInterval iv = feasible_x_interval(coupled);
    bool ok = true;
    std::ostringstream slices;
    for (double x : coupled.lattice.x.values()) {
        if (x < iv.x_min || x > iv.x_max) continue;
        const band::SliceStats s = band::slice(coupled, x);
        ok = ok && s.successes > 0 && s.components == 1 && s.isolated == 0;
        slices << " x=" << x << ":" << s.successes << "/" << s.components;
    }
    const AffineFit f = fit_affine(successes_in(coupled, iv));
    ok = ok && f.slope < 0.0;
    return {ok, fmt("x in [%g, %g], slope %.3f deg/mm, intercept %.2f deg;", iv.x_min, iv.x_max, f.slope,
                    f.intercept) +
                    slices.str()};
}

}  // namespace

int main() {
    run("undeformed case", 1, undeformed);
    run("scaling law", 10, scaling);
    run("sensitivity identity", 30, sensitivity);
    run("oracle equivalence", 120, oracle_equivalence);
    run("single inflection", 60, s_shape);
    run("friction map", 120, friction_map);
    run("finger kinematics", 60, finger_kinematics);
    run("affine fit machinery", 60, fit_machinery);
    run("feasible interval machinery", 60, interval_machinery);
    run("sweep bookkeeping", 600, bookkeeping);
    run("coupled band structure", 600, coupled_band);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
