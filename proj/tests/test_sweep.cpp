#include "flexflip/errors.hpp"
#include "flexflip/sweep.hpp"

#include "support/band.hpp"
#include "support/generators.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace flexflip;
using Catch::Approx;

namespace {

AttemptSetup hardware_setup() {
    AttemptSetup s;
    s.rod = {125.0, 1.0, 100};
    s.ramp = PressureRamp::linear(0.0, 0.3, 61);
    return s;
}

}  // namespace

TEST_CASE("axis ranges are inclusive") {
    CHECK(AxisRange{30, 90, 10}.values() == std::vector<double>{30, 40, 50, 60, 70, 80, 90});
    CHECK(AxisRange{0, 1, 0.1}.values().size() == 11);
    CHECK(AxisRange{5, 5, 1}.values() == std::vector<double>{5});
    CHECK(AxisRange{5, 4, 1}.values().empty());
    CHECK_THROWS_AS((AxisRange{0, 1, 0}).values(), InvalidArgument);
}

TEST_CASE("hardware lattice has 1820 configurations in x-major order") {
    const Lattice l = Lattice::hardware();
    CHECK(l.size() == 1820);
    const auto pts = l.points();
    REQUIRE(pts.size() == 1820);
    CHECK(pts.front().x == 30.0);
    CHECK(pts.front().z == 116.0);
    CHECK(pts.front().theta == 0.0);
    CHECK(pts[1].theta == 1.0);
    CHECK(pts[13].z == 117.0);
    CHECK(pts.back().x == 90.0);
    CHECK(pts.back().z == 135.0);
    CHECK(pts.back().theta == 12.0);
}

TEST_CASE("empty lattice is an error") {
    Lattice l = Lattice::hardware();
    l.z = {135.0, 116.0, 1.0};
    CHECK_THROWS_AS(l.points(), InvalidArgument);
    CHECK_THROWS_AS(sweep(hardware_setup(), l), InvalidArgument);
}

TEST_CASE("one-point sweep equals a single classification") {
    Lattice l;
    l.x = {60, 60, 10};
    l.z = {129, 129, 1};
    l.theta = {4, 4, 1};
    const SweepResult r = sweep(hardware_setup(), l);
    REQUIRE(r.entries.size() == 1);
    HandConfig c;
    c.x = 60;
    c.z = 129;
    c.theta = 4;
    const AttemptOutcome o = classify_attempt(hardware_setup(), c);
    CHECK(r.entries[0].outcome.label == o.label);
    CHECK(r.entries[0].outcome.energy_at_separation == o.energy_at_separation);
    CHECK(r.success_mask[0] == (o.label == Outcome::Success));
}

TEST_CASE("affine fit through two points") {
    const AffineFit f = fit_affine({{116.0, 16.1}, {135.0, -1.0}});
    CHECK(std::abs(f.slope + 0.90) <= 1e-9);
    CHECK(std::abs(f.intercept - 120.5) <= 1e-9);
    CHECK(f.residual_rms <= 1e-9);
    CHECK(f.n_points == 2);
}

TEST_CASE("affine fit reproduces noiseless lines") {
    std::vector<std::pair<double, double>> pts;
    for (int z = 116; z <= 135; ++z) pts.emplace_back(z, band::reference_theta(z));
    const AffineFit f = fit_affine(pts);
    CHECK(std::abs(f.slope + 0.90) <= 1e-9);
    CHECK(std::abs(f.intercept - 120.5) <= 1e-9);
    CHECK(f.residual_rms <= 1e-9);
    CHECK(f.n_points == 20);
}

TEST_CASE("affine fit needs two distinct z values") {
    CHECK_THROWS_AS(fit_affine({{120.0, 1.0}, {120.0, 3.0}}), DegenerateFit);
    CHECK_THROWS_AS(fit_affine({}), DegenerateFit);
}

TEST_CASE("property: affine fit under uniform half-degree noise") {
    // Five noisy trials per z over the lattice z range, 100 resamples.
    gen::EndpointSampler rng(31337);
    double slope_sum = 0.0, intercept_sum = 0.0;
    for (int resample = 0; resample < 100; ++resample) {
        std::vector<std::pair<double, double>> pts;
        for (int z = 116; z <= 135; ++z)
            for (int trial = 0; trial < 5; ++trial)
                pts.emplace_back(z, band::reference_theta(z) + rng.uniform(-0.5, 0.5));
        const AffineFit f = fit_affine(pts);
        CHECK(std::abs(f.slope + 0.90) <= 0.05);
        CHECK(std::abs(f.intercept - 120.5) <= 2.0);
        CHECK(f.residual_rms < 0.5);
        slope_sum += f.slope;
        intercept_sum += f.intercept;
    }
    CHECK(slope_sum / 100 == Approx(-0.90).margin(0.01));
    CHECK(intercept_sum / 100 == Approx(120.5).margin(0.5));
}

TEST_CASE("feasible interval of a sweep that follows the hardware band") {
    const SweepResult r = band::synthetic(Lattice::hardware(), [](double x, double z, double th) {
        return x >= 50.0 && x <= 70.0 && std::abs(th - band::reference_theta(z)) <= 1.0;
    });
    const XInterval iv = feasible_x_interval(r);
    CHECK(iv.x_min == 50.0);
    CHECK(iv.x_max == 70.0);
    const AffineFit f = fit_affine(successes_in(r, iv));
    CHECK(f.slope < 0.0);
}

TEST_CASE("feasible interval edge cases") {
    const Lattice l = Lattice::hardware();
    const XInterval all = feasible_x_interval(band::synthetic(l, [](double, double, double) { return true; }));
    CHECK(all.x_min == 30.0);
    CHECK(all.x_max == 90.0);

    const XInterval one = feasible_x_interval(band::synthetic(l, [](double x, double, double) { return x == 40.0; }));
    CHECK(one.x_min == 40.0);
    CHECK(one.x_max == 40.0);

    CHECK_THROWS_AS(feasible_x_interval(band::synthetic(l, [](double, double, double) { return false; })),
                    NoSuccesses);

    // Two equally wide runs: the smaller x wins.
    const XInterval tie = feasible_x_interval(
        band::synthetic(l, [](double x, double, double) { return x == 30.0 || x == 40.0 || x == 70.0 || x == 80.0; }));
    CHECK(tie.x_min == 30.0);
    CHECK(tie.x_max == 40.0);

    // The wider run wins over the earlier one.
    const XInterval wide = feasible_x_interval(
        band::synthetic(l, [](double x, double, double) { return x == 30.0 || (x >= 60.0 && x <= 80.0); }));
    CHECK(wide.x_min == 60.0);
    CHECK(wide.x_max == 80.0);

    // Weak columns below the fraction split runs.
    const XInterval split = feasible_x_interval(band::synthetic(l, [](double x, double z, double) {
        return (x >= 50.0 && x <= 70.0) && (x != 60.0 || z < 120.0);
    }));
    CHECK(split.x_min == 50.0);
    CHECK(split.x_max == 50.0);
    CHECK_THROWS_AS(feasible_x_interval(band::synthetic(l, [](double, double, double) { return true; }), 0.0),
                    InvalidArgument);
}

TEST_CASE("coupled model forms a negative-slope band") {
    const SweepResult r = sweep(hardware_setup(), Lattice::hardware(), {}, 2);
    REQUIRE(r.entries.size() == 1820);
    const XInterval iv = feasible_x_interval(r);
    INFO("feasible x [" << iv.x_min << ", " << iv.x_max << "]");
    for (double x : r.lattice.x.values()) {
        if (x < iv.x_min || x > iv.x_max) continue;
        const band::SliceStats s = band::slice(r, x);
        INFO("x = " << x);
        CHECK(s.successes > 0);
        CHECK(s.components == 1);
        CHECK(s.isolated == 0);
    }
    const AffineFit f = fit_affine(successes_in(r, iv));
    CHECK(f.slope < 0.0);
    for (const auto& e : r.entries) CHECK(e.outcome.label != Outcome::Unconverged);
}

TEST_CASE("sweep is independent of the thread count") {
    Lattice l;
    l.x = {50, 70, 10};
    l.z = {120, 132, 3};
    l.theta = {0, 12, 4};
    const SweepResult a = sweep(hardware_setup(), l, {}, 1);
    const SweepResult b = sweep(hardware_setup(), l, {}, 3);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        CHECK(a.entries[k].outcome.label == b.entries[k].outcome.label);
        const double ea = a.entries[k].outcome.energy_at_separation;
        const double eb = b.entries[k].outcome.energy_at_separation;
        CHECK((ea == eb || (std::isnan(ea) && std::isnan(eb))));
    }
    CHECK(a.success_mask == b.success_mask);
}
