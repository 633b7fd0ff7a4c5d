#include "flexflip/grasp.hpp"

#include "flexflip/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace flexflip {

namespace {

constexpr std::array<std::pair<Outcome, const char*>, 6> kOutcomeNames{{
    {Outcome::Success, "Success"},
    {Outcome::NoInteraction, "NoInteraction"},
    {Outcome::StuckOnGround, "StuckOnGround"},
    {Outcome::PocketMiss, "PocketMiss"},
    {Outcome::FrictionSlip, "FrictionSlip"},
    {Outcome::Unconverged, "Unconverged"},
}};

Outcome outcome_of(FlexTermination t) {
    switch (t) {
        case FlexTermination::FrictionSlip: return Outcome::FrictionSlip;
        case FlexTermination::NoInteraction: return Outcome::NoInteraction;
        case FlexTermination::StuckOnGround: return Outcome::StuckOnGround;
        case FlexTermination::Unconverged: return Outcome::Unconverged;
        case FlexTermination::RampEnd: break;
    }
    return Outcome::Success;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

}  // namespace

std::string to_string(FlexTermination t) {
    switch (t) {
        case FlexTermination::RampEnd: return "RampEnd";
        case FlexTermination::FrictionSlip: return "FrictionSlip";
        case FlexTermination::NoInteraction: return "NoInteraction";
        case FlexTermination::StuckOnGround: return "StuckOnGround";
        case FlexTermination::Unconverged: return "Unconverged";
    }
    return "?";
}

std::string to_string(Outcome o) {
    for (const auto& [value, name] : kOutcomeNames)
        if (value == o) return name;
    return "?";
}

Outcome outcome_from_string(const std::string& s) {
    for (const auto& [value, name] : kOutcomeNames)
        if (s == name) return value;
    throw InvalidArgument("unknown outcome label '" + s + "'");
}

void GraspThresholds::validate() const {
    if (!(engage_tolerance >= 0.0)) throw InvalidArgument("engage tolerance must be nonnegative");
    if (!(dwell_fraction >= 0.0 && dwell_fraction <= 1.0))
        throw InvalidArgument("dwell fraction must lie in [0, 1]");
    if (!(flip_angle >= 0.0 && flip_angle <= 180.0))
        throw InvalidArgument("flip angle threshold must lie in [0, 180] degrees");
    if (!(pocket_margin >= 0.0)) throw InvalidArgument("pocket margin must be nonnegative");
    if (!(ke_budget >= 0.0)) throw InvalidArgument("kinetic energy budget must be nonnegative");
}

FlexTrace simulate_flex_phase(const RodSpec& rod, const FingertipPath& path, double mu_available,
                              const SolverConfig& cfg, const GraspThresholds& th) {
    rod.validate();
    cfg.validate();
    th.validate();
    if (!(mu_available >= 0.0)) throw InvalidArgument("available friction must be nonnegative");
    if (path.clamped.size() != path.points.size() || path.pressure.size() != path.points.size())
        throw InvalidArgument("fingertip path arrays differ in length");

    FlexTrace trace;
    const std::size_t n = path.size();
    const double L = rod.length;

    std::size_t engage = n;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& q = path.points[k];
        if (q.y() <= th.engage_tolerance && q.x() >= 0.0 && q.x() <= L + th.engage_tolerance) {
            engage = k;
            break;
        }
    }
    // Longest run of table contact before the rod is reached.
    std::size_t run = 0, longest = 0;
    for (std::size_t k = 0; k < engage; ++k) {
        run = path.clamped[k] ? run + 1 : 0;
        longest = std::max(longest, run);
    }
    const bool stuck = n > 0 && static_cast<double>(longest) / n > th.dwell_fraction;
    if (engage == n) {
        trace.termination = stuck ? FlexTermination::StuckOnGround : FlexTermination::NoInteraction;
        return trace;
    }
    if (stuck) {
        trace.termination = FlexTermination::StuckOnGround;
        return trace;
    }

    const Vec2 touch = path.points[engage];
    trace.contact_offset = std::max(0.0, L - touch.x());
    trace.termination = FlexTermination::RampEnd;
    bool have_prev = false;
    for (std::size_t k = engage; k < n; ++k) {
        const Vec2 p(L + path.points[k].x() - touch.x(), std::max(0.0, path.points[k].y() - touch.y()));
        if (!is_reachable(rod, p, cfg.tol_c)) {
            // The fingertip runs away from the rod; contact is lost.
            trace.termination = FlexTermination::FrictionSlip;
            break;
        }
        FlexStep step;
        step.path_index = k;
        step.pressure = path.pressure[k];
        step.tip = path.points[k];
        step.clamped = path.clamped[k];
        step.solution = have_prev ? continue_min_energy_shape(rod, trace.steps.back().solution, p, cfg)
                                  : solve_min_energy_shape(rod, p, cfg);
        if (!step.solution.converged) {
            trace.steps.push_back(std::move(step));
            trace.termination = FlexTermination::Unconverged;
            break;
        }
        step.friction = step.solution.friction;
        const bool slip = step.clamped
                              ? mu_available <= 0.0 && step.friction.mu > 0.0
                              : !step.friction.feasible || step.friction.mu > mu_available;
        trace.steps.push_back(std::move(step));
        if (slip) {
            trace.termination = FlexTermination::FrictionSlip;
            break;
        }
        trace.engaged = trace.steps.size();
        have_prev = true;
    }
    return trace;
}

Separation separation_point(const FlexTrace& trace, double ke_budget) {
    if (trace.engaged == 0) throw InvalidArgument("separation needs at least one engaged step");
    for (std::size_t k = 0; k < trace.engaged; ++k) {
        const double u = trace.steps[k].solution.energy;
        if (u >= ke_budget) return {k, u};
    }
    const std::size_t last = trace.engaged - 1;
    return {last, trace.steps[last].solution.energy};
}

FlipCheck flip_direction_check(const FlexTrace& trace, std::size_t sep, double angle_threshold) {
    if (sep >= trace.engaged) throw InvalidArgument("separation step is not an engaged step");
    const FlexStep& s = trace.steps[sep];
    if (!s.solution.converged) throw UnconvergedSolution("separation step did not converge");
    FlipCheck out;
    const Vec2 grad = s.solution.force;
    if (!(grad.norm() > 0.0)) return out;

    // Reverse of the local path tangent: back toward the previous distinct
    // tip position, or away from the next one at the start of the trace.
    Vec2 recoil = Vec2::Zero();
    for (std::size_t k = sep; k-- > 0;) {
        recoil = trace.steps[k].tip - s.tip;
        if (recoil.norm() > 0.0) break;
    }
    if (!(recoil.norm() > 0.0)) {
        for (std::size_t k = sep + 1; k < trace.steps.size(); ++k) {
            recoil = s.tip - trace.steps[k].tip;
            if (recoil.norm() > 0.0) break;
        }
    }
    if (!(recoil.norm() > 0.0)) return out;

    const double c = std::clamp(recoil.normalized().dot(-grad.normalized()), -1.0, 1.0);
    out.angle = rad2deg(std::acos(c));
    out.passed = out.angle >= angle_threshold;
    return out;
}

std::vector<Vec2> pocket_polygon(const FingerSpec& finger, double kappa, const Pose2& base, int samples) {
    return finger_arc(finger, kappa, base, samples);
}

bool pocket_contains(const std::vector<Vec2>& polygon, const Vec2& point, double margin) {
    const std::size_t n = polygon.size();
    if (n == 0) return false;
    bool inside = false;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[j];
        if ((a.y() > point.y()) != (b.y() > point.y())) {
            const double x = a.x() + (point.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (point.x() < x) inside = !inside;
        }
        nearest = std::min(nearest, segment_distance(point, a, b));
    }
    return inside || nearest <= margin;
}

AttemptOutcome classify_attempt(const AttemptSetup& setup, const HandConfig& cfg) {
    const FingertipPath path =
        nominal_tip_path(setup.finger, cfg, setup.ramp, setup.geometry, setup.rod.length);
    const FlexTrace trace =
        simulate_flex_phase(setup.rod, path, setup.mu_available, setup.solver, setup.thresholds);

    AttemptOutcome out;
    for (std::size_t k = 0; k < trace.engaged; ++k) {
        const double mu = trace.steps[k].friction.mu;
        out.mu_min_max = std::isnan(out.mu_min_max) ? mu : std::max(out.mu_min_max, mu);
    }
    if (trace.engaged == 0) {
        out.label = outcome_of(trace.termination);
        if (out.label == Outcome::Success) out.label = Outcome::Unconverged;
        return out;
    }

    const Separation sep = separation_point(trace, setup.thresholds.ke_budget);
    out.energy_at_separation = sep.energy;
    // A failure after the finger has already stopped does not matter.
    if (trace.termination != FlexTermination::RampEnd && sep.energy < setup.thresholds.ke_budget) {
        out.label = outcome_of(trace.termination);
        return out;
    }

    const FlipCheck flip = flip_direction_check(trace, sep.step, setup.thresholds.flip_angle);
    out.flip_angle = flip.angle;
    if (!(sep.energy > 0.0) || !flip.passed) {
        out.label = Outcome::PocketMiss;
        return out;
    }

    const FlexStep& s = trace.steps[sep.step];
    const HandPoses poses = hand_to_base_poses(cfg, setup.geometry, setup.rod.length);
    const auto polygon = pocket_polygon(setup.finger, path.curvature[s.path_index], poses.finger2);
    const double delta = trace.contact_offset + cfg.delta;
    const Vec2 object_tip = s.tip + delta * s.solution.shape.end_tangent();
    out.label = pocket_contains(polygon, object_tip, setup.thresholds.pocket_margin) ? Outcome::Success
                                                                                       : Outcome::PocketMiss;
    return out;
}

}  // namespace flexflip
