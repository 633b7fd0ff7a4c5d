#pragma once

#include "flexflip/elastica.hpp"
#include "flexflip/finger.hpp"

#include <limits>
#include <string>
#include <vector>

namespace flexflip {

enum class FlexTermination { RampEnd, FrictionSlip, NoInteraction, StuckOnGround, Unconverged };

enum class Outcome { Success, NoInteraction, StuckOnGround, PocketMiss, FrictionSlip, Unconverged };

std::string to_string(FlexTermination t);
std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct GraspThresholds {
    double engage_tolerance = 2.0;  // mm, fingertip height that counts as touching the rod
    double dwell_fraction = 0.1;    // clamped share of the ramp tolerated before engaging
    double flip_angle = 15.0;       // deg
    double pocket_margin = 5.0;     // mm, finger half-thickness around the pocket outline
    /// Flexural energy (N mm) at which the finger's kinetic energy is spent.
    /// Infinity separates at the ramp end.
    double ke_budget = std::numeric_limits<double>::infinity();

    void validate() const;
};

struct FlexStep {
    std::size_t path_index = 0;
    double pressure = 0.0;
    Vec2 tip = Vec2::Zero();       // fingertip, object frame
    bool clamped = false;
    ContactSolution solution;      // contact #2 pinned at the displaced endpoint
    FrictionBound friction;
};

struct FlexTrace {
    std::vector<FlexStep> steps;
    /// Leading steps with a converged, sustained contact. A failing step, if
    /// any, is kept after them.
    std::size_t engaged = 0;
    FlexTermination termination = FlexTermination::NoInteraction;
    /// Distance from the first touch point back to the object tip.
    double contact_offset = 0.0;
};

/// Quasistatic flex phase. The rod tip is engaged at the first path point at
/// most `engage_tolerance` above the table with 0 <= x <= L + tolerance;
/// afterwards contact #2 follows the fingertip displacement from that point.
/// Unclamped steps slip when mu_min exceeds `mu_available` or the contact is
/// infeasible; clamped steps pinch the rod against the table and slip only
/// when mu_available is 0 and the rod needs a tangential force.
FlexTrace simulate_flex_phase(const RodSpec& rod, const FingertipPath& path, double mu_available,
                              const SolverConfig& cfg = {}, const GraspThresholds& th = {});

struct Separation {
    std::size_t step = 0;
    double energy = 0.0;
};

/// Earliest engaged step whose flexural energy reaches `ke_budget`, else the
/// last engaged step. Throws InvalidArgument without engaged steps.
Separation separation_point(const FlexTrace& trace, double ke_budget);

struct FlipCheck {
    double angle = std::numeric_limits<double>::quiet_NaN();  // deg
    bool passed = false;
};

/// Angle between the fingertip recoil (reverse path tangent at `sep`) and
/// -dU*/dp at the separation endpoint. A zero gradient fails.
FlipCheck flip_direction_check(const FlexTrace& trace, std::size_t sep, double angle_threshold);

/// Closed outline of finger #2's pocket: the arc from base to tip, closed by
/// the chord back to the base.
std::vector<Vec2> pocket_polygon(const FingerSpec& finger, double kappa, const Pose2& base, int samples = 64);

/// Inside the polygon or within `margin` of its outline.
bool pocket_contains(const std::vector<Vec2>& polygon, const Vec2& point, double margin);

struct AttemptOutcome {
    Outcome label = Outcome::NoInteraction;
    double energy_at_separation = std::numeric_limits<double>::quiet_NaN();
    double flip_angle = std::numeric_limits<double>::quiet_NaN();
    double mu_min_max = std::numeric_limits<double>::quiet_NaN();
};

struct AttemptSetup {
    RodSpec rod;
    FingerSpec finger;
    HandGeometry geometry;
    PressureRamp ramp;
    double mu_available = 0.6;
    GraspThresholds thresholds;
    SolverConfig solver;
};

AttemptOutcome classify_attempt(const AttemptSetup& setup, const HandConfig& cfg);

}  // namespace flexflip
