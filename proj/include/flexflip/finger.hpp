#pragma once

#include "flexflip/elastica.hpp"

#include <utility>
#include <vector>

namespace flexflip {

/// Constant-curvature soft finger with kappa(P) = a P + b.
struct FingerSpec {
    double arc_length = 90.0;      // L_f, mm
    double pressure_gain = 0.1;    // a, 1/(mm MPa)
    double curvature_offset = 0.0; // b, 1/mm
    double max_pressure = 0.3;     // MPa

    void validate() const;
};

/// Planar base pose of a finger. `curl` is +1 when the finger bends to the
/// left of its heading (counterclockwise), -1 for clockwise.
struct Pose2 {
    Vec2 origin = Vec2::Zero();
    double heading = 0.0;  // rad
    int curl = 1;

    Vec2 tangent() const;
    /// Unit normal on the curl side.
    Vec2 curl_normal() const;
};

/// Hand placement. (x, z) locate the wrist point relative to the object tip:
/// x to the left of the tip, z above the table. theta rotates the hand
/// counterclockwise about the wrist.
struct HandConfig {
    double x = 60.0;       // mm
    double z = 125.0;      // mm
    double theta = 0.0;    // deg
    double delta = 0.0;    // mm, extra object-tip offset beyond the contact geometry
    double inter_finger_angle = 90.0;  // deg

    void validate() const;
};

/// Wrist-to-finger-base layout. At theta = 0 the palm faces the table and the
/// two bases sit at wrist + (+-spacing/2, -palm_offset).
struct HandGeometry {
    double palm_offset = 54.0;   // mm
    double base_spacing = 30.0;  // mm

    void validate() const;
};

struct HandPoses {
    Vec2 wrist = Vec2::Zero();
    Pose2 finger1;  // left finger, pins contact #1
    Pose2 finger2;  // right finger, flexes the object
};

struct PressureRamp {
    std::vector<double> samples;  // MPa, nondecreasing

    static PressureRamp linear(double start, double end, int count);
    void validate(const FingerSpec& finger) const;
};

struct FingertipPath {
    std::vector<double> pressure;   // MPa
    std::vector<double> curvature;  // 1/mm
    std::vector<Vec2> points;       // object frame, mm
    std::vector<bool> clamped;      // tabletop projection was active

    std::size_t size() const { return points.size(); }
};

/// a P + b. Throws InvalidArgument outside [0, max_pressure].
double curvature_from_pressure(const FingerSpec& finger, double pressure);

/// Tip of a uniform arc of length L_f and curvature kappa starting at `base`.
/// In the base frame the tip is (sin(kL)/k, (1 - cos(kL))/k) with the second
/// coordinate measured toward the curl side.
Vec2 fingertip_position(const FingerSpec& finger, double kappa, const Pose2& base);

/// `samples` + 1 evenly spaced points along the arc, base first.
std::vector<Vec2> finger_arc(const FingerSpec& finger, double kappa, const Pose2& base, int samples = 64);

/// Finger base poses in the object frame (origin at contact #1, object tip at
/// (object_length, 0)). Finger #2 points down-right and curls clockwise
/// toward the palm; finger #1 mirrors it.
HandPoses hand_to_base_poses(const HandConfig& cfg, const HandGeometry& geometry, double object_length);

/// Finger #2 tip along the ramp; points below the table are projected to
/// z = 0 and flagged.
FingertipPath nominal_tip_path(const FingerSpec& finger, const HandConfig& cfg, const PressureRamp& ramp,
                               const HandGeometry& geometry, double object_length);

double deg2rad(double deg);
double rad2deg(double rad);

}  // namespace flexflip
