#include "flexflip/finger.hpp"

#include "flexflip/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <string>

namespace flexflip {

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

void FingerSpec::validate() const {
    if (!(arc_length > 0.0) || !std::isfinite(arc_length))
        throw InvalidArgument("finger arc length must be positive");
    if (!(max_pressure > 0.0) || !std::isfinite(max_pressure))
        throw InvalidArgument("finger max pressure must be positive");
    if (!std::isfinite(pressure_gain) || !std::isfinite(curvature_offset))
        throw InvalidArgument("finger calibration must be finite");
    // Affine in P, so checking both ends covers the interval.
    if (curvature_offset < 0.0 || pressure_gain * max_pressure + curvature_offset < 0.0)
        throw InvalidArgument("finger curvature must stay nonnegative over [0, max_pressure]");
}

void HandConfig::validate() const {
    if (!std::isfinite(x) || !std::isfinite(z) || !std::isfinite(theta))
        throw InvalidArgument("hand configuration must be finite");
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    if (!(inter_finger_angle > 0.0 && inter_finger_angle < 180.0))
        throw InvalidArgument("inter-finger angle must lie in (0, 180) degrees");
}

void HandGeometry::validate() const {
    if (!std::isfinite(palm_offset) || !std::isfinite(base_spacing) || base_spacing < 0.0)
        throw InvalidArgument("hand geometry must be finite with nonnegative base spacing");
}

Vec2 Pose2::tangent() const { return {std::cos(heading), std::sin(heading)}; }

Vec2 Pose2::curl_normal() const {
    const Vec2 t = tangent();
    return curl * Vec2(-t.y(), t.x());
}

PressureRamp PressureRamp::linear(double start, double end, int count) {
    if (count < 2) throw InvalidArgument("pressure ramp needs at least 2 samples");
    PressureRamp r;
    r.samples.resize(count);
    for (int i = 0; i < count; ++i) r.samples[i] = start + (end - start) * i / (count - 1);
    r.samples.back() = end;
    return r;
}

void PressureRamp::validate(const FingerSpec& finger) const {
    if (samples.size() < 2) throw InvalidArgument("pressure ramp needs at least 2 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double p = samples[i];
        if (!(p >= 0.0 && p <= finger.max_pressure))
            throw InvalidArgument("ramp pressure " + std::to_string(p) + " MPa outside [0, " +
                                  std::to_string(finger.max_pressure) + "]");
        if (i > 0 && p < samples[i - 1]) throw InvalidArgument("pressure ramp must be nondecreasing");
    }
}

double curvature_from_pressure(const FingerSpec& finger, double pressure) {
    if (!(pressure >= 0.0 && pressure <= finger.max_pressure))
        throw InvalidArgument("pressure " + std::to_string(pressure) + " MPa outside [0, " +
                              std::to_string(finger.max_pressure) + "]");
    return finger.pressure_gain * pressure + finger.curvature_offset;
}

namespace {

/// Arc point at arc length s in the base frame (x along the base tangent,
/// y toward the curl side).
Vec2 arc_local(double kappa, double s) {
    const double u = kappa * s;
    if (std::abs(u) < 1e-6) {
        const double u2 = u * u;
        return {s * (1.0 - u2 / 6.0), s * (u / 2.0 - u * u2 / 24.0)};
    }
    return {std::sin(u) / kappa, (1.0 - std::cos(u)) / kappa};
}

Vec2 to_world(const Pose2& base, const Vec2& local) {
    return base.origin + local.x() * base.tangent() + local.y() * base.curl_normal();
}

}  // namespace

Vec2 fingertip_position(const FingerSpec& finger, double kappa, const Pose2& base) {
    return to_world(base, arc_local(kappa, finger.arc_length));
}

std::vector<Vec2> finger_arc(const FingerSpec& finger, double kappa, const Pose2& base, int samples) {
    if (samples < 1) throw InvalidArgument("finger arc needs at least one segment");
    std::vector<Vec2> out;
    out.reserve(samples + 1);
    for (int k = 0; k <= samples; ++k) {
        const double s = finger.arc_length * k / samples;
        out.push_back(to_world(base, arc_local(kappa, s)));
    }
    return out;
}

HandPoses hand_to_base_poses(const HandConfig& cfg, const HandGeometry& geometry, double object_length) {
    cfg.validate();
    geometry.validate();
    HandPoses poses;
    poses.wrist = Vec2(object_length - cfg.x, cfg.z);
    const double th = deg2rad(cfg.theta);
    const Eigen::Rotation2Dd rot(th);
    const double half_mount = 0.5 * deg2rad(cfg.inter_finger_angle);
    const double down = -0.5 * std::numbers::pi;

    poses.finger2.origin = poses.wrist + rot * Vec2(0.5 * geometry.base_spacing, -geometry.palm_offset);
    poses.finger2.heading = down + half_mount + th;
    poses.finger2.curl = -1;

    poses.finger1.origin = poses.wrist + rot * Vec2(-0.5 * geometry.base_spacing, -geometry.palm_offset);
    poses.finger1.heading = down - half_mount + th;
    poses.finger1.curl = 1;
    return poses;
}

FingertipPath nominal_tip_path(const FingerSpec& finger, const HandConfig& cfg, const PressureRamp& ramp,
                               const HandGeometry& geometry, double object_length) {
    finger.validate();
    ramp.validate(finger);
    const HandPoses poses = hand_to_base_poses(cfg, geometry, object_length);
    FingertipPath path;
    const std::size_t n = ramp.samples.size();
    path.pressure = ramp.samples;
    path.curvature.resize(n);
    path.points.resize(n);
    path.clamped.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double kappa = curvature_from_pressure(finger, ramp.samples[k]);
        Vec2 tip = fingertip_position(finger, kappa, poses.finger2);
        path.curvature[k] = kappa;
        path.clamped[k] = tip.y() < 0.0;
        if (path.clamped[k]) tip.y() = 0.0;
        path.points[k] = tip;
    }
    return path;
}

}  // namespace flexflip
