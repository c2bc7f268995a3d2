#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "vkin/errors.hpp"
#include "vkin/vec2.hpp"

// Closed-form kinematics of a rigid vehicle whose unsteered rear axle follows
// a twice-differentiable planar trajectory.  Every function here is a pure
// map from the local derivatives (position, velocity, acceleration, reverse
// flag) to a physical quantity; no state, no smoothing, no data policy.
//
// Conventions:
//   - The tangent T always points toward the vehicle front; while reversing
//     the velocity is anti-parallel to T, which the reverse flag encodes.
//   - N is T rotated by +90 degrees, so curvature is positive in left turns.
//   - Lateral wheel offsets d_lat are positive to the RIGHT of the driving
//     direction (along -N); with that sign the inner wheel of a turn steers
//     more sharply than the outer one, as Ackermann geometry requires.

namespace vkin {

/// Speeds below this are treated as "vehicle at rest": the tangent direction
/// is not computable from the velocity alone and callers must use the stop
/// fill rule instead.
inline constexpr double kZeroVelocityEps = 1e-9;

/// Threshold on |1 + kappa * d_lat| below which a wheel sits on the
/// instantaneous center of rotation and its steering angle is undefined.
inline constexpr double kRotationCenterEps = 1e-12;

/// Local state of the trajectory at one time instant.
struct Pose2Derivs {
    Vec2 position;       ///< [m]
    Vec2 velocity;       ///< [m/s]
    Vec2 acceleration;   ///< [m/s^2]
    bool reverse = false;///< true while driving in reverse gear
};

/// Orthonormal frame attached to the trajectory: T toward the vehicle front,
/// N = rot90(T) toward the left.
struct TangentFrame {
    Vec2 T;
    Vec2 N;
};

/// Mounting point of one wheel relative to the rear-axle center.
struct WheelMount {
    double d_lon = 0.0;        ///< longitudinal offset, positive toward the front [m]
    double d_lat = 0.0;        ///< lateral offset, positive to the right [m]
    double tire_radius = 0.3;  ///< [m], must be > 0
};

/// Longitudinal and lateral acceleration in the vehicle frame.
struct BodyAccel {
    double a_lon = 0.0;  ///< [m/s^2], signed along T
    double a_lat = 0.0;  ///< [m/s^2], signed along N
};

inline double reverse_sign(const Pose2Derivs& p) { return p.reverse ? -1.0 : 1.0; }

namespace detail {
inline void require_moving(const Pose2Derivs& p, const char* who) {
    if (norm(p.velocity) < kZeroVelocityEps)
        throw ZeroVelocity(std::string(who) + ": speed below " +
                           std::to_string(kZeroVelocityEps) + " m/s");
}
}  // namespace detail

/// T = (-1)^R * v/|v| and N = rot90(T).  Throws ZeroVelocity at rest; stop
/// intervals are handled by the trajectory layer's fill rule, not here.
inline TangentFrame tangent_frame(const Pose2Derivs& p) {
    detail::require_moving(p, "tangent_frame");
    const Vec2 t = reverse_sign(p) * normalized(p.velocity);
    return {t, rot90(t)};
}

/// Signed speed along T: (-1)^R * |v|.  Zero at rest, negative in reverse.
inline double longitudinal_speed(const Pose2Derivs& p) {
    return reverse_sign(p) * norm(p.velocity);
}

/// a_lon = (-1)^R * (v . a)/|v|,  a_lat = (-1)^R * det[v, a]/|v|.
inline BodyAccel accelerations(const Pose2Derivs& p) {
    detail::require_moving(p, "accelerations");
    const double speed = norm(p.velocity);
    const double sign = reverse_sign(p);
    return {sign * dot(p.velocity, p.acceleration) / speed,
            sign * det(p.velocity, p.acceleration) / speed};
}

/// Signed curvature kappa = (-1)^R * det[v, a]/|v|^3, positive for left turns.
inline double curvature(const Pose2Derivs& p) {
    detail::require_moving(p, "curvature");
    const double speed = norm(p.velocity);
    return reverse_sign(p) * det(p.velocity, p.acceleration) / (speed * speed * speed);
}

/// Steering angle that aligns a wheel at `mount` with its own motion:
/// delta = atan2(kappa*d_lon, 1 + kappa*d_lat).  This is the singularity-free
/// form of atan(d_lon/(R + d_lat)) with R = 1/kappa; kappa = 0 is a regular
/// point yielding delta = 0.
inline double wheel_steer_angle(double kappa, const WheelMount& mount) {
    const double denom = 1.0 + kappa * mount.d_lat;
    if (std::abs(denom) < kRotationCenterEps)
        throw WheelAtRotationCenter("wheel_steer_angle: wheel at instantaneous center, kappa=" +
                                    std::to_string(kappa));
    return std::atan2(kappa * mount.d_lon, denom);
}

/// Ground speed of a wheel at `mount`:
/// v = |xdot| * sqrt((kappa*d_lon)^2 + (1 + kappa*d_lat)^2), continuous at
/// kappa = 0 where every wheel moves at body speed.
inline double wheel_speed(double body_speed, double kappa, const WheelMount& mount) {
    return body_speed * std::hypot(kappa * mount.d_lon, 1.0 + kappa * mount.d_lat);
}

inline double wheel_speed(const Pose2Derivs& p, double kappa, const WheelMount& mount) {
    return wheel_speed(norm(p.velocity), kappa, mount);
}

/// Rotation rate of a wheel of radius `tire_radius` rolling without slip.
inline double wheel_angular_rate(double v_wheel, const WheelMount& mount) {
    return v_wheel / mount.tire_radius;
}

namespace detail {
/// atan2-based angle of `dir` against `north`, mapped into (-pi, pi].
inline double direction_angle(Vec2 north, Vec2 dir) {
    double psi = std::atan2(det(north, dir), dot(north, dir));
    if (psi <= -std::numbers::pi) psi = std::numbers::pi;
    return psi;
}
}  // namespace detail

/// Heading of the *motion* relative to `north`, psi in (-pi, pi]:
/// psi = atan2(det[n, v], n . v).  While reversing this points along the
/// motion, i.e. opposite the vehicle front; see front_heading for the latter.
inline double heading(const Pose2Derivs& p, Vec2 north) {
    detail::require_moving(p, "heading");
    return detail::direction_angle(north, p.velocity);
}

/// Heading of the vehicle *front* (the tangent T) relative to `north`.
/// Coincides with heading() in forward gear, differs by pi while reversing.
inline double front_heading(const Pose2Derivs& p, Vec2 north) {
    return detail::direction_angle(north, tangent_frame(p).T);
}

/// Yaw rate psidot = (-1)^R * det[v, a]/|v|^2 = kappa * |v|.
inline double yaw_rate(const Pose2Derivs& p) {
    detail::require_moving(p, "yaw_rate");
    const double speed = norm(p.velocity);
    return reverse_sign(p) * det(p.velocity, p.acceleration) / (speed * speed);
}

}  // namespace vkin
