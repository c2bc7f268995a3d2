#pragma once

#include <cmath>

namespace vkin {

/// Plain 2-D vector used for positions, velocities and directions.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
constexpr Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
constexpr Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// 2-D cross product det[a, b] = a_x b_y - a_y b_x.
constexpr double det(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

constexpr double squared_norm(Vec2 v) { return v.x * v.x + v.y * v.y; }

inline Vec2 normalized(Vec2 v) { return v / norm(v); }

/// Rotation by +90 degrees (counterclockwise).
constexpr Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

/// Counterclockwise rotation by an arbitrary angle in radians.
inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unsigned angle between two nonzero vectors, in [0, pi].
inline double angle_between(Vec2 a, Vec2 b) {
    return std::atan2(std::abs(det(a, b)), dot(a, b));
}

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

}  // namespace vkin
