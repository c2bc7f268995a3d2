#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vkin/errors.hpp"
#include "vkin/geometry.hpp"
#include "vkin/steering.hpp"
#include "vkin/trajectory.hpp"
#include "vkin/vec2.hpp"

// Generative counterpart of the analytic model: given steering wheel angle
// and longitudinal speed over time, the trajectory follows from
//
//     dT/dt  = kappa * v_lon * N,      dxi/dt = v_lon * T,
//
// with kappa = tan(delta(l, 0)) / l and delta(l, 0) the inverse steering map
// applied to delta_SWA.  The tangent must keep unit length, which a fixed
// renormalization after every integration step enforces.

namespace vkin {

/// One control sample: steering wheel angle [deg] and signed speed [m/s].
struct ControlPoint {
    double t = 0.0;
    double delta_swa = 0.0;  ///< [deg]
    double v_lon = 0.0;      ///< [m/s], negative while reversing
};

enum class ControlInterp {
    Linear,  ///< piecewise-linear between samples (smooth physical signals)
    Hold,    ///< zero-order hold (stepwise replayed commands)
};

/// Time series of control inputs for forward integration.
struct ControlProfile {
    std::vector<ControlPoint> points;
    ControlInterp interp = ControlInterp::Linear;

    void validate() const {
        if (points.size() < 2) throw TooFewSamples("controls: need at least 2 samples");
        for (std::size_t i = 0; i < points.size(); ++i) {
            const ControlPoint& p = points[i];
            if (!std::isfinite(p.t) || !std::isfinite(p.delta_swa) || !std::isfinite(p.v_lon))
                throw std::invalid_argument("controls: non-finite value in row " + std::to_string(i));
            if (i > 0 && !(p.t > points[i - 1].t))
                throw NonMonotoneTime("controls: timestamps not strictly increasing at row " +
                                      std::to_string(i));
        }
    }

    double t_start() const { return points.front().t; }
    double t_end() const { return points.back().t; }

    /// Interpolated controls at time t (clamped to the profile range).
    ControlPoint at(double t) const {
        if (t <= points.front().t) return points.front();
        if (t >= points.back().t) return points.back();
        const auto it = std::upper_bound(points.begin(), points.end(), t,
                                         [](double v, const ControlPoint& p) { return v < p.t; });
        const ControlPoint& hi = *it;
        const ControlPoint& lo = *(it - 1);
        if (interp == ControlInterp::Hold) return {t, lo.delta_swa, lo.v_lon};
        const double w = (t - lo.t) / (hi.t - lo.t);
        return {t, lo.delta_swa + w * (hi.delta_swa - lo.delta_swa),
                lo.v_lon + w * (hi.v_lon - lo.v_lon)};
    }
};

/// Integration state: rear-axle position and the unit front tangent.
struct PoseState {
    Vec2 position;
    Vec2 tangent{1.0, 0.0};
};

namespace detail {

/// kappa = tan(f(delta_SWA)) / l.  The steering map is inverted through the
/// calibrated polynomial; commands outside its image, or wheel angles at or
/// beyond +-pi/2, have no defined curvature.
inline double curvature_from_swa(const ControlPoint& c, const VehicleGeometry& geometry) {
    double delta;
    try {
        delta = invert_steering(geometry.steering, c.delta_swa);
    } catch (const OutOfRange& e) {
        throw SteeringOutOfRange(std::string("integrate: ") + e.what());
    }
    if (!(std::abs(delta) < std::numbers::pi / 2.0))
        throw SteeringOutOfRange("integrate: wheel angle " + std::to_string(delta) +
                                 " rad outside (-pi/2, pi/2)");
    return std::tan(delta) / geometry.wheelbase;
}

struct OdeState {
    Vec2 xi;
    Vec2 T;
};

inline OdeState ode_rhs(const OdeState& s, double kappa, double v) {
    return {v * s.T, kappa * v * rot90(s.T)};
}

/// One classical RK4 step over [t, t+h] followed by tangent renormalization.
template <typename Controls>
inline OdeState rk4_step(const OdeState& s, double t, double h, Controls&& controls) {
    const auto [k0, v0] = controls(t);
    const auto [k1, v1] = controls(t + 0.5 * h);
    const auto [k2, v2] = controls(t + h);

    const OdeState f1 = ode_rhs(s, k0, v0);
    const OdeState f2 = ode_rhs({s.xi + 0.5 * h * f1.xi, s.T + 0.5 * h * f1.T}, k1, v1);
    const OdeState f3 = ode_rhs({s.xi + 0.5 * h * f2.xi, s.T + 0.5 * h * f2.T}, k1, v1);
    const OdeState f4 = ode_rhs({s.xi + h * f3.xi, s.T + h * f3.T}, k2, v2);

    OdeState out;
    out.xi = s.xi + (h / 6.0) * (f1.xi + 2.0 * f2.xi + 2.0 * f3.xi + f4.xi);
    out.T = s.T + (h / 6.0) * (f1.T + 2.0 * f2.T + 2.0 * f3.T + f4.T);
    out.T = normalized(out.T);
    return out;
}

}  // namespace detail

/// Integrates the control profile from `init` with classical fixed-step RK4,
/// renormalizing the tangent after every step.  Substeps run at `step`; the
/// returned track holds positions at the control timestamps, with reverse
/// flags set wherever the commanded speed is negative.
inline SampledTrack integrate(const ControlProfile& controls, const VehicleGeometry& geometry,
                              const PoseState& init, double step) {
    controls.validate();
    if (!(step > 0.0)) throw NonPositiveStep("integrate: step must be > 0, got " + std::to_string(step));
    if (!(geometry.wheelbase > 0.0)) throw std::invalid_argument("integrate: wheelbase must be > 0");

    auto eval_controls = [&](double t) {
        const ControlPoint c = controls.at(t);
        return std::pair<double, double>(detail::curvature_from_swa(c, geometry), c.v_lon);
    };

    detail::OdeState state{init.position, normalized(init.tangent)};
    SampledTrack out;
    out.reverse.assign(controls.points.size(), 0);

    double t = controls.t_start();
    out.append(t, state.xi.x, state.xi.y);
    out.reverse[0] = controls.points.front().v_lon < 0.0;

    for (std::size_t i = 1; i < controls.points.size(); ++i) {
        const double t_goal = controls.points[i].t;
        while (t < t_goal) {
            const double h = std::min(step, t_goal - t);
            state = detail::rk4_step(state, t, h, eval_controls);
            t += h;
        }
        t = t_goal;  // guard against accumulated rounding
        out.append(t, state.xi.x, state.xi.y);
        out.reverse[i] = controls.points[i].v_lon < 0.0;
    }
    if (std::none_of(out.reverse.begin(), out.reverse.end(), [](std::uint8_t r) { return r != 0; }))
        out.reverse.clear();
    return out;
}

/// Closed-loop consistency measure of the model pair: extracts controls from
/// a fitted trajectory, re-integrates them from the initial pose and returns
/// the Euclidean distance between the integrated and the fitted end point.
inline double roundtrip_check(const SmoothTrajectory& traj, const VehicleGeometry& geometry,
                              double step, std::span<const double> sample_times = {}) {
    std::vector<double> times;
    if (sample_times.empty()) {
        times.assign(traj.knots().begin(), traj.knots().end());
    } else {
        times.assign(sample_times.begin(), sample_times.end());
    }

    const KinematicProfile profile = extract_profile(traj, geometry, times);
    ControlProfile controls;
    controls.points.reserve(profile.size());
    for (const KinematicSample& s : profile) controls.points.push_back({s.t, s.delta_swa, s.v_lon});

    PoseState init;
    init.position = traj.derivatives(times.front()).position;
    init.tangent = traj.tangent_at(times.front()).T;

    const SampledTrack replay = integrate(controls, geometry, init, step);
    const Vec2 end_true = traj.derivatives(times.back()).position;
    const Vec2 end_replay{replay.x.back(), replay.y.back()};
    return norm(end_replay - end_true);
}

}  // namespace vkin
