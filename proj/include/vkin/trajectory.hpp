#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vkin/core_model.hpp"
#include "vkin/errors.hpp"
#include "vkin/geometry.hpp"
#include "vkin/spline.hpp"
#include "vkin/vec2.hpp"

// Turns discretely sampled planar tracks into twice continuously
// differentiable trajectories with analytic derivatives, detects intervals
// where the vehicle stands still, assigns the reverse-gear function and fills
// the tangent across stops so that the vehicle front direction stays
// continuous even through driving-direction reversals (cusps of the path).

namespace vkin {

/// Raw time-stamped 2-D position samples, optionally annotated with a
/// per-sample quality flag (1 = usable) and a reverse-gear flag.
struct SampledTrack {
    std::vector<double> time;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::uint8_t> quality;  // empty or one flag per sample
    std::vector<std::uint8_t> reverse;  // empty or one flag per sample

    std::size_t size() const { return time.size(); }
    bool has_quality() const { return !quality.empty(); }
    bool has_reverse() const { return !reverse.empty(); }

    void append(double t, double px, double py) {
        time.push_back(t);
        x.push_back(px);
        y.push_back(py);
    }

    /// Checks the track invariants; throws TooFewSamples / NonMonotoneTime /
    /// std::invalid_argument.
    void validate(std::size_t min_samples = 4) const {
        if (size() < min_samples)
            throw TooFewSamples("track: need at least " + std::to_string(min_samples) +
                                " samples, got " + std::to_string(size()));
        if (x.size() != size() || y.size() != size() ||
            (has_quality() && quality.size() != size()) ||
            (has_reverse() && reverse.size() != size()))
            throw std::invalid_argument("track: column lengths differ");
        for (std::size_t i = 0; i < size(); ++i) {
            if (!std::isfinite(time[i]) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
                throw std::invalid_argument("track: non-finite value in row " + std::to_string(i));
            if (i > 0 && !(time[i] > time[i - 1]))
                throw NonMonotoneTime("track: timestamps not strictly increasing at row " +
                                      std::to_string(i) + " (t=" + std::to_string(time[i]) + ")");
        }
    }
};

/// Maximal interval where the speed stays below the stop threshold.  When the
/// one-sided tangent limits around the interval agree (after reverse-gear
/// correction) the interval carries the shared fill tangent; otherwise the
/// trajectory changes direction without changing position and the tangent is
/// undefined there.
struct StopInterval {
    double t_begin = 0.0;
    double t_end = 0.0;
    bool resolvable = false;
    Vec2 fill_tangent;            ///< unit vector, valid when resolvable
    bool has_before_limit = false;///< false when the interval touches the data start
    bool has_after_limit = false; ///< false when the interval touches the data end
};

/// Fit knobs.  v_eps and theta_fill sit above GPS-noise-induced phantom
/// motion at rest and well below any actual maneuvering dynamics.
struct FitOptions {
    double lambda = 0.0;       ///< roughness penalty; 0 interpolates exactly
    double v_eps = 0.05;       ///< stop threshold [m/s]
    double theta_fill = 5.0 * std::numbers::pi / 180.0;  ///< tangent agreement tolerance [rad]
};

class SmoothTrajectory;
SmoothTrajectory fit_c2(const SampledTrack& track, const FitOptions& options);

/// Piecewise-cubic C^2 trajectory per coordinate plus the stop structure and
/// the reverse-gear step function.  Immutable after construction; evaluation
/// is safe from any number of threads.
class SmoothTrajectory {
public:
    struct ReverseSpan {
        double t_begin;
        double t_end;
        bool reverse;
    };

    double t_start() const { return x_.t_start(); }
    double t_end() const { return x_.t_end(); }
    std::span<const double> knots() const { return x_.knots(); }
    const CubicSpline& spline_x() const { return x_; }
    const CubicSpline& spline_y() const { return y_; }
    const FitOptions& options() const { return options_; }
    const std::vector<StopInterval>& stops() const { return stops_; }
    const std::vector<ReverseSpan>& reverse_spans() const { return reverse_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Position, velocity and acceleration at t (closed domain), with the
    /// reverse flag taken from the inferred/explicit step function R(t).
    Pose2Derivs derivatives(double t) const {
        require_in_domain(t);
        Pose2Derivs p;
        x_.eval(t, &p.position.x, &p.velocity.x, &p.acceleration.x);
        y_.eval(t, &p.position.y, &p.velocity.y, &p.acceleration.y);
        p.reverse = reverse_at(t);
        return p;
    }

    bool reverse_at(double t) const {
        require_in_domain(t);
        for (std::size_t i = 1; i < reverse_.size(); ++i)
            if (t < reverse_[i].t_begin) return reverse_[i - 1].reverse;
        return reverse_.back().reverse;
    }

    /// The stop interval containing t, if any.
    const StopInterval* stop_at(double t) const {
        for (const StopInterval& s : stops_)
            if (t >= s.t_begin && t <= s.t_end) return &s;
        return nullptr;
    }

    /// Tangent frame at t, using the fill tangent inside stop intervals.
    /// Throws UnresolvableInterval inside a stop whose tangent is undefined.
    TangentFrame tangent_at(double t) const {
        if (const StopInterval* s = stop_at(t)) {
            if (!s->resolvable)
                throw UnresolvableInterval("tangent undefined in stop interval [" +
                                           std::to_string(s->t_begin) + ", " +
                                           std::to_string(s->t_end) + "] s");
            return {s->fill_tangent, rot90(s->fill_tangent)};
        }
        return tangent_frame(derivatives(t));
    }

private:
    friend SmoothTrajectory fit_c2(const SampledTrack& track, const FitOptions& options);

    void require_in_domain(double t) const {
        if (!(t >= t_start() && t <= t_end()))
            throw OutOfDomain("t=" + std::to_string(t) + " outside trajectory domain [" +
                              std::to_string(t_start()) + ", " + std::to_string(t_end()) + "]");
    }

    CubicSpline x_;
    CubicSpline y_;
    FitOptions options_;
    std::vector<StopInterval> stops_;
    std::vector<ReverseSpan> reverse_;
    std::vector<std::string> warnings_;
};

namespace detail {

inline double speed_at(const CubicSpline& x, const CubicSpline& y, double t) {
    double vx, vy;
    x.eval(t, nullptr, &vx, nullptr);
    y.eval(t, nullptr, &vy, nullptr);
    return std::hypot(vx, vy);
}

inline Vec2 velocity_direction(const CubicSpline& x, const CubicSpline& y, double t) {
    double vx, vy;
    x.eval(t, nullptr, &vx, nullptr);
    y.eval(t, nullptr, &vy, nullptr);
    return normalized(Vec2{vx, vy});
}

/// Raw stop spans of the fitted curve with the one-sided motion directions
/// at the span edges, before any reverse-gear interpretation.
struct RawStop {
    double t_begin;
    double t_end;
    std::optional<Vec2> dir_before;  // unit velocity direction just before
    std::optional<Vec2> dir_after;   // unit velocity direction just after
};

inline std::vector<RawStop> detect_raw_stops(const CubicSpline& x, const CubicSpline& y,
                                             double v_eps) {
    constexpr int kSubdiv = 8;
    std::span<const double> knots = x.knots();
    std::vector<double> grid;
    grid.reserve((knots.size() - 1) * kSubdiv + 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double h = (knots[i + 1] - knots[i]) / kSubdiv;
        for (int s = 0; s < kSubdiv; ++s) grid.push_back(knots[i] + s * h);
    }
    grid.push_back(knots.back());

    auto below = [&](double t) { return speed_at(x, y, t) < v_eps; };
    // Bisect the crossing of speed == v_eps between a point above and below.
    auto refine = [&](double t_above, double t_below) {
        for (int i = 0; i < 60 && std::abs(t_above - t_below) >
                                      1e-14 * std::max(1.0, std::abs(t_below)); ++i) {
            const double mid = 0.5 * (t_above + t_below);
            (below(mid) ? t_below : t_above) = mid;
        }
        return 0.5 * (t_above + t_below);
    };

    std::vector<RawStop> out;
    std::size_t i = 0;
    while (i < grid.size()) {
        if (!below(grid[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < grid.size() && below(grid[j + 1])) ++j;
        RawStop stop;
        stop.t_begin = (i == 0) ? grid.front() : refine(grid[i - 1], grid[i]);
        stop.t_end = (j + 1 == grid.size()) ? grid.back() : refine(grid[j + 1], grid[j]);
        if (i > 0) stop.dir_before = velocity_direction(x, y, stop.t_begin);
        if (j + 1 < grid.size()) stop.dir_after = velocity_direction(x, y, stop.t_end);
        out.push_back(stop);
        i = j + 1;
    }
    return out;
}

/// Moving segments between stops plus the reverse-gear assignment on them,
/// and the piecewise-constant R(t) covering the whole domain (stop intervals
/// inherit R from the preceding moving segment).
struct ReverseAssignment {
    struct Segment {
        double t_begin, t_end;
        bool reverse = false;
    };
    std::vector<Segment> segments;
    std::vector<SmoothTrajectory::ReverseSpan> spans;
    std::vector<std::string> warnings;
};

/// Assigns R per segment.  With explicit per-sample flags they pass through
/// unchanged (first flag inside each segment); otherwise R starts at 0 and
/// flips across a stop exactly when the raw motion directions before and
/// after differ by more than 90 degrees, which keeps the front tangent of
/// the reconstruction continuous through cusps.
inline ReverseAssignment assign_reverse(double t_start, double t_end,
                                        const std::vector<RawStop>& raw,
                                        const SampledTrack* explicit_flags) {
    ReverseAssignment out;
    {
        double cursor = t_start;
        for (const RawStop& s : raw) {
            if (s.t_begin > cursor) out.segments.push_back({cursor, s.t_begin});
            cursor = s.t_end;
        }
        if (cursor < t_end) out.segments.push_back({cursor, t_end});
    }

    if (out.segments.empty())
        out.warnings.push_back("trajectory never exceeds the stop threshold; reverse gear "
                               "and tangent direction are unconstrained");

    if (explicit_flags && explicit_flags->has_reverse()) {
        // Passthrough.  A segment without samples is ambiguous and inherits
        // the previous segment's gear.
        const SampledTrack& track = *explicit_flags;
        bool previous = false;
        for (ReverseAssignment::Segment& seg : out.segments) {
            auto first = std::lower_bound(track.time.begin(), track.time.end(), seg.t_begin);
            std::optional<bool> value;
            bool constant = true;
            for (auto it = first; it != track.time.end() && *it <= seg.t_end; ++it) {
                const bool flag =
                    track.reverse[static_cast<std::size_t>(it - track.time.begin())] != 0;
                if (!value) value = flag;
                else if (*value != flag) constant = false;
            }
            seg.reverse = value.value_or(previous);
            if (!value)
                out.warnings.push_back("segment [" + std::to_string(seg.t_begin) + ", " +
                                       std::to_string(seg.t_end) +
                                       "] contains no sample; reverse flag kept from the "
                                       "previous segment");
            if (!constant)
                out.warnings.push_back("explicit reverse flag changes while moving in segment [" +
                                       std::to_string(seg.t_begin) + ", " +
                                       std::to_string(seg.t_end) + "]; using first value");
            previous = seg.reverse;
        }
    } else {
        // Inference by tangent continuity.  Interior stops separate segment
        // k from k+1 and always carry both one-sided direction limits.
        bool current = false;
        std::size_t seg_idx = 0;
        for (const RawStop& s : raw) {
            if (!s.dir_before || !s.dir_after) continue;  // boundary stop, no flip decision
            if (seg_idx < out.segments.size()) out.segments[seg_idx].reverse = current;
            if (dot(*s.dir_before, *s.dir_after) < 0.0) current = !current;
            ++seg_idx;
        }
        for (; seg_idx < out.segments.size(); ++seg_idx) out.segments[seg_idx].reverse = current;
    }

    // Full-domain step function.
    auto push = [&out](double b, double e, bool r) {
        if (!(e > b)) return;
        if (!out.spans.empty() && out.spans.back().reverse == r && out.spans.back().t_end >= b)
            out.spans.back().t_end = e;
        else
            out.spans.push_back({b, e, r});
    };
    std::size_t seg = 0;
    bool last_reverse = out.segments.empty() ? false : out.segments.front().reverse;
    for (const RawStop& s : raw) {
        while (seg < out.segments.size() && out.segments[seg].t_end <= s.t_begin + 1e-15) {
            push(out.segments[seg].t_begin, out.segments[seg].t_end, out.segments[seg].reverse);
            last_reverse = out.segments[seg].reverse;
            ++seg;
        }
        const bool next_reverse =
            (seg < out.segments.size()) ? out.segments[seg].reverse : last_reverse;
        push(s.t_begin, s.t_end, s.dir_before ? last_reverse : next_reverse);
    }
    for (; seg < out.segments.size(); ++seg)
        push(out.segments[seg].t_begin, out.segments[seg].t_end, out.segments[seg].reverse);
    if (out.spans.empty()) out.spans.push_back({t_start, t_end, false});
    out.spans.front().t_begin = t_start;
    out.spans.back().t_end = t_end;
    return out;
}

}  // namespace detail

/// Fits a penalized cubic smoothing spline per coordinate (natural boundary
/// conditions, knots at the sample times), detects stop intervals, assigns
/// the reverse-gear function and resolves the tangent fill across stops.
inline SmoothTrajectory fit_c2(const SampledTrack& track, const FitOptions& options) {
    track.validate(4);
    SmoothTrajectory traj;
    traj.options_ = options;
    traj.x_ = CubicSpline(track.time, track.x, options.lambda);
    traj.y_ = CubicSpline(track.time, track.y, options.lambda);

    const std::vector<detail::RawStop> raw =
        detail::detect_raw_stops(traj.x_, traj.y_, options.v_eps);

    detail::ReverseAssignment assignment = detail::assign_reverse(
        track.time.front(), track.time.back(), raw, track.has_reverse() ? &track : nullptr);
    traj.warnings_ = std::move(assignment.warnings);
    traj.reverse_ = std::move(assignment.spans);
    const auto& segments = assignment.segments;

    // Resolve fill tangents with the reverse-corrected one-sided limits.
    // Map stops to neighbouring segments by time.
    auto reverse_of_segment_ending_at = [&](double t) -> std::optional<bool> {
        for (const auto& seg : segments)
            if (std::abs(seg.t_end - t) <= 1e-12 * std::max(1.0, std::abs(t))) return seg.reverse;
        return std::nullopt;
    };
    auto reverse_of_segment_starting_at = [&](double t) -> std::optional<bool> {
        for (const auto& seg : segments)
            if (std::abs(seg.t_begin - t) <= 1e-12 * std::max(1.0, std::abs(t))) return seg.reverse;
        return std::nullopt;
    };

    for (const detail::RawStop& s : raw) {
        StopInterval interval;
        interval.t_begin = s.t_begin;
        interval.t_end = s.t_end;
        interval.has_before_limit = s.dir_before.has_value();
        interval.has_after_limit = s.dir_after.has_value();

        std::optional<Vec2> t_before, t_after;
        if (s.dir_before) {
            const bool rev = reverse_of_segment_ending_at(s.t_begin).value_or(false);
            t_before = (rev ? -1.0 : 1.0) * (*s.dir_before);
        }
        if (s.dir_after) {
            const bool rev = reverse_of_segment_starting_at(s.t_end).value_or(false);
            t_after = (rev ? -1.0 : 1.0) * (*s.dir_after);
        }

        if (t_before && t_after) {
            const double ang = angle_between(*t_before, *t_after);
            if (ang <= options.theta_fill) {
                interval.resolvable = true;
                interval.fill_tangent = normalized(*t_before + *t_after);
            } else {
                interval.resolvable = false;
                traj.warnings_.push_back(
                    "stop interval [" + std::to_string(s.t_begin) + ", " +
                    std::to_string(s.t_end) + "] s unresolvable: tangent limits differ by " +
                    std::to_string(ang * 180.0 / std::numbers::pi) + " deg");
            }
        } else if (t_before || t_after) {
            interval.resolvable = true;
            interval.fill_tangent = t_before ? *t_before : *t_after;
        } else {
            interval.resolvable = false;  // the whole track is at rest
        }
        traj.stops_.push_back(interval);
    }

    return traj;
}

/// Re-derives the reverse-gear step function of a fitted trajectory from its
/// stop structure by tangent continuity alone, ignoring any explicit flags
/// the original track carried.  fit_c2 already stores this assignment (or
/// the explicit flags) in reverse_spans().
inline std::vector<SmoothTrajectory::ReverseSpan> infer_reverse(const SmoothTrajectory& traj) {
    const std::vector<detail::RawStop> raw =
        detail::detect_raw_stops(traj.spline_x(), traj.spline_y(), traj.options().v_eps);
    return detail::assign_reverse(traj.t_start(), traj.t_end(), raw, nullptr).spans;
}

inline SmoothTrajectory fit_c2(const SampledTrack& track, double lambda = 0.0) {
    FitOptions options;
    options.lambda = lambda;
    return fit_c2(track, options);
}

/// Re-detects stop intervals of a fitted trajectory under a different speed
/// threshold, resolving fill tangents against the trajectory's existing
/// reverse-gear function.  fit_c2 already runs this at options().v_eps.
inline std::vector<StopInterval> detect_stops(const SmoothTrajectory& traj, double v_eps) {
    if (!(v_eps > 0.0)) throw std::invalid_argument("detect_stops: v_eps must be > 0");
    std::vector<StopInterval> out;
    for (const detail::RawStop& s :
         detail::detect_raw_stops(traj.spline_x(), traj.spline_y(), v_eps)) {
        StopInterval interval;
        interval.t_begin = s.t_begin;
        interval.t_end = s.t_end;
        interval.has_before_limit = s.dir_before.has_value();
        interval.has_after_limit = s.dir_after.has_value();
        std::optional<Vec2> t_before, t_after;
        if (s.dir_before)
            t_before = (traj.reverse_at(s.t_begin) ? -1.0 : 1.0) * (*s.dir_before);
        if (s.dir_after)
            t_after = (traj.reverse_at(s.t_end) ? -1.0 : 1.0) * (*s.dir_after);
        if (t_before && t_after) {
            if (angle_between(*t_before, *t_after) <= traj.options().theta_fill) {
                interval.resolvable = true;
                interval.fill_tangent = normalized(*t_before + *t_after);
            }
        } else if (t_before || t_after) {
            interval.resolvable = true;
            interval.fill_tangent = t_before ? *t_before : *t_after;
        }
        out.push_back(interval);
    }
    return out;
}

/// Extracted per-wheel quantities at one profile sample.
struct WheelKinematics {
    double delta = 0.0;    ///< steering angle [rad]
    double v = 0.0;        ///< ground speed [m/s]
    double rho_dot = 0.0;  ///< rotation rate [rad/s]
};

/// All model quantities at one time sample.
struct KinematicSample {
    double t = 0.0;
    Vec2 position;
    double v_lon = 0.0;       ///< signed [m/s]
    double v_lat = 0.0;       ///< identically 0 under the no-slip assumption
    double a_lon = 0.0;       ///< [m/s^2]
    double a_lat = 0.0;       ///< [m/s^2]
    double kappa = 0.0;       ///< signed curvature [1/m]
    double heading_psi = 0.0; ///< motion heading in (-pi, pi] [rad]
    double yaw_rate = 0.0;    ///< [rad/s]
    double delta_swa = 0.0;   ///< steering wheel angle [deg]
    std::array<WheelKinematics, 4> wheels{};  // FL FR RL RR
    bool reverse = false;
    bool in_stop = false;     ///< true when the fill rule supplied the frame
};

using KinematicProfile = std::vector<KinematicSample>;

/// Evaluates every model quantity at the given times.  Inside resolved stop
/// intervals the fill tangent supplies the frame, curvature and steering are
/// reported as zero and the signed speed follows T^T xdot; times inside
/// unresolvable intervals throw UnresolvableInterval.
inline KinematicProfile extract_profile(const SmoothTrajectory& traj,
                                        const VehicleGeometry& geometry,
                                        std::span<const double> sample_times) {
    KinematicProfile profile;
    profile.reserve(sample_times.size());
    for (double t : sample_times) {
        const Pose2Derivs p = traj.derivatives(t);  // throws OutOfDomain
        KinematicSample s;
        s.t = t;
        s.position = p.position;
        s.reverse = p.reverse;

        const StopInterval* stop = traj.stop_at(t);
        if (stop) {
            if (!stop->resolvable)
                throw UnresolvableInterval("profile sample t=" + std::to_string(t) +
                                           " lies in an unresolvable stop interval");
            s.in_stop = true;
            const Vec2 T = stop->fill_tangent;
            const Vec2 N = rot90(T);
            s.v_lon = dot(T, p.velocity);
            s.a_lon = dot(T, p.acceleration);
            s.a_lat = dot(N, p.acceleration);
            s.kappa = 0.0;
            s.yaw_rate = 0.0;
            const Vec2 motion_dir = (p.reverse ? -1.0 : 1.0) * T;
            s.heading_psi = detail::direction_angle(geometry.north, motion_dir);
            const double body_speed = norm(p.velocity);
            for (int w = 0; w < 4; ++w) {
                const WheelMount& m = geometry.wheels[w];
                s.wheels[w].delta = 0.0;
                s.wheels[w].v = wheel_speed(body_speed, 0.0, m);
                s.wheels[w].rho_dot = wheel_angular_rate(s.wheels[w].v, m);
            }
        } else {
            s.v_lon = longitudinal_speed(p);
            const BodyAccel acc = accelerations(p);
            s.a_lon = acc.a_lon;
            s.a_lat = acc.a_lat;
            s.kappa = curvature(p);
            s.heading_psi = heading(p, geometry.north);
            s.yaw_rate = yaw_rate(p);
            const double body_speed = norm(p.velocity);
            for (int w = 0; w < 4; ++w) {
                const WheelMount& m = geometry.wheels[w];
                s.wheels[w].delta = wheel_steer_angle(s.kappa, m);
                s.wheels[w].v = wheel_speed(body_speed, s.kappa, m);
                s.wheels[w].rho_dot = wheel_angular_rate(s.wheels[w].v, m);
            }
        }
        // Steering wheel angle through the virtual center wheel delta(l, 0).
        const double delta_center = std::atan(s.kappa * geometry.wheelbase);
        s.delta_swa = geometry.steering(delta_center);
        profile.push_back(s);
    }
    return profile;
}

}  // namespace vkin
