#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vkin/errors.hpp"
#include "vkin/forward_model.hpp"
#include "vkin/geometry.hpp"
#include "vkin/metrics.hpp"
#include "vkin/trajectory.hpp"

// Analysis battery for recorded drives: splitting raw tracks into connected
// high-quality pieces, slicing trajectories into overlapping arc-length
// windows, open-loop endpoint errors per window, and binned error maps.

namespace vkin {

/// Splits a track at samples failing the quality flag and at timestamp gaps
/// exceeding gap_threshold, returning the connected usable sub-tracks.  A
/// track without a quality column is split on gaps only.  No samples are
/// ever merged or interpolated across a removed region.
inline std::vector<SampledTrack> filter_quality(const SampledTrack& track, double gap_threshold,
                                                bool use_quality = true) {
    std::vector<SampledTrack> out;
    SampledTrack current;
    const bool check_quality = use_quality && track.has_quality();

    auto flush = [&] {
        if (current.size() > 0) out.push_back(std::move(current));
        current = SampledTrack{};
    };

    for (std::size_t i = 0; i < track.size(); ++i) {
        if (check_quality && track.quality[i] == 0) {
            flush();
            continue;
        }
        if (current.size() > 0 && track.time[i] - current.time.back() > gap_threshold) flush();
        current.append(track.time[i], track.x[i], track.y[i]);
        if (track.has_reverse()) current.reverse.push_back(track.reverse[i]);
        if (track.has_quality()) current.quality.push_back(track.quality[i]);
    }
    flush();
    return out;
}

/// Monotone map between trajectory time and driven arc length, built from
/// per-cell 5-point Gauss-Legendre quadrature of the speed on a refined knot
/// grid.  Arc length is nondecreasing; within stop intervals it is flat and
/// the time of an arc-length position is the earliest matching time.
class ArcLengthTable {
public:
    explicit ArcLengthTable(const SmoothTrajectory& traj, int refine = 4)
        : x_(&traj.spline_x()), y_(&traj.spline_y()) {
        std::span<const double> knots = traj.knots();
        grid_t_.reserve((knots.size() - 1) * refine + 1);
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const double h = (knots[i + 1] - knots[i]) / refine;
            for (int s = 0; s < refine; ++s) grid_t_.push_back(knots[i] + s * h);
        }
        grid_t_.push_back(knots.back());
        grid_s_.resize(grid_t_.size());
        grid_s_[0] = 0.0;
        for (std::size_t i = 0; i + 1 < grid_t_.size(); ++i)
            grid_s_[i + 1] = grid_s_[i] + quad(grid_t_[i], grid_t_[i + 1]);
    }

    double total() const { return grid_s_.back(); }
    double t_start() const { return grid_t_.front(); }
    double t_end() const { return grid_t_.back(); }

    double arclength_at_time(double t) const {
        t = std::clamp(t, grid_t_.front(), grid_t_.back());
        const std::size_t k = cell_of_time(t);
        return grid_s_[k] + quad(grid_t_[k], t);
    }

    double time_at_arclength(double s) const {
        s = std::clamp(s, 0.0, total());
        const auto it = std::lower_bound(grid_s_.begin(), grid_s_.end(), s);
        if (it == grid_s_.begin()) return grid_t_.front();
        const std::size_t hi = static_cast<std::size_t>(it - grid_s_.begin());
        double ta = grid_t_[hi - 1];
        double tb = grid_t_[std::min(hi, grid_t_.size() - 1)];
        for (int i = 0; i < 60 && tb - ta > 1e-13 * std::max(1.0, std::abs(tb)); ++i) {
            const double mid = 0.5 * (ta + tb);
            (arclength_at_time(mid) < s ? ta : tb) = mid;
        }
        return 0.5 * (ta + tb);
    }

private:
    std::size_t cell_of_time(double t) const {
        const auto it = std::upper_bound(grid_t_.begin(), grid_t_.end(), t);
        const std::ptrdiff_t k = (it - grid_t_.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            k, 0, static_cast<std::ptrdiff_t>(grid_t_.size()) - 2));
    }

    double quad(double a, double b) const {
        static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831,
                                                     0.0, 0.5384693101056831, 0.9061798459386640};
        static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665,
                                                       0.5688888888888889, 0.4786286704993665,
                                                       0.2369268850561891};
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double sum = 0.0;
        for (int i = 0; i < 5; ++i)
            sum += weights[i] * detail::speed_at(*x_, *y_, mid + half * nodes[i]);
        return half * sum;
    }

    const CubicSpline* x_;
    const CubicSpline* y_;
    std::vector<double> grid_t_;
    std::vector<double> grid_s_;
};

/// One arc-length window of a trajectory.
struct ArcSegment {
    double t_begin = 0.0;
    double t_end = 0.0;
    double s_begin = 0.0;
    double s_end = 0.0;
    double length() const { return s_end - s_begin; }
};

/// All windows whose start advances by `stride` in arc length and whose
/// lengths sweep min_len..max_len in stride increments, keeping only windows
/// that fit inside the driven length.
inline std::vector<ArcSegment> segment_overlapping(const ArcLengthTable& table, double min_len,
                                                   double max_len, double stride) {
    if (!(min_len > 0.0) || !(max_len >= min_len))
        throw std::invalid_argument("segment_overlapping: need 0 < min_len <= max_len");
    if (!(stride > 0.0)) throw std::invalid_argument("segment_overlapping: stride must be > 0");

    const double total = table.total();
    const double eps = 1e-9 * std::max(1.0, total);
    std::vector<ArcSegment> out;
    for (double s0 = 0.0; s0 + min_len <= total + eps; s0 += stride) {
        for (double len = min_len; len <= max_len + eps; len += stride) {
            const double s1 = s0 + len;
            if (s1 > total + eps) break;
            ArcSegment seg;
            seg.s_begin = s0;
            seg.s_end = std::min(s1, total);
            seg.t_begin = table.time_at_arclength(seg.s_begin);
            seg.t_end = table.time_at_arclength(seg.s_end);
            out.push_back(seg);
        }
    }
    return out;
}

inline std::vector<ArcSegment> segment_overlapping(const SmoothTrajectory& traj, double min_len = 5.0,
                                                   double max_len = 150.0, double stride = 5.0) {
    return segment_overlapping(ArcLengthTable(traj), min_len, max_len, stride);
}

/// Per-window statistics: dynamics extrema, their means, the open-loop
/// endpoint error E of the re-integrated window and (when a reference speed
/// channel is synchronized) the worst speed estimation error.
struct SegmentStats {
    double t_begin = 0.0;
    double t_end = 0.0;
    double arc_length = 0.0;
    double max_abs_a_lon = 0.0;
    double max_abs_a_lat = 0.0;
    double mean_abs_a_lon = 0.0;
    double mean_abs_a_lat = 0.0;
    double endpoint_error = 0.0;                   ///< E [m]
    std::optional<double> max_speed_error_kmh;     ///< max |v_est - v_ref| [km/h]
};

/// Reference speed channel on a synchronized grid, used for the per-window
/// speed-error column.
struct SpeedReference {
    std::span<const double> t;
    std::span<const double> v_estimate;   ///< model estimate [m/s]
    std::span<const double> v_reference;  ///< recorded channel [m/s]
};

inline SegmentStats evaluate_segment(const SmoothTrajectory& traj, const VehicleGeometry& geometry,
                                     const ArcSegment& segment, double rk_step = 1e-3,
                                     const SpeedReference* speed_ref = nullptr) {
    SegmentStats stats;
    stats.t_begin = segment.t_begin;
    stats.t_end = segment.t_end;
    stats.arc_length = segment.length();

    std::vector<double> times;
    times.push_back(segment.t_begin);
    for (double k : traj.knots())
        if (k > segment.t_begin && k < segment.t_end) times.push_back(k);
    times.push_back(segment.t_end);

    const KinematicProfile profile = extract_profile(traj, geometry, times);
    double sum_lon = 0.0;
    double sum_lat = 0.0;
    for (const KinematicSample& s : profile) {
        stats.max_abs_a_lon = std::max(stats.max_abs_a_lon, std::abs(s.a_lon));
        stats.max_abs_a_lat = std::max(stats.max_abs_a_lat, std::abs(s.a_lat));
        sum_lon += std::abs(s.a_lon);
        sum_lat += std::abs(s.a_lat);
    }
    stats.mean_abs_a_lon = sum_lon / static_cast<double>(profile.size());
    stats.mean_abs_a_lat = sum_lat / static_cast<double>(profile.size());
    stats.endpoint_error = roundtrip_check(traj, geometry, rk_step, times);

    if (speed_ref && !speed_ref->t.empty()) {
        double worst = -1.0;
        for (std::size_t i = 0; i < speed_ref->t.size(); ++i) {
            const double t = speed_ref->t[i];
            if (t < segment.t_begin || t > segment.t_end) continue;
            worst = std::max(worst,
                             std::abs(speed_ref->v_estimate[i] - speed_ref->v_reference[i]) * 3.6);
        }
        if (worst >= 0.0) stats.max_speed_error_kmh = worst;
    }
    return stats;
}

/// Axis of a binned map: named variable with explicit cell edges.
struct BinAxis {
    std::string name;
    std::vector<double> edges;  // ascending, size = bins + 1

    static BinAxis uniform(std::string name, double lo, double hi, std::size_t bins) {
        BinAxis ax;
        ax.name = std::move(name);
        ax.edges.resize(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i)
            ax.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
        return ax;
    }

    std::size_t bins() const { return edges.size() - 1; }

    /// Cell of v: half-open [e_i, e_{i+1}) except the last cell, which is
    /// closed.  Values outside the axis do not contribute to any cell.
    std::optional<std::size_t> bin_of(double v) const {
        if (v < edges.front() || v > edges.back()) return std::nullopt;
        if (v == edges.back()) return bins() - 1;
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        return static_cast<std::size_t>(it - edges.begin()) - 1;
    }
};

/// 2-D aggregate over a pair of axes.  Cells with zero count carry no value
/// (they are empty, not zero).
struct BinnedMap {
    BinAxis ax_x;
    BinAxis ax_y;
    std::vector<double> value;       // ny * nx, row-major in y
    std::vector<std::size_t> count;  // same layout

    std::size_t index(std::size_t ix, std::size_t iy) const { return iy * ax_x.bins() + ix; }
};

namespace detail {
inline BinnedMap make_map(BinAxis ax_x, BinAxis ax_y) {
    BinnedMap map;
    map.ax_x = std::move(ax_x);
    map.ax_y = std::move(ax_y);
    map.value.assign(map.ax_x.bins() * map.ax_y.bins(), 0.0);
    map.count.assign(map.ax_x.bins() * map.ax_y.bins(), 0);
    return map;
}
}  // namespace detail

/// Per-cell arithmetic mean of `values` over the samples falling in the cell.
inline BinnedMap binned_mean(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> values, BinAxis ax_x, BinAxis ax_y) {
    BinnedMap map = detail::make_map(std::move(ax_x), std::move(ax_y));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto bx = map.ax_x.bin_of(xs[i]);
        const auto by = map.ax_y.bin_of(ys[i]);
        if (!bx || !by) continue;
        const std::size_t k = map.index(*bx, *by);
        map.value[k] += values[i];
        map.count[k] += 1;
    }
    for (std::size_t k = 0; k < map.value.size(); ++k)
        if (map.count[k] > 0) map.value[k] /= static_cast<double>(map.count[k]);
    return map;
}

/// Per-cell percentage (0..100) of flagged samples.
inline BinnedMap binned_percentage(std::span<const double> xs, std::span<const double> ys,
                                   std::span<const std::uint8_t> flags, BinAxis ax_x, BinAxis ax_y) {
    BinnedMap map = detail::make_map(std::move(ax_x), std::move(ax_y));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto bx = map.ax_x.bin_of(xs[i]);
        const auto by = map.ax_y.bin_of(ys[i]);
        if (!bx || !by) continue;
        const std::size_t k = map.index(*bx, *by);
        if (flags[i]) map.value[k] += 1.0;
        map.count[k] += 1;
    }
    for (std::size_t k = 0; k < map.value.size(); ++k)
        if (map.count[k] > 0) map.value[k] = 100.0 * map.value[k] / static_cast<double>(map.count[k]);
    return map;
}

/// Count-weighted average over all nonempty cells; equals the unbinned
/// statistic when every sample fell inside the axes.
inline double count_weighted_mean(const BinnedMap& map) {
    double sum = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < map.value.size(); ++k) {
        sum += map.value[k] * static_cast<double>(map.count[k]);
        total += map.count[k];
    }
    return total > 0 ? sum / static_cast<double>(total) : 0.0;
}

/// Segment fields usable as map axes.
enum class SegmentAxis { MaxAbsALat, MaxAbsALon, MaxSpeedErrorKmh };

inline std::optional<double> segment_axis_value(const SegmentStats& s, SegmentAxis axis) {
    switch (axis) {
        case SegmentAxis::MaxAbsALat: return s.max_abs_a_lat;
        case SegmentAxis::MaxAbsALon: return s.max_abs_a_lon;
        case SegmentAxis::MaxSpeedErrorKmh: return s.max_speed_error_kmh;
    }
    return std::nullopt;
}

/// Mean endpoint error E per cell over the segments falling in the cell.
/// Segments lacking an axis value (e.g. no speed reference) are skipped.
inline BinnedMap endpoint_error_map(std::span<const SegmentStats> segments, SegmentAxis field_x,
                                    BinAxis ax_x, SegmentAxis field_y, BinAxis ax_y) {
    std::vector<double> xs, ys, es;
    xs.reserve(segments.size());
    ys.reserve(segments.size());
    es.reserve(segments.size());
    for (const SegmentStats& s : segments) {
        const auto vx = segment_axis_value(s, field_x);
        const auto vy = segment_axis_value(s, field_y);
        if (!vx || !vy) continue;
        xs.push_back(*vx);
        ys.push_back(*vy);
        es.push_back(s.endpoint_error);
    }
    return binned_mean(xs, ys, es, std::move(ax_x), std::move(ax_y));
}

/// Per-cell percentage of samples where the estimate falls below
/// (1 - threshold) times the reference, over arbitrary axis coordinates
/// (curvature/speed for the parameter view, x/y for the spatial view).
inline BinnedMap underestimation_map(std::span<const double> reference,
                                     std::span<const double> estimate,
                                     std::span<const double> ax_x_values,
                                     std::span<const double> ax_y_values, BinAxis ax_x,
                                     BinAxis ax_y, double threshold = 0.03) {
    if (!(threshold > 0.0)) throw std::invalid_argument("underestimation_map: threshold must be > 0");
    std::vector<std::uint8_t> flags(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i)
        flags[i] = estimate[i] < (1.0 - threshold) * reference[i] ? 1 : 0;
    return binned_percentage(ax_x_values, ax_y_values, flags, std::move(ax_x), std::move(ax_y));
}

// Default axes mirroring the usual figure layouts; everything overridable.
inline BinAxis default_a_lat_axis() { return BinAxis::uniform("max_abs_a_lat_mps2", 0.0, 6.0, 12); }
inline BinAxis default_a_lon_axis() { return BinAxis::uniform("max_abs_a_lon_mps2", 0.0, 3.0, 12); }
inline BinAxis default_speed_error_axis() {
    return BinAxis::uniform("max_speed_error_kmh", 0.0, 3.0, 12);
}
inline BinAxis default_curvature_axis() { return BinAxis::uniform("abs_kappa_per_m", 0.0, 0.05, 10); }
inline BinAxis default_speed_axis() { return BinAxis::uniform("v_lon_kmh", 20.0, 60.0, 10); }

/// Everything the evaluate pipeline produces for one recording.
struct AccuracyReport {
    std::vector<std::pair<std::string, ChannelComparison>> channels;
    std::vector<SegmentStats> segments;
    std::vector<std::pair<std::string, BinnedMap>> maps;
};

}  // namespace vkin
