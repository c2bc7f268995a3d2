#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vkin/csv.hpp"
#include "vkin/errors.hpp"
#include "vkin/geometry.hpp"
#include "vkin/trajectory.hpp"

// Brings the model estimates and the recorded reference channels onto one
// uniform time grid.  Reference channels are linearly interpolated; model
// channels are evaluated from the fitted splines directly on the grid, never
// resampled from a coarser profile.  The constant time offset between the
// two recordings can be fixed by the caller or estimated by maximizing the
// cross-correlation of the longitudinal speed channels.

namespace vkin {

struct SyncOptions {
    double grid_rate = 50.0;          ///< [Hz]
    std::optional<double> offset;     ///< reference-clock shift [s]; estimated when absent
    double search_window = 1.0;       ///< +- window for offset estimation [s]
};

/// Channels resampled onto a shared grid.  `estimate` holds the model values,
/// `reference` the recorded ones; matching names can be compared directly.
struct SyncedRecording {
    std::vector<double> t;
    std::vector<std::pair<std::string, std::vector<double>>> estimate;
    std::vector<std::pair<std::string, std::vector<double>>> reference;
    double offset = 0.0;

    const std::vector<double>* estimate_channel(std::string_view name) const {
        for (const auto& [n, v] : estimate)
            if (n == name) return &v;
        return nullptr;
    }
    const std::vector<double>* reference_channel(std::string_view name) const {
        for (const auto& [n, v] : reference)
            if (n == name) return &v;
        return nullptr;
    }
};

namespace detail {

/// Linear interpolation of (ts, vs) at t; ts strictly increasing, t inside.
inline double lerp_series(std::span<const double> ts, std::span<const double> vs, double t) {
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    if (it == ts.begin()) return vs.front();
    if (it == ts.end()) return vs.back();
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
    return vs[hi - 1] + w * (vs[hi] - vs[hi - 1]);
}

/// Pearson correlation of two equally long series; 0 when degenerate.
inline double correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

/// Estimates the reference-clock offset by scanning candidate shifts at grid
/// resolution over +-search_window and maximizing the correlation between
/// the model v_lon and the reference v_lon.  Returns 0 with a degenerate
/// overlap rather than failing; synchronize() reports NoOverlap later.
inline double estimate_time_offset(std::span<const double> est_t, std::span<const double> est_v,
                                   std::span<const double> ref_t, std::span<const double> ref_v,
                                   double grid_rate, double search_window) {
    const int k_max = static_cast<int>(std::lround(search_window * grid_rate));
    double best_offset = 0.0;
    double best_corr = -2.0;
    for (int k = -k_max; k <= k_max; ++k) {
        const double d = static_cast<double>(k) / grid_rate;
        const double lo = std::max(est_t.front(), ref_t.front() + d);
        const double hi = std::min(est_t.back(), ref_t.back() + d);
        if (hi - lo < 2.0 / grid_rate) continue;
        std::vector<double> a, b;
        const std::size_t n = static_cast<std::size_t>((hi - lo) * grid_rate) + 1;
        a.reserve(n);
        b.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = lo + static_cast<double>(i) / grid_rate;
            if (t > hi) break;
            a.push_back(detail::lerp_series(est_t, est_v, t));
            b.push_back(detail::lerp_series(ref_t, ref_v, t - d));
        }
        const double c = detail::correlation(a, b);
        if (c > best_corr) {
            best_corr = c;
            best_offset = d;
        }
    }
    return best_offset;
}

/// Resamples the model estimates and the reference channels onto a uniform
/// grid over the overlap of the two recordings.  Grid times falling into
/// unresolvable stop intervals are dropped.  Throws NoOverlap when the
/// overlap holds fewer than two grid points.
inline SyncedRecording synchronize(const SmoothTrajectory& traj, const VehicleGeometry& geometry,
                                   const csv::ChannelSet& reference, const SyncOptions& options) {
    if (reference.t.size() < 2) throw TooFewSamples("synchronize: reference needs >= 2 samples");
    if (!(options.grid_rate > 0.0))
        throw std::invalid_argument("synchronize: grid_rate must be > 0");

    double offset = 0.0;
    if (options.offset) {
        offset = *options.offset;
    } else if (const std::vector<double>* ref_v = reference.channel("v_lon")) {
        // Model v_lon on a provisional grid over the trajectory domain.
        const double rate = options.grid_rate;
        const std::size_t n =
            static_cast<std::size_t>((traj.t_end() - traj.t_start()) * rate) + 1;
        std::vector<double> est_t, est_v;
        est_t.reserve(n);
        est_v.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = traj.t_start() + static_cast<double>(i) / rate;
            if (t > traj.t_end()) break;
            const StopInterval* stop = traj.stop_at(t);
            if (stop && !stop->resolvable) continue;
            const Pose2Derivs p = traj.derivatives(t);
            est_t.push_back(t);
            est_v.push_back(longitudinal_speed(p));
        }
        if (est_t.size() >= 2)
            offset = estimate_time_offset(est_t, est_v, reference.t, *ref_v, rate,
                                          options.search_window);
    }

    const double lo = std::max(traj.t_start(), reference.t.front() + offset);
    const double hi = std::min(traj.t_end(), reference.t.back() + offset);
    const double rate = options.grid_rate;
    if (!(hi - lo >= 1.0 / rate))
        throw NoOverlap("synchronize: overlap of [" + std::to_string(traj.t_start()) + ", " +
                        std::to_string(traj.t_end()) + "] and shifted reference is too short");

    std::vector<double> grid;
    const std::size_t n = static_cast<std::size_t>((hi - lo) * rate + 1e-9) + 1;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = lo + static_cast<double>(i) / rate;
        if (t > hi) break;
        const StopInterval* stop = traj.stop_at(t);
        if (stop && !stop->resolvable) continue;
        grid.push_back(t);
    }
    if (grid.size() < 2) throw NoOverlap("synchronize: fewer than two usable grid points");

    SyncedRecording out;
    out.t = grid;
    out.offset = offset;

    const KinematicProfile profile = extract_profile(traj, geometry, grid);
    for (const auto& [name, values] : reference.channels) {
        std::vector<double> ref_on_grid;
        ref_on_grid.reserve(grid.size());
        for (double t : grid)
            ref_on_grid.push_back(detail::lerp_series(reference.t, values, t - offset));
        out.reference.emplace_back(name, std::move(ref_on_grid));
        if (auto est = csv::profile_channel(profile, name))
            out.estimate.emplace_back(name, std::move(*est));
    }
    return out;
}

}  // namespace vkin
