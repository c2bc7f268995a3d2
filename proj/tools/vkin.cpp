// Batch command-line front end: analyze recorded tracks, integrate control
// inputs, calibrate the steering map, compare channels and run the full
// accuracy evaluation.  All file formats are CSV with a mandatory header row;
// see the library headers for column conventions.
//
// Exit codes: 0 success, 1 usage error, 2 parse error, 3 numeric failure.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "vkin/vkin.hpp"

namespace {

using namespace vkin;

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string format(double v) { return csv::format_number(v); }

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path)
        csv::write_file(*out_path, content);
    else
        std::cout << content;
}

void print_warnings(const SmoothTrajectory& traj) {
    for (const std::string& w : traj.warnings()) std::cerr << "warning: " << w << '\n';
}

/// Track timestamps kept for profile extraction: everything outside
/// unresolvable stop intervals.
std::vector<double> usable_times(const SmoothTrajectory& traj, const std::vector<double>& times) {
    std::vector<double> out;
    out.reserve(times.size());
    std::size_t dropped = 0;
    for (double t : times) {
        const StopInterval* stop = traj.stop_at(t);
        if (stop && !stop->resolvable) {
            ++dropped;
            continue;
        }
        out.push_back(t);
    }
    if (dropped > 0)
        std::cerr << "warning: dropped " << dropped
                  << " sample(s) inside unresolvable stop intervals\n";
    return out;
}

/// Geometry used when `segment` runs without a vehicle file.  Only the
/// endpoint error depends on it, and the steering map cancels out of the
/// curvature round trip, so generic values are adequate.
VehicleGeometry fallback_vehicle() {
    return VehicleGeometry::standard(2.7, 1.55, 0.316, SteeringPolynomial::linear(859.0, 0.6));
}

std::string segments_csv(const std::vector<SegmentStats>& segments) {
    std::string out =
        "t_begin,t_end,arc_length,max_abs_a_lon,max_abs_a_lat,mean_abs_a_lon,mean_abs_a_lat,"
        "endpoint_error,max_speed_error_kmh\n";
    for (const SegmentStats& s : segments) {
        out += format(s.t_begin);
        for (double v : {s.t_end, s.arc_length, s.max_abs_a_lon, s.max_abs_a_lat,
                         s.mean_abs_a_lon, s.mean_abs_a_lat, s.endpoint_error}) {
            out += ',';
            out += format(v);
        }
        out += ',';
        if (s.max_speed_error_kmh) out += format(*s.max_speed_error_kmh);
        out += '\n';
    }
    return out;
}

std::string bin_label(const BinAxis& ax, std::size_t i) {
    return format(ax.edges[i]) + ":" + format(ax.edges[i + 1]);
}

/// Matrix CSV: one row per y cell, one column per x cell.  Cells without
/// samples stay empty in the value matrix.
std::string map_csv(const BinnedMap& map, bool counts) {
    std::string out = map.ax_y.name + "\\" + map.ax_x.name;
    for (std::size_t ix = 0; ix < map.ax_x.bins(); ++ix) out += "," + bin_label(map.ax_x, ix);
    out += '\n';
    for (std::size_t iy = 0; iy < map.ax_y.bins(); ++iy) {
        out += bin_label(map.ax_y, iy);
        for (std::size_t ix = 0; ix < map.ax_x.bins(); ++ix) {
            const std::size_t k = map.index(ix, iy);
            out += ',';
            if (counts)
                out += std::to_string(map.count[k]);
            else if (map.count[k] > 0)
                out += format(map.value[k]);
        }
        out += '\n';
    }
    return out;
}

std::string comparison_text(
    const std::vector<std::pair<std::string, ChannelComparison>>& rows) {
    std::string out;
    for (const auto& [channel, c] : rows) {
        out += "channel = " + channel + "\n";
        out += "count = " + std::to_string(c.count) + "\n";
        out += "mu = " + format(c.mu) + "\n";
        out += "sigma = " + format(c.sigma) + "\n";
        out += "m = " +
               (c.m ? format(*c.m) : std::string("undefined (zero reference energy)")) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string track_path;
    std::string vehicle_path;
    double lambda = 0.0;
    double v_eps = 0.05;
    double theta_fill_deg = 5.0;
    std::optional<std::string> out;
};

void run_analyze(const AnalyzeArgs& args) {
    const SampledTrack track = csv::load_track(args.track_path);
    const VehicleGeometry geom = load_vehicle_config(args.vehicle_path);
    FitOptions options;
    options.lambda = args.lambda;
    options.v_eps = args.v_eps;
    options.theta_fill = args.theta_fill_deg * kDegToRad;
    const SmoothTrajectory traj = fit_c2(track, options);
    print_warnings(traj);
    const std::vector<double> times = usable_times(traj, track.time);
    const KinematicProfile profile = extract_profile(traj, geom, times);
    emit(args.out, csv::write_profile(profile));
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

struct ForwardArgs {
    std::string controls_path;
    std::string vehicle_path;
    std::string init;  // "x,y,heading"
    double step = 1e-3;
    bool hold = false;
    std::optional<std::string> out;
};

void run_forward(const ForwardArgs& args) {
    double x = 0.0, y = 0.0, heading = 0.0;
    {
        std::istringstream in(args.init);
        char c1 = 0, c2 = 0;
        if (!(in >> x >> c1 >> y >> c2 >> heading) || c1 != ',' || c2 != ',' ||
            !(in >> std::ws).eof())
            throw CLI::ValidationError("--init", "expected 'x,y,heading' (heading in rad "
                                                 "counterclockwise from the north vector)");
    }
    const VehicleGeometry geom = load_vehicle_config(args.vehicle_path);
    const ControlProfile controls = csv::load_controls(
        args.controls_path, args.hold ? ControlInterp::Hold : ControlInterp::Linear);

    PoseState init;
    init.position = {x, y};
    init.tangent = rotate(normalized(geom.north), heading);
    const SampledTrack out = integrate(controls, geom, init, args.step);
    emit(args.out, csv::write_track(out));
}

// ---------------------------------------------------------------------------
// calibrate-steering
// ---------------------------------------------------------------------------

struct CalibrateArgs {
    std::string pairs_path;
    std::optional<std::string> out;
};

void run_calibrate(const CalibrateArgs& args) {
    const std::vector<SteeringPair> pairs = csv::load_steering_pairs(args.pairs_path);
    const SteeringPolynomial poly = fit_steering(pairs);
    double ss = 0.0;
    for (const SteeringPair& p : pairs) {
        const double r = poly(p.delta_wheel) - p.delta_swa;
        ss += r * r;
    }
    std::string out;
    out += "steering.c0 = " + format(poly.c[0]) + "\n";
    out += "steering.c1 = " + format(poly.c[1]) + "\n";
    out += "steering.c2 = " + format(poly.c[2]) + "\n";
    out += "steering.c3 = " + format(poly.c[3]) + "\n";
    out += "steering.range.min = " + format(poly.delta_min) + "\n";
    out += "steering.range.max = " + format(poly.delta_max) + "\n";
    out += "# pairs = " + std::to_string(pairs.size()) +
           ", rms_residual_deg = " + format(std::sqrt(ss / static_cast<double>(pairs.size()))) +
           "\n";
    emit(args.out, out);
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string reference_path;
    std::string estimate_path;
    std::string channel;
    std::optional<std::string> out;
};

void run_compare(const CompareArgs& args) {
    const csv::ChannelSet ref = csv::load_channels(args.reference_path);
    const csv::ChannelSet est = csv::load_channels(args.estimate_path);
    const std::vector<double>* ref_v = ref.channel(args.channel);
    const std::vector<double>* est_v = est.channel(args.channel);
    if (!ref_v) throw ParseError(args.reference_path + ": no column '" + args.channel + "'");
    if (!est_v) throw ParseError(args.estimate_path + ": no column '" + args.channel + "'");

    std::vector<double> r, e;
    if (ref.t == est.t) {
        r = *ref_v;
        e = *est_v;
    } else {
        // Resample the estimate onto the reference grid over the overlap.
        for (std::size_t i = 0; i < ref.t.size(); ++i) {
            const double t = ref.t[i];
            if (t < est.t.front() || t > est.t.back()) continue;
            r.push_back((*ref_v)[i]);
            e.push_back(detail::lerp_series(est.t, *est_v, t));
        }
        if (r.size() < 2)
            throw NoOverlap("compare: time ranges of the two files barely overlap");
    }
    emit(args.out, comparison_text({{args.channel, compare_channels(r, e)}}));

}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentArgs {
    std::string track_path;
    std::optional<std::string> vehicle_path;
    double lambda = 0.0;
    double min_len = 5.0;
    double max_len = 150.0;
    double stride = 5.0;
    double rk_step = 1e-2;
    unsigned threads = 0;
    std::optional<std::string> out;
};

/// Windows are independent of each other, so they are evaluated on a small
/// worker pool; results and warnings are collected by window index, which
/// keeps the aggregated output identical to a sequential run.
std::vector<SegmentStats> evaluate_segments(const SmoothTrajectory& traj,
                                            const VehicleGeometry& geom, double min_len,
                                            double max_len, double stride, double rk_step,
                                            const SpeedReference* speed_ref,
                                            unsigned threads = 0) {
    const std::vector<ArcSegment> segments = segment_overlapping(traj, min_len, max_len, stride);
    std::vector<std::optional<SegmentStats>> results(segments.size());
    std::vector<std::string> warnings(segments.size());

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(segments.size(), 1));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < segments.size(); i = next.fetch_add(1)) {
            try {
                results[i] = evaluate_segment(traj, geom, segments[i], rk_step, speed_ref);
            } catch (const Error& e) {
                warnings[i] = std::string("skipping window [") + format(segments[i].s_begin) +
                              ", " + format(segments[i].s_end) + "] m: " + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    std::vector<SegmentStats> stats;
    stats.reserve(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!warnings[i].empty()) std::cerr << "warning: " << warnings[i] << '\n';
        if (results[i]) stats.push_back(*results[i]);
    }
    return stats;
}

void run_segment(const SegmentArgs& args) {
    const SampledTrack track = csv::load_track(args.track_path);
    const VehicleGeometry geom =
        args.vehicle_path ? load_vehicle_config(*args.vehicle_path) : fallback_vehicle();
    const SmoothTrajectory traj = fit_c2(track, args.lambda);
    print_warnings(traj);
    const std::vector<SegmentStats> stats =
        evaluate_segments(traj, geom, args.min_len, args.max_len, args.stride, args.rk_step,
                          nullptr, args.threads);
    emit(args.out, segments_csv(stats));
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string track_path;
    std::optional<std::string> can_path;
    std::string vehicle_path;
    std::string out_dir = "vkin-report";
    double lambda = 0.0;
    double gap_threshold = 1.0;
    double grid_rate = 50.0;
    std::optional<double> offset;
    double min_len = 5.0;
    double max_len = 150.0;
    double stride = 5.0;
    double rk_step = 1e-2;
    double underestimation_threshold = 0.03;
    unsigned threads = 0;
};

void run_evaluate(const EvaluateArgs& args) {
    const SampledTrack raw_track = csv::load_track(args.track_path);
    const VehicleGeometry geom = load_vehicle_config(args.vehicle_path);
    std::optional<csv::ChannelSet> can;
    if (args.can_path) can = csv::load_channels(*args.can_path);

    const std::vector<SampledTrack> parts = filter_quality(raw_track, args.gap_threshold);
    std::vector<std::pair<std::string, std::string>> outputs;  // name -> content
    std::string report;
    report += "track = " + args.track_path + "\n";
    report += "vehicle = " + args.vehicle_path + "\n";
    report += "reference = " + (args.can_path ? *args.can_path : std::string("(none)")) + "\n";
    report += "sub_tracks = " + std::to_string(parts.size()) + "\n";

    // Pooled over all sub-tracks.
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pooled;  // ref, est
    std::map<std::string, std::string> scatter;  // channel -> csv body
    std::vector<SegmentStats> all_segments;
    struct WheelMapInput {
        std::vector<double> ref, est, kappa, v_kmh, x, y;
    };
    std::map<std::string, WheelMapInput> wheel_maps;
    double total_arc = 0.0;
    std::size_t used_parts = 0;

    for (std::size_t part = 0; part < parts.size(); ++part) {
        const SampledTrack& sub = parts[part];
        const std::string tag = [&] {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "%03zu", part);
            return std::string(buf);
        }();
        if (sub.size() < 8) {
            std::cerr << "warning: sub-track " << tag << " too short (" << sub.size()
                      << " samples), skipped\n";
            continue;
        }
        ++used_parts;
        const SmoothTrajectory traj = fit_c2(sub, args.lambda);
        print_warnings(traj);
        total_arc += ArcLengthTable(traj).total();

        const std::vector<double> times = usable_times(traj, sub.time);
        const KinematicProfile profile = extract_profile(traj, geom, times);
        outputs.emplace_back("profile_" + tag + ".csv", csv::write_profile(profile));

        std::optional<SyncedRecording> synced;
        if (can) {
            SyncOptions sync_options;
            sync_options.grid_rate = args.grid_rate;
            sync_options.offset = args.offset;
            try {
                synced = synchronize(traj, geom, *can, sync_options);
            } catch (const NoOverlap&) {
                std::cerr << "warning: sub-track " << tag
                          << " does not overlap the reference recording\n";
            }
        }
        if (synced) {
            report += "offset_" + tag + " = " + format(synced->offset) + "\n";
            for (const auto& [name, est_values] : synced->estimate) {
                const std::vector<double>* ref_values = synced->reference_channel(name);
                if (!ref_values) continue;
                auto& [pr, pe] = pooled[name];
                pr.insert(pr.end(), ref_values->begin(), ref_values->end());
                pe.insert(pe.end(), est_values.begin(), est_values.end());
                std::string& body = scatter[name];
                if (body.empty()) body = "t,reference,estimate\n";
                for (std::size_t i = 0; i < synced->t.size(); ++i)
                    body += format(synced->t[i]) + "," + format((*ref_values)[i]) + "," +
                            format(est_values[i]) + "\n";
            }

            // Inputs for the wheel-speed underestimation maps.
            const KinematicProfile grid_profile = extract_profile(traj, geom, synced->t);
            for (int w = 0; w < 4; ++w) {
                const std::string name = std::string("v_") + kWheelNames[w];
                const std::vector<double>* ref_values = synced->reference_channel(name);
                if (!ref_values) continue;
                WheelMapInput& in = wheel_maps[name];
                for (std::size_t i = 0; i < synced->t.size(); ++i) {
                    in.ref.push_back((*ref_values)[i]);
                    in.est.push_back(grid_profile[i].wheels[w].v);
                    in.kappa.push_back(std::abs(grid_profile[i].kappa));
                    in.v_kmh.push_back(grid_profile[i].v_lon * 3.6);
                    in.x.push_back(grid_profile[i].position.x);
                    in.y.push_back(grid_profile[i].position.y);
                }
            }
        }

        std::optional<SpeedReference> speed_ref;
        if (synced) {
            const std::vector<double>* est_v = synced->estimate_channel("v_lon");
            const std::vector<double>* ref_v = synced->reference_channel("v_lon");
            if (est_v && ref_v) speed_ref = SpeedReference{synced->t, *est_v, *ref_v};
        }
        const std::vector<SegmentStats> stats =
            evaluate_segments(traj, geom, args.min_len, args.max_len, args.stride, args.rk_step,
                              speed_ref ? &*speed_ref : nullptr, args.threads);
        all_segments.insert(all_segments.end(), stats.begin(), stats.end());
    }

    report += "sub_tracks_used = " + std::to_string(used_parts) + "\n";
    report += "total_arc_length_m = " + format(total_arc) + "\n";
    report += "segments = " + std::to_string(all_segments.size()) + "\n";

    // Aggregate everything into the report structure, then serialize.
    AccuracyReport acc;
    acc.segments = std::move(all_segments);
    for (const auto& [name, series] : pooled) {
        if (series.first.size() < 2) continue;
        acc.channels.emplace_back(name, compare_channels(series.first, series.second));
    }
    if (!acc.segments.empty()) {
        acc.maps.emplace_back("map_endpoint_alat_alon",
                              endpoint_error_map(acc.segments, SegmentAxis::MaxAbsALat,
                                                 default_a_lat_axis(), SegmentAxis::MaxAbsALon,
                                                 default_a_lon_axis()));
        const BinnedMap by_speed_err =
            endpoint_error_map(acc.segments, SegmentAxis::MaxAbsALat, default_a_lat_axis(),
                               SegmentAxis::MaxSpeedErrorKmh, default_speed_error_axis());
        bool any = false;
        for (std::size_t k = 0; k < by_speed_err.count.size(); ++k)
            any |= by_speed_err.count[k] > 0;
        if (any) acc.maps.emplace_back("map_endpoint_alat_speederr", by_speed_err);
    }
    for (const auto& [name, in] : wheel_maps) {
        acc.maps.emplace_back(
            "map_under_" + name + "_params",
            underestimation_map(in.ref, in.est, in.kappa, in.v_kmh, default_curvature_axis(),
                                default_speed_axis(), args.underestimation_threshold));
        const auto [xmin, xmax] = std::minmax_element(in.x.begin(), in.x.end());
        const auto [ymin, ymax] = std::minmax_element(in.y.begin(), in.y.end());
        acc.maps.emplace_back(
            "map_under_" + name + "_xy",
            underestimation_map(in.ref, in.est, in.x, in.y,
                                BinAxis::uniform("x_m", *xmin, *xmax, 10),
                                BinAxis::uniform("y_m", *ymin, *ymax, 10),
                                args.underestimation_threshold));
    }

    if (!acc.channels.empty()) {
        std::string channels = "channel,count,mu,sigma,m\n";
        for (const auto& [name, c] : acc.channels) {
            channels += name + "," + std::to_string(c.count) + "," + format(c.mu) + "," +
                        format(c.sigma) + ",";
            if (c.m) channels += format(*c.m);
            channels += '\n';
        }
        outputs.emplace_back("channels.csv", channels);
        report += "\n" + comparison_text(acc.channels);
        for (const auto& [name, body] : scatter)
            outputs.emplace_back("scatter_" + name + ".csv", body);
    }
    outputs.emplace_back("segments.csv", segments_csv(acc.segments));
    for (const auto& [name, map] : acc.maps) {
        outputs.emplace_back(name + ".csv", map_csv(map, false));
        outputs.emplace_back(name + "_counts.csv", map_csv(map, true));
    }
    outputs.emplace_back("report.txt", report);

    // Everything computed; only now touch the filesystem.
    std::filesystem::create_directories(args.out_dir);
    for (const auto& [name, content] : outputs)
        csv::write_file((std::filesystem::path(args.out_dir) / name).string(), content);
    std::cout << "wrote " << outputs.size() << " file(s) to " << args.out_dir << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinematic trajectory analysis: extract vehicle parameters from C2 tracks, "
                 "integrate control inputs, calibrate steering and evaluate accuracy"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze =
        app.add_subcommand("analyze", "Extract the kinematic profile of a recorded track");
    analyze->add_option("--track", analyze_args.track_path, "track CSV (t,x,y[,quality,reverse])")
        ->required();
    analyze->add_option("--vehicle", analyze_args.vehicle_path, "vehicle config file")->required();
    analyze->add_option("--lambda", analyze_args.lambda,
                        "spline roughness penalty (0 = interpolate)");
    analyze->add_option("--v-eps", analyze_args.v_eps, "stop-detection speed threshold [m/s]");
    analyze->add_option("--theta-fill-deg", analyze_args.theta_fill_deg,
                        "tangent fill agreement tolerance [deg]");
    analyze->add_option("--out", analyze_args.out, "output CSV (default: stdout)");
    analyze->callback([&] { run_analyze(analyze_args); });

    ForwardArgs forward_args;
    CLI::App* forward =
        app.add_subcommand("forward", "Integrate a trajectory from steering wheel angle and speed");
    forward
        ->add_option("--controls", forward_args.controls_path, "controls CSV (t,delta_swa_deg,v_lon)")
        ->required();
    forward->add_option("--vehicle", forward_args.vehicle_path, "vehicle config file")->required();
    forward->add_option("--init", forward_args.init, "initial pose 'x,y,heading' (heading in rad)")
        ->required();
    forward->add_option("--step", forward_args.step, "integration step [s]");
    forward->add_flag("--hold", forward_args.hold, "zero-order-hold control interpolation");
    forward->add_option("--out", forward_args.out, "output CSV (default: stdout)");
    forward->callback([&] { run_forward(forward_args); });

    CalibrateArgs calibrate_args;
    CLI::App* calibrate =
        app.add_subcommand("calibrate-steering", "Least-squares cubic steering map from angle pairs");
    calibrate
        ->add_option("--pairs", calibrate_args.pairs_path,
                     "pairs CSV (delta_wheel,delta_swa_deg[,wheel])")
        ->required();
    calibrate->add_option("--out", calibrate_args.out, "output file (default: stdout)");
    calibrate->callback([&] { run_calibrate(calibrate_args); });

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "mu/sigma/m agreement of two series");
    compare->add_option("--reference", compare_args.reference_path, "reference CSV (t + channel)")
        ->required();
    compare->add_option("--estimate", compare_args.estimate_path, "estimate CSV (t + channel)")
        ->required();
    compare->add_option("--channel", compare_args.channel, "column name to compare")->required();
    compare->add_option("--out", compare_args.out, "output file (default: stdout)");
    compare->callback([&] { run_compare(compare_args); });

    SegmentArgs segment_args;
    CLI::App* segment =
        app.add_subcommand("segment", "Overlapping arc-length windows with per-window statistics");
    segment->add_option("--track", segment_args.track_path, "track CSV")->required();
    segment->add_option("--vehicle", segment_args.vehicle_path,
                        "vehicle config (default: generic geometry)");
    segment->add_option("--lambda", segment_args.lambda, "spline roughness penalty");
    segment->add_option("--min", segment_args.min_len, "minimum window length [m]");
    segment->add_option("--max", segment_args.max_len, "maximum window length [m]");
    segment->add_option("--stride", segment_args.stride, "window stride [m]");
    segment->add_option("--rk-step", segment_args.rk_step, "round-trip integration step [s]");
    segment->add_option("--threads", segment_args.threads,
                        "worker threads for window evaluation (default: all cores)");
    segment->add_option("--out", segment_args.out, "output CSV (default: stdout)");
    segment->callback([&] { run_segment(segment_args); });

    EvaluateArgs evaluate_args;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Full accuracy report: channels, windows, endpoint and error maps");
    evaluate->add_option("--track", evaluate_args.track_path, "track CSV")->required();
    evaluate->add_option("--can", evaluate_args.can_path,
                         "reference channels CSV (t + recorded channels)");
    evaluate->add_option("--vehicle", evaluate_args.vehicle_path, "vehicle config file")->required();
    evaluate->add_option("--out-dir", evaluate_args.out_dir, "output directory");
    evaluate->add_option("--lambda", evaluate_args.lambda, "spline roughness penalty");
    evaluate->add_option("--gap-threshold", evaluate_args.gap_threshold,
                         "split tracks at time gaps above this [s]");
    evaluate->add_option("--grid-rate", evaluate_args.grid_rate, "synchronization grid [Hz]");
    evaluate->add_option("--offset", evaluate_args.offset,
                         "fixed reference clock offset [s] (default: estimated)");
    evaluate->add_option("--min", evaluate_args.min_len, "minimum window length [m]");
    evaluate->add_option("--max", evaluate_args.max_len, "maximum window length [m]");
    evaluate->add_option("--stride", evaluate_args.stride, "window stride [m]");
    evaluate->add_option("--rk-step", evaluate_args.rk_step, "round-trip integration step [s]");
    evaluate->add_option("--underestimation-threshold",
                         evaluate_args.underestimation_threshold,
                         "relative underestimation threshold (default 0.03)");
    evaluate->add_option("--threads", evaluate_args.threads,
                         "worker threads for window evaluation (default: all cores)");
    evaluate->callback([&] { run_evaluate(evaluate_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const vkin::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const vkin::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
