#include "vkin/evaluation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "vkin/geometry.hpp"
#include "vkin/trajectory.hpp"

using namespace vkin;

namespace {

constexpr double kPi = std::numbers::pi;

VehicleGeometry test_vehicle() {
    return VehicleGeometry::standard(2.5, 1.5, 0.316, SteeringPolynomial::linear(859.0, 0.6));
}

SampledTrack uniform_track(double speed, double duration, double rate) {
    return testutil::sample_track([speed](double t) { return Vec2{speed * t, 0.0}; }, 0.0,
                                  duration, rate);
}

}  // namespace

TEST(FilterQuality, CleanTrackStaysWhole) {
    const SampledTrack track = uniform_track(5.0, 4.0, 10.0);
    const auto parts = filter_quality(track, 1.0);
    ASSERT_EQ(parts.size(), 1u);
    EXPECT_EQ(parts[0].size(), track.size());
}

TEST(FilterQuality, SplitsAtTimeGap) {
    SampledTrack track;
    for (int i = 0; i <= 10; ++i) track.append(0.1 * i, i * 0.5, 0.0);
    for (int i = 0; i <= 10; ++i) track.append(6.0 + 0.1 * i, 30.0 + i * 0.5, 0.0);  // 5 s gap
    const auto parts = filter_quality(track, 1.0);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0].size(), 11u);
    EXPECT_EQ(parts[1].size(), 11u);
}

TEST(FilterQuality, DropsBadQualityRuns) {
    SampledTrack track;
    // 30 samples, quality pattern: 10 good, 5 bad, 10 good, 5 bad.
    for (int i = 0; i < 30; ++i) {
        track.append(0.1 * i, i * 1.0, 0.0);
        const bool good = (i < 10) || (i >= 15 && i < 25);
        track.quality.push_back(good ? 1 : 0);
    }
    const auto parts = filter_quality(track, 10.0);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_EQ(parts[0].size(), 10u);
    EXPECT_EQ(parts[1].size(), 10u);
    // Quality column preserved in the slices.
    EXPECT_TRUE(parts[0].has_quality());
    // No sub-track bridges the removed region.
    EXPECT_LT(parts[0].time.back(), 1.0 + 1e-12);
    EXPECT_GT(parts[1].time.front(), 1.4 - 1e-12);
}

TEST(FilterQuality, QualityIgnoredOnRequest) {
    SampledTrack track;
    for (int i = 0; i < 10; ++i) {
        track.append(0.1 * i, i * 1.0, 0.0);
        track.quality.push_back(i % 2);
    }
    EXPECT_EQ(filter_quality(track, 10.0, false).size(), 1u);
    EXPECT_EQ(filter_quality(track, 10.0, true).size(), 5u);
}

TEST(ArcLength, StraightTrackLengthAndInverse) {
    const SampledTrack track = uniform_track(10.0, 10.0, 50.0);
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const ArcLengthTable table(traj);
    EXPECT_NEAR(table.total(), 100.0, 1e-9);
    EXPECT_NEAR(table.arclength_at_time(5.0), 50.0, 1e-9);
    EXPECT_NEAR(table.time_at_arclength(50.0), 5.0, 1e-9);
    EXPECT_NEAR(table.time_at_arclength(73.0), 7.3, 1e-9);
}

TEST(ArcLength, CircleArcLength) {
    const testutil::Circle circle{20.0, 0.5};
    const SampledTrack track =
        testutil::sample_track([&](double t) { return circle.at(t).position; }, 0.0, 10.0, 100.0);
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const ArcLengthTable table(traj);
    EXPECT_NEAR(table.total(), 100.0, 1e-3);  // interpolation-limited
}

TEST(SegmentOverlapping, TooShortTrajectoryYieldsNothing) {
    const SampledTrack track = uniform_track(1.0, 4.0, 25.0);  // 4 m
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    EXPECT_TRUE(segment_overlapping(traj, 5.0, 150.0, 5.0).empty());
}

TEST(SegmentOverlapping, TwentyMeterWindowFamily) {
    const SampledTrack track = uniform_track(1.0, 20.0, 25.0);  // 20 m at 1 m/s
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const auto segments = segment_overlapping(traj, 10.0, 10.0, 5.0);
    ASSERT_EQ(segments.size(), 3u);
    EXPECT_NEAR(segments[0].s_begin, 0.0, 1e-9);
    EXPECT_NEAR(segments[1].s_begin, 5.0, 1e-9);
    EXPECT_NEAR(segments[2].s_begin, 10.0, 1e-9);
    for (const auto& seg : segments) EXPECT_NEAR(seg.length(), 10.0, 1e-9);
    // Times follow from constant speed 1 m/s.
    EXPECT_NEAR(segments[1].t_begin, 5.0, 1e-6);
    EXPECT_NEAR(segments[1].t_end, 15.0, 1e-6);
}

TEST(SegmentOverlapping, SweepsLengthsInStrideIncrements) {
    const SampledTrack track = uniform_track(1.0, 20.0, 25.0);
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const auto segments = segment_overlapping(traj, 5.0, 15.0, 5.0);
    // starts 0,5,10,15 with lengths 5..15: (0:{5,10,15})(5:{5,10,15})(10:{5,10})(15:{5}).
    EXPECT_EQ(segments.size(), 9u);
    double covered_max = 0.0;
    for (const auto& seg : segments) {
        EXPECT_GE(seg.length(), 5.0 - 1e-9);
        EXPECT_LE(seg.length(), 15.0 + 1e-9);
        covered_max = std::max(covered_max, seg.s_end);
    }
    EXPECT_NEAR(covered_max, 20.0, 1e-9);
}

TEST(SegmentOverlapping, EveryInteriorPointCovered) {
    const SampledTrack track = uniform_track(2.0, 40.0, 25.0);  // 80 m
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const double max_len = 20.0;
    const auto segments = segment_overlapping(traj, 5.0, max_len, 5.0);
    const ArcLengthTable table(traj);
    for (double s = 0.0; s <= table.total() - max_len; s += 1.0) {
        bool covered = false;
        for (const auto& seg : segments)
            covered |= (seg.s_begin <= s && s <= seg.s_end);
        EXPECT_TRUE(covered) << "arc position " << s;
    }
}

TEST(EvaluateSegment, StraightSegmentStats) {
    const SampledTrack track = uniform_track(10.0, 10.0, 50.0);
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const auto segments = segment_overlapping(traj, 50.0, 50.0, 50.0);
    ASSERT_FALSE(segments.empty());
    const SegmentStats stats = evaluate_segment(traj, test_vehicle(), segments.front());
    EXPECT_NEAR(stats.arc_length, 50.0, 1e-6);
    EXPECT_LT(stats.max_abs_a_lat, 1e-6);
    EXPECT_LT(stats.endpoint_error, 1e-6);
    EXPECT_FALSE(stats.max_speed_error_kmh.has_value());
}

TEST(EvaluateSegment, SpeedErrorColumn) {
    const SampledTrack track = uniform_track(10.0, 10.0, 50.0);
    const SmoothTrajectory traj = fit_c2(track, 0.0);
    const auto segments = segment_overlapping(traj, 50.0, 50.0, 50.0);
    const std::vector<double> t{1.0, 2.0, 3.0, 9.9};
    const std::vector<double> est{10.0, 10.0, 10.0, 10.0};
    const std::vector<double> ref{10.0, 10.5, 10.2, 20.0};  // t=9.9 is outside segment 0
    SpeedReference sr{t, est, ref};
    const SegmentStats stats = evaluate_segment(traj, test_vehicle(), segments.front(), 1e-3, &sr);
    ASSERT_TRUE(stats.max_speed_error_kmh.has_value());
    EXPECT_NEAR(*stats.max_speed_error_kmh, 0.5 * 3.6, 1e-9);
}

TEST(BinAxis, HalfOpenCellsClosedTop) {
    const BinAxis ax = BinAxis::uniform("v", 0.0, 6.0, 12);
    EXPECT_EQ(ax.bin_of(0.0).value(), 0u);
    EXPECT_EQ(ax.bin_of(0.499).value(), 0u);
    EXPECT_EQ(ax.bin_of(0.5).value(), 1u);
    EXPECT_EQ(ax.bin_of(6.0).value(), 11u);  // top edge closed
    EXPECT_FALSE(ax.bin_of(-0.01).has_value());
    EXPECT_FALSE(ax.bin_of(6.01).has_value());
}

TEST(EndpointErrorMap, ConstantErrorFillsCells) {
    std::vector<SegmentStats> segments;
    for (int i = 0; i < 24; ++i) {
        SegmentStats s;
        s.max_abs_a_lat = 0.25 + 0.2 * i;
        s.max_abs_a_lon = 0.125 + 0.1 * (i % 10);
        s.endpoint_error = 2.0;
        segments.push_back(s);
    }
    const BinnedMap map = endpoint_error_map(segments, SegmentAxis::MaxAbsALat,
                                             default_a_lat_axis(), SegmentAxis::MaxAbsALon,
                                             default_a_lon_axis());
    std::size_t populated = 0;
    for (std::size_t k = 0; k < map.value.size(); ++k) {
        if (map.count[k] == 0) continue;
        ++populated;
        EXPECT_DOUBLE_EQ(map.value[k], 2.0);
    }
    EXPECT_GT(populated, 0u);
}

TEST(EndpointErrorMap, StraightSegmentsPopulateLowestLatRow) {
    std::vector<SegmentStats> segments;
    for (int i = 0; i < 10; ++i) {
        SegmentStats s;
        s.max_abs_a_lat = 1e-4;
        s.max_abs_a_lon = 0.3 + 0.25 * (i % 8);
        s.endpoint_error = 1.0;
        segments.push_back(s);
    }
    const BinnedMap map = endpoint_error_map(segments, SegmentAxis::MaxAbsALat,
                                             default_a_lat_axis(), SegmentAxis::MaxAbsALon,
                                             default_a_lon_axis());
    for (std::size_t iy = 0; iy < map.ax_y.bins(); ++iy)
        for (std::size_t ix = 1; ix < map.ax_x.bins(); ++ix)
            EXPECT_EQ(map.count[map.index(ix, iy)], 0u);
}

TEST(EndpointErrorMap, CellMeanAndCount) {
    std::vector<SegmentStats> segments(2);
    segments[0].max_abs_a_lat = 0.1;
    segments[0].max_abs_a_lon = 0.1;
    segments[0].endpoint_error = 1.0;
    segments[1].max_abs_a_lat = 0.2;
    segments[1].max_abs_a_lon = 0.2;
    segments[1].endpoint_error = 3.0;
    const BinnedMap map = endpoint_error_map(segments, SegmentAxis::MaxAbsALat,
                                             default_a_lat_axis(), SegmentAxis::MaxAbsALon,
                                             default_a_lon_axis());
    const std::size_t k = map.index(0, 0);
    EXPECT_EQ(map.count[k], 2u);
    EXPECT_DOUBLE_EQ(map.value[k], 2.0);
}

TEST(UnderestimationMap, ExactEstimateIsZeroEverywhere) {
    std::vector<double> ref, est, xs, ys;
    for (int i = 0; i < 200; ++i) {
        ref.push_back(10.0 + (i % 7));
        est.push_back(ref.back());
        xs.push_back(0.001 * (i % 40));
        ys.push_back(25.0 + (i % 30));
    }
    const BinnedMap map = underestimation_map(ref, est, xs, ys, default_curvature_axis(),
                                              default_speed_axis(), 0.03);
    for (std::size_t k = 0; k < map.value.size(); ++k) {
        if (map.count[k] > 0) EXPECT_DOUBLE_EQ(map.value[k], 0.0);
    }
}

TEST(UnderestimationMap, UniformTenPercentUnderestimate) {
    std::vector<double> ref, est, xs, ys;
    for (int i = 0; i < 200; ++i) {
        ref.push_back(10.0 + (i % 7));
        est.push_back(0.9 * ref.back());
        xs.push_back(0.001 * (i % 40));
        ys.push_back(25.0 + (i % 30));
    }
    const BinnedMap map = underestimation_map(ref, est, xs, ys, default_curvature_axis(),
                                              default_speed_axis(), 0.03);
    for (std::size_t k = 0; k < map.value.size(); ++k) {
        if (map.count[k] > 0) EXPECT_DOUBLE_EQ(map.value[k], 100.0);
    }
}

TEST(UnderestimationMap, HalfAndHalfCell) {
    // One cell, half the samples at 0.95 ref, half exact: 50 %.
    std::vector<double> ref, est, xs, ys;
    for (int i = 0; i < 10; ++i) {
        ref.push_back(20.0);
        est.push_back(i % 2 == 0 ? 19.0 : 20.0);  // 5 % under vs exact
        xs.push_back(0.01);
        ys.push_back(30.0);
    }
    const BinnedMap map = underestimation_map(ref, est, xs, ys, default_curvature_axis(),
                                              default_speed_axis(), 0.03);
    const auto bx = map.ax_x.bin_of(0.01).value();
    const auto by = map.ax_y.bin_of(30.0).value();
    EXPECT_DOUBLE_EQ(map.value[map.index(bx, by)], 50.0);
    EXPECT_EQ(map.count[map.index(bx, by)], 10u);
}

TEST(EvaluateSegment, EndpointErrorInvariantUnderRigidTransforms) {
    // Rotating and translating the whole recording must not change E.
    const testutil::Circle circle{25.0, 0.4};
    const double angle = 1.1;
    const Vec2 shift{300.0, -120.0};
    SampledTrack base, moved;
    for (int i = 0; i <= 800; ++i) {
        const double t = 0.01 * i;
        const Vec2 p = circle.at(t).position;
        base.append(t, p.x, p.y);
        const Vec2 q = rotate(p, angle) + shift;
        moved.append(t, q.x, q.y);
    }
    const SmoothTrajectory traj_a = fit_c2(base, 0.0);
    const SmoothTrajectory traj_b = fit_c2(moved, 0.0);
    const auto segs_a = segment_overlapping(traj_a, 40.0, 40.0, 40.0);
    const auto segs_b = segment_overlapping(traj_b, 40.0, 40.0, 40.0);
    ASSERT_EQ(segs_a.size(), segs_b.size());
    ASSERT_FALSE(segs_a.empty());
    for (std::size_t i = 0; i < segs_a.size(); ++i) {
        const double ea = evaluate_segment(traj_a, test_vehicle(), segs_a[i]).endpoint_error;
        const double eb = evaluate_segment(traj_b, test_vehicle(), segs_b[i]).endpoint_error;
        EXPECT_NEAR(ea, eb, 1e-8 + 1e-3 * ea);
    }
}

TEST(BinnedMaps, MassConservation) {
    // Count-weighted average over cells equals the unbinned mean.
    std::vector<double> xs, ys, vs;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> ux(0.0, 0.05);
    std::uniform_real_distribution<double> uy(20.0, 60.0);
    std::uniform_real_distribution<double> uv(0.0, 5.0);
    double sum = 0.0;
    for (int i = 0; i < 5000; ++i) {
        xs.push_back(ux(rng));
        ys.push_back(uy(rng));
        vs.push_back(uv(rng));
        sum += vs.back();
    }
    const BinnedMap map =
        binned_mean(xs, ys, vs, default_curvature_axis(), default_speed_axis());
    const double global = sum / 5000.0;
    EXPECT_NEAR(count_weighted_mean(map), global, 1e-12 * std::abs(global));
    std::size_t total = 0;
    for (auto c : map.count) total += c;
    EXPECT_EQ(total, 5000u);
}
