#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "vkin/metrics.hpp"
#include "vkin/steering.hpp"

using namespace vkin;

namespace {

std::vector<SteeringPair> pairs_from_cubic(double c0, double c1, double c2, double c3,
                                           double lo, double hi, std::size_t n) {
    std::vector<SteeringPair> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        out.push_back({d, c0 + d * (c1 + d * (c2 + d * c3))});
    }
    return out;
}

}  // namespace

TEST(FitSteering, RecoversLinearMap) {
    // The 859 deg/rad slope of a typical compact-car steering train.
    const auto pairs = pairs_from_cubic(0.0, 859.0, 0.0, 0.0, -0.5, 0.5, 25);
    const SteeringPolynomial poly = fit_steering(pairs);
    EXPECT_NEAR(poly.c[0], 0.0, 1e-9);
    EXPECT_NEAR(poly.c[1], 859.0, 1e-9);
    EXPECT_NEAR(poly.c[2], 0.0, 1e-9);
    EXPECT_NEAR(poly.c[3], 0.0, 1e-9);
    EXPECT_DOUBLE_EQ(poly.delta_min, -0.5);
    EXPECT_DOUBLE_EQ(poly.delta_max, 0.5);
}

TEST(FitSteering, RecoversCubicMap) {
    const auto pairs = pairs_from_cubic(0.0, 830.0, 0.0, 50.0, -0.5, 0.5, 40);
    const SteeringPolynomial poly = fit_steering(pairs);
    EXPECT_NEAR(poly.c[0], 0.0, 1e-9);
    EXPECT_NEAR(poly.c[1], 830.0, 1e-9);
    EXPECT_NEAR(poly.c[2], 0.0, 1e-9);
    EXPECT_NEAR(poly.c[3], 50.0, 1e-9);
}

TEST(FitSteering, RecoversBiasedAsymmetricCubic) {
    const auto pairs = pairs_from_cubic(3.5, 800.0, -40.0, 120.0, -0.45, 0.55, 31);
    const SteeringPolynomial poly = fit_steering(pairs);
    EXPECT_NEAR(poly.c[0], 3.5, 1e-8);
    EXPECT_NEAR(poly.c[1], 800.0, 1e-8);
    EXPECT_NEAR(poly.c[2], -40.0, 1e-7);
    EXPECT_NEAR(poly.c[3], 120.0, 1e-7);
}

TEST(FitSteering, ExactOnAnyCubicSamplingPattern) {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<SteeringPair> pairs;
        for (int i = 0; i < 9; ++i) {
            const double d = u(rng);
            pairs.push_back({d, 850.0 * d + 30.0 * d * d * d + 1.0});
        }
        const SteeringPolynomial poly = fit_steering(pairs);
        for (const SteeringPair& p : pairs) EXPECT_NEAR(poly(p.delta_wheel), p.delta_swa, 1e-9);
    }
}

TEST(FitSteering, DegenerateDesigns) {
    EXPECT_THROW(fit_steering(pairs_from_cubic(0.0, 859.0, 0.0, 0.0, -0.5, 0.5, 3)),
                 DegenerateDesign);
    // Four pairs but only three distinct wheel angles.
    std::vector<SteeringPair> pairs{{-0.2, -171.8}, {0.0, 0.0}, {0.2, 171.8}, {0.2, 171.8}};
    EXPECT_THROW(fit_steering(pairs), DegenerateDesign);
}

TEST(FitSteering, PoolingSymmetry) {
    // Right-wheel observations obeying delta_SWA(d_FL) = -delta_SWA(-d_FR)
    // mirror onto the identical design, so left-only and pooled fits agree.
    const auto left = pairs_from_cubic(0.0, 859.0, 0.0, 25.0, -0.4, 0.4, 15);
    std::vector<SteeringPair> right;
    for (const SteeringPair& p : left) right.push_back({-p.delta_wheel, -p.delta_swa});
    const SteeringPolynomial from_left = fit_steering(left);
    const SteeringPolynomial pooled = fit_steering(pool_steering_pairs(left, right));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(pooled.c[i], from_left.c[i], 1e-9);
}

TEST(InvertSteering, LinearCase) {
    const SteeringPolynomial poly = SteeringPolynomial::linear(859.0, 0.6);
    EXPECT_NEAR(invert_steering(poly, 85.9), 0.1, 1e-12);
    EXPECT_NEAR(invert_steering(poly, 0.0), 0.0, 1e-12);
}

TEST(InvertSteering, RoundTripIdentityAcrossRange) {
    const auto pairs = pairs_from_cubic(2.0, 830.0, 10.0, 50.0, -0.5, 0.5, 30);
    const SteeringPolynomial poly = fit_steering(pairs);
    for (double d = -0.5; d <= 0.5; d += 0.01)
        EXPECT_NEAR(invert_steering(poly, poly(d)), d, 1e-10);
}

TEST(InvertSteering, OutOfRangeThrows) {
    const SteeringPolynomial poly = SteeringPolynomial::linear(859.0, 0.5);
    EXPECT_THROW(invert_steering(poly, poly(0.5) + 1.0), OutOfRange);
    EXPECT_THROW(invert_steering(poly, poly(-0.5) - 1.0), OutOfRange);
}

TEST(InvertSteering, EndpointsAreInvertible) {
    const SteeringPolynomial poly = SteeringPolynomial::linear(100.0, 0.5);
    EXPECT_NEAR(invert_steering(poly, 50.0), 0.5, 1e-12);
    EXPECT_NEAR(invert_steering(poly, -50.0), -0.5, 1e-12);
}

TEST(CompareChannels, PerfectAgreement) {
    const std::vector<double> x{0.3, -1.2, 5.5, 2.0, 0.0, 7.25};
    const ChannelComparison c = compare_channels(x, x);
    EXPECT_DOUBLE_EQ(c.mu, 0.0);
    EXPECT_DOUBLE_EQ(c.sigma, 0.0);
    ASSERT_TRUE(c.m.has_value());
    EXPECT_DOUBLE_EQ(*c.m, 1.0);
}

TEST(CompareChannels, DoubledSeries) {
    const std::vector<double> ref{1.0, 2.0, -3.0, 4.0};
    std::vector<double> est;
    for (double v : ref) est.push_back(2.0 * v);
    const ChannelComparison c = compare_channels(ref, est);
    ASSERT_TRUE(c.m.has_value());
    EXPECT_DOUBLE_EQ(*c.m, 2.0);
    EXPECT_DOUBLE_EQ(c.mu, 1.0);  // mean(ref) with est - ref = ref
}

TEST(CompareChannels, HandComputedCase) {
    const std::vector<double> ref{1.0, 2.0, 3.0};
    const std::vector<double> est{1.5, 2.5, 3.5};
    const ChannelComparison c = compare_channels(ref, est);
    EXPECT_NEAR(c.mu, 0.5, 1e-15);
    EXPECT_NEAR(c.sigma, 0.0, 1e-15);
    ASSERT_TRUE(c.m.has_value());
    EXPECT_NEAR(*c.m, 17.0 / 14.0, 1e-15);
}

TEST(CompareChannels, ZeroReferenceEnergyLeavesScaleUndefined) {
    const std::vector<double> ref{0.0, 0.0, 0.0};
    const std::vector<double> est{1.0, 2.0, 3.0};
    const ChannelComparison c = compare_channels(ref, est);
    EXPECT_FALSE(c.m.has_value());
    EXPECT_DOUBLE_EQ(c.mu, 2.0);
    EXPECT_NEAR(c.sigma, std::sqrt(2.0 / 3.0), 1e-15);
}

TEST(CompareChannels, InputValidation) {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0};
    EXPECT_THROW(compare_channels(a, b), std::invalid_argument);
    EXPECT_THROW(compare_channels(b, b), TooFewSamples);
}

TEST(CompareChannels, ScaleInvariantUnderResampling) {
    // m depends only on paired values, not on how densely they were sampled.
    std::vector<double> ref, est, ref2, est2;
    for (int i = 0; i < 50; ++i) {
        const double r = std::sin(0.1 * i) + 2.0;
        ref.push_back(r);
        est.push_back(1.3 * r);
        // duplicate every sample: same pairing, double density
        ref2.push_back(r);
        ref2.push_back(r);
        est2.push_back(1.3 * r);
        est2.push_back(1.3 * r);
    }
    const auto c1 = compare_channels(ref, est);
    const auto c2 = compare_channels(ref2, est2);
    ASSERT_TRUE(c1.m && c2.m);
    EXPECT_NEAR(*c1.m, *c2.m, 1e-14);
    EXPECT_NEAR(*c1.m, 1.3, 1e-12);
}
