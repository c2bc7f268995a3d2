#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vkin/errors.hpp"

namespace vkin {

/// One calibration observation: virtual/tire wheel angle [rad] paired with
/// the steering wheel angle [deg] read from the vehicle bus.
struct SteeringPair {
    double delta_wheel = 0.0;  ///< [rad]
    double delta_swa = 0.0;    ///< [deg]
};

/// Cubic map from a wheel steering angle delta [rad] to the steering wheel
/// angle delta_SWA [deg]:
///
///   delta_SWA = c0 + c1*delta + c2*delta^2 + c3*delta^3
///
/// The map must be strictly increasing on the declared range
/// [delta_min, delta_max] so that it can be inverted there.
struct SteeringPolynomial {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
    double delta_min = 0.0;  ///< declared wheel-angle range, lower bound [rad]
    double delta_max = 0.0;  ///< declared wheel-angle range, upper bound [rad]

    /// delta [rad] -> delta_SWA [deg]; defined for any argument, the declared
    /// range only constrains inversion.
    double operator()(double delta) const {
        return c[0] + delta * (c[1] + delta * (c[2] + delta * c[3]));
    }

    /// d(delta_SWA)/d(delta) [deg/rad].
    double derivative(double delta) const {
        return c[1] + delta * (2.0 * c[2] + delta * 3.0 * c[3]);
    }

    /// True when the derivative stays positive on [delta_min, delta_max].
    /// The derivative is a quadratic; its minimum over the interval sits at
    /// an endpoint or at the interior vertex.
    bool monotone_on_range() const {
        double lo = std::min(derivative(delta_min), derivative(delta_max));
        if (c[3] != 0.0) {
            const double vertex = -c[2] / (3.0 * c[3]);
            if (vertex > delta_min && vertex < delta_max)
                lo = std::min(lo, derivative(vertex));
        }
        return lo > 0.0;
    }

    /// Identity-like map delta_SWA = slope * delta, handy default for tests
    /// and for tools run without a calibrated vehicle.
    static SteeringPolynomial linear(double slope, double range) {
        return {{0.0, slope, 0.0, 0.0}, -range, range};
    }
};

/// Mirrors right-wheel observations through the steering symmetry
/// (delta, delta_SWA) -> (-delta, -delta_SWA) and appends them to the
/// left-wheel set, so one cubic can be fitted to both front wheels.
inline std::vector<SteeringPair> pool_steering_pairs(std::span<const SteeringPair> left,
                                                     std::span<const SteeringPair> right) {
    std::vector<SteeringPair> pooled(left.begin(), left.end());
    pooled.reserve(left.size() + right.size());
    for (const SteeringPair& p : right) pooled.push_back({-p.delta_wheel, -p.delta_swa});
    return pooled;
}

/// Ordinary least-squares cubic fit of delta_SWA over delta.  The declared
/// range of the returned polynomial is the span of the observed wheel angles.
///
/// Throws DegenerateDesign when fewer than four distinct wheel angles are
/// present (the cubic is underdetermined) or when the fitted map is not
/// strictly monotone over the data range.
inline SteeringPolynomial fit_steering(std::span<const SteeringPair> pairs) {
    const std::size_t n = pairs.size();
    if (n < 4) throw DegenerateDesign("fit_steering: need at least 4 pairs, got " + std::to_string(n));

    Eigen::MatrixXd design(n, 4);
    Eigen::VectorXd rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pairs[i].delta_wheel;
        design(i, 0) = 1.0;
        design(i, 1) = d;
        design(i, 2) = d * d;
        design(i, 3) = d * d * d;
        rhs(i) = pairs[i].delta_swa;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 4)
        throw DegenerateDesign("fit_steering: design matrix rank " + std::to_string(qr.rank()) +
                               " (need 4 distinct wheel angles)");
    const Eigen::Vector4d coef = qr.solve(rhs);

    SteeringPolynomial poly;
    poly.c = {coef(0), coef(1), coef(2), coef(3)};
    auto [lo, hi] = std::minmax_element(pairs.begin(), pairs.end(),
                                        [](const SteeringPair& a, const SteeringPair& b) {
                                            return a.delta_wheel < b.delta_wheel;
                                        });
    poly.delta_min = lo->delta_wheel;
    poly.delta_max = hi->delta_wheel;

    if (!poly.monotone_on_range())
        throw DegenerateDesign("fit_steering: fitted cubic is not strictly increasing over the data range");
    return poly;
}

/// Inverse of the steering map: the unique delta in [delta_min, delta_max]
/// with poly(delta) = delta_swa, located by safeguarded Newton/bisection to
/// better than 1e-12 rad.  Throws OutOfRange outside the image of the range.
inline double invert_steering(const SteeringPolynomial& poly, double delta_swa) {
    double lo = poly.delta_min;
    double hi = poly.delta_max;
    double flo = poly(lo) - delta_swa;
    double fhi = poly(hi) - delta_swa;
    if (flo > 0.0 || fhi < 0.0)
        throw OutOfRange("invert_steering: " + std::to_string(delta_swa) +
                         " deg outside calibrated image [" + std::to_string(poly(lo)) + ", " +
                         std::to_string(poly(hi)) + "]");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
        const double f = poly(x) - delta_swa;
        if (f == 0.0) return x;
        (f > 0.0 ? hi : lo) = x;
        const double slope = poly.derivative(x);
        double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
        if (std::abs(next - x) < 1e-13) return next;
        x = next;
    }
    return x;
}

}  // namespace vkin
