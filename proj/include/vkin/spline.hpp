#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vkin/errors.hpp"

// Natural cubic spline with an optional roughness penalty, the classic
// Reinsch construction: minimize
//
//     sum_i (y_i - f(t_i))^2  +  lambda * integral f''(t)^2 dt
//
// over all functions, whose minimizer is a natural cubic spline with knots at
// the sample times.  lambda = 0 interpolates the samples exactly; growing
// lambda trades fidelity for smoothness.  Writing gamma for the second
// derivatives at the interior knots, the minimizer solves
//
//     (R + lambda * Q^T Q) gamma = Q^T y,        a = y - lambda * Q gamma,
//
// where Q holds the second-divided-difference stencils and R the overlap
// integrals of the hat basis; both are banded, so the system is a
// pentadiagonal SPD solve (tridiagonal when lambda = 0).

namespace vkin {

namespace detail {

/// In-place LDL^T solve of a symmetric positive definite pentadiagonal
/// system.  d0 is the diagonal, d1/d2 the first/second subdiagonals; the
/// right-hand side is overwritten with the solution.
inline void solve_banded_spd(std::span<const double> d0, std::span<const double> d1,
                             std::span<const double> d2, std::vector<double>& b) {
    const std::size_t m = d0.size();
    std::vector<double> diag(m), l1(m, 0.0), l2(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (i >= 2) l2[i] = d2[i - 2] / diag[i - 2];
        if (i >= 1) {
            double v = d1[i - 1];
            if (i >= 2) v -= l2[i] * diag[i - 2] * l1[i - 1];
            l1[i] = v / diag[i - 1];
        }
        double d = d0[i];
        if (i >= 1) d -= l1[i] * l1[i] * diag[i - 1];
        if (i >= 2) d -= l2[i] * l2[i] * diag[i - 2];
        diag[i] = d;
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (i >= 1) b[i] -= l1[i] * b[i - 1];
        if (i >= 2) b[i] -= l2[i] * b[i - 2];
    }
    for (std::size_t i = 0; i < m; ++i) b[i] /= diag[i];
    for (std::size_t i = m; i-- > 0;) {
        if (i + 1 < m) b[i] -= l1[i + 1] * b[i + 1];
        if (i + 2 < m) b[i] -= l2[i + 2] * b[i + 2];
    }
}

}  // namespace detail

/// One-dimensional natural cubic (smoothing) spline.  Value, first and second
/// derivative are continuous everywhere; the second derivative vanishes at
/// the boundary knots.  Evaluation outside the knot span extrapolates the
/// boundary polynomial; domain enforcement is the caller's business.
class CubicSpline {
public:
    CubicSpline() = default;

    /// Fits the spline to (knots, values) with roughness weight lambda >= 0.
    /// Knots must be strictly increasing, at least two of them.
    CubicSpline(std::vector<double> knots, std::span<const double> values, double lambda = 0.0)
        : t_(std::move(knots)) {
        const std::size_t n = t_.size();
        if (values.size() != n)
            throw std::invalid_argument("CubicSpline: knot/value count mismatch");
        if (n < 2) throw TooFewSamples("CubicSpline: need at least 2 knots");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(t_[i + 1] > t_[i]))
                throw NonMonotoneTime("CubicSpline: knots not strictly increasing at index " +
                                      std::to_string(i + 1));
        if (!(lambda >= 0.0))
            throw std::invalid_argument("CubicSpline: lambda must be non-negative");

        a_.assign(values.begin(), values.end());
        gamma_.assign(n, 0.0);
        const std::size_t m = n - 2;
        if (m == 0) return;  // two knots: a straight line, zero curvature

        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = t_[i + 1] - t_[i];

        // Column j of Q touches rows j, j+1, j+2 with (q1, q2, q3).
        std::vector<double> q1(m), q2(m), q3(m);
        for (std::size_t j = 0; j < m; ++j) {
            q1[j] = 1.0 / h[j];
            q3[j] = 1.0 / h[j + 1];
            q2[j] = -q1[j] - q3[j];
        }

        std::vector<double> d0(m), d1(m > 1 ? m - 1 : 0), d2(m > 2 ? m - 2 : 0);
        for (std::size_t j = 0; j < m; ++j) {
            d0[j] = (h[j] + h[j + 1]) / 3.0 + lambda * (q1[j] * q1[j] + q2[j] * q2[j] + q3[j] * q3[j]);
            if (j + 1 < m)
                d1[j] = h[j + 1] / 6.0 + lambda * (q2[j] * q1[j + 1] + q3[j] * q2[j + 1]);
            if (j + 2 < m) d2[j] = lambda * q3[j] * q1[j + 2];
        }

        std::vector<double> rhs(m);
        for (std::size_t j = 0; j < m; ++j)
            rhs[j] = q1[j] * a_[j] + q2[j] * a_[j + 1] + q3[j] * a_[j + 2];

        detail::solve_banded_spd(d0, d1, d2, rhs);

        for (std::size_t j = 0; j < m; ++j) gamma_[j + 1] = rhs[j];
        if (lambda > 0.0) {
            for (std::size_t j = 0; j < m; ++j) {
                a_[j] -= lambda * q1[j] * rhs[j];
                a_[j + 1] -= lambda * q2[j] * rhs[j];
                a_[j + 2] -= lambda * q3[j] * rhs[j];
            }
        }
    }

    double t_start() const { return t_.front(); }
    double t_end() const { return t_.back(); }
    std::span<const double> knots() const { return t_; }
    std::span<const double> fitted_values() const { return a_; }

    /// Evaluates value and/or derivatives at x; null outputs are skipped.
    void eval(double x, double* value, double* first, double* second) const {
        const std::size_t k = interval(x);
        const double h = t_[k + 1] - t_[k];
        const double dl = x - t_[k];        // distance from left knot
        const double dr = t_[k + 1] - x;    // distance to right knot
        const double gl = gamma_[k];
        const double gr = gamma_[k + 1];
        if (value)
            *value = gl * dr * dr * dr / (6.0 * h) + gr * dl * dl * dl / (6.0 * h) +
                     (a_[k] / h - gl * h / 6.0) * dr + (a_[k + 1] / h - gr * h / 6.0) * dl;
        if (first)
            *first = -gl * dr * dr / (2.0 * h) + gr * dl * dl / (2.0 * h) +
                     (a_[k + 1] - a_[k]) / h - (gr - gl) * h / 6.0;
        if (second) *second = (gl * dr + gr * dl) / h;
    }

    double value(double x) const {
        double v;
        eval(x, &v, nullptr, nullptr);
        return v;
    }
    double derivative(double x) const {
        double d;
        eval(x, nullptr, &d, nullptr);
        return d;
    }
    double second_derivative(double x) const {
        double s;
        eval(x, nullptr, nullptr, &s);
        return s;
    }

private:
    std::size_t interval(double x) const {
        const auto it = std::upper_bound(t_.begin(), t_.end(), x);
        const std::ptrdiff_t k = (it - t_.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
            k, 0, static_cast<std::ptrdiff_t>(t_.size()) - 2));
    }

    std::vector<double> t_;      // knots
    std::vector<double> a_;      // fitted values at knots
    std::vector<double> gamma_;  // second derivatives at knots, natural BC
};

}  // namespace vkin
