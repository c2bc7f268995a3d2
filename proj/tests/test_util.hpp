#pragma once

// Analytic fixtures and independent oracles shared by the test suites.  The
// oracles deliberately avoid the library's own code paths: dense linear
// solves instead of the banded solver, textbook formulas instead of the
// production expressions.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vkin/core_model.hpp"
#include "vkin/trajectory.hpp"
#include "vkin/vec2.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// Analytic curves with exact derivatives
// ---------------------------------------------------------------------------

/// Circle of given radius driven at angular rate omega (counterclockwise for
/// omega > 0), body speed |radius * omega|, curvature sign(omega)/radius.
struct Circle {
    double radius = 1.0;
    double omega = 1.0;
    double phase = 0.0;
    vkin::Vec2 center{};

    vkin::Pose2Derivs at(double t, bool reverse = false) const {
        const double a = omega * t + phase;
        vkin::Pose2Derivs p;
        p.position = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
        p.velocity = {-radius * omega * std::sin(a), radius * omega * std::cos(a)};
        p.acceleration = {-radius * omega * omega * std::cos(a),
                          -radius * omega * omega * std::sin(a)};
        p.reverse = reverse;
        // While reversing the sampled motion is the same; only the gear flag
        // and therefore the vehicle-front interpretation changes.
        return p;
    }
};

/// Unit-speed clothoid with curvature c*t (heading theta = c t^2 / 2).
/// Position is irrelevant for the local quantities and left at the origin.
inline vkin::Pose2Derivs clothoid_derivs(double c, double t) {
    const double theta = 0.5 * c * t * t;
    vkin::Pose2Derivs p;
    p.velocity = {std::cos(theta), std::sin(theta)};
    p.acceleration = {-c * t * std::sin(theta), c * t * std::cos(theta)};
    return p;
}

/// Plane curve with polynomial coordinates; exact derivatives by Horner.
struct PolyCurve {
    std::vector<double> cx;  // x(t) coefficients, ascending powers
    std::vector<double> cy;

    static double horner(const std::vector<double>& c, double t, int deriv) {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) {
            double factor = 1.0;
            double kk = static_cast<double>(k);
            for (int d = 0; d < deriv; ++d) factor *= kk - d;
            if (factor == 0.0) continue;
            v += c[k] * factor * std::pow(t, kk - deriv);
        }
        return v;
    }

    vkin::Pose2Derivs at(double t) const {
        vkin::Pose2Derivs p;
        p.position = {horner(cx, t, 0), horner(cy, t, 0)};
        p.velocity = {horner(cx, t, 1), horner(cy, t, 1)};
        p.acceleration = {horner(cx, t, 2), horner(cy, t, 2)};
        return p;
    }
};

// ---------------------------------------------------------------------------
// Independent curvature routes (the two other algebraic forms)
// ---------------------------------------------------------------------------

/// d/dt of the unit front tangent, from the quotient rule.
inline vkin::Vec2 tangent_time_derivative(const vkin::Pose2Derivs& p) {
    const double speed = vkin::norm(p.velocity);
    const vkin::Vec2 u = p.velocity / speed;
    const vkin::Vec2 udot =
        p.acceleration / speed - u * (vkin::dot(u, p.acceleration) / speed);
    return vkin::reverse_sign(p) * udot;
}

/// kappa as N . dT/ds, with dT/ds = Tdot / v_lon (signed path parameter).
inline double curvature_via_frame_projection(const vkin::Pose2Derivs& p) {
    const vkin::TangentFrame f = vkin::tangent_frame(p);
    const vkin::Vec2 t_dot = tangent_time_derivative(p);
    return vkin::dot(f.N, t_dot) / vkin::longitudinal_speed(p);
}

/// kappa as det[T, Tdot] / v_lon.
inline double curvature_via_unit_tangent_det(const vkin::Pose2Derivs& p) {
    const vkin::TangentFrame f = vkin::tangent_frame(p);
    return vkin::det(f.T, tangent_time_derivative(p)) / vkin::longitudinal_speed(p);
}

// ---------------------------------------------------------------------------
// Dense linear-algebra oracles
// ---------------------------------------------------------------------------

/// Gaussian elimination with partial pivoting; A is overwritten.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = A.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
        if (A[pivot][col] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        std::swap(A[col], A[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double v = b[r];
        for (std::size_t c = r + 1; c < n; ++c) v -= A[r][c] * x[c];
        x[r] = v / A[r][r];
    }
    return x;
}

/// Natural cubic interpolating spline solved densely: returns the second
/// derivatives at all knots (zero at the boundary).
inline std::vector<double> dense_natural_spline_second_derivs(const std::vector<double>& t,
                                                              const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> gamma(n, 0.0);
    if (n < 3) return gamma;
    const std::size_t m = n - 2;
    std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = j + 1;
        const double h0 = t[k] - t[k - 1];
        const double h1 = t[k + 1] - t[k];
        A[j][j] = (h0 + h1) / 3.0;
        if (j > 0) A[j][j - 1] = h0 / 6.0;
        if (j + 1 < m) A[j][j + 1] = h1 / 6.0;
        b[j] = (y[k + 1] - y[k]) / h1 - (y[k] - y[k - 1]) / h0;
    }
    const std::vector<double> g = dense_solve(std::move(A), std::move(b));
    for (std::size_t j = 0; j < m; ++j) gamma[j + 1] = g[j];
    return gamma;
}

/// First derivative of the natural spline at knot k (right-sided formula on
/// the interior, left-sided at the last knot).
inline double dense_natural_spline_deriv_at_knot(const std::vector<double>& t,
                                                 const std::vector<double>& y,
                                                 const std::vector<double>& gamma, std::size_t k) {
    const std::size_t n = t.size();
    if (k + 1 < n) {
        const double h = t[k + 1] - t[k];
        return (y[k + 1] - y[k]) / h - h * (2.0 * gamma[k] + gamma[k + 1]) / 6.0;
    }
    const double h = t[k] - t[k - 1];
    return (y[k] - y[k - 1]) / h + h * (2.0 * gamma[k] + gamma[k - 1]) / 6.0;
}

/// Smoothing-spline fitted values solved densely:
/// a = (I + lambda * Q R^{-1} Q^T)^{-1} y.
inline std::vector<double> dense_smoothing_values(const std::vector<double>& t,
                                                  const std::vector<double>& y, double lambda) {
    const std::size_t n = t.size();
    const std::size_t m = n - 2;
    if (m == 0 || lambda == 0.0) return y;

    std::vector<std::vector<double>> Q(n, std::vector<double>(m, 0.0));
    std::vector<std::vector<double>> R(m, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = j + 1;
        const double h0 = t[k] - t[k - 1];
        const double h1 = t[k + 1] - t[k];
        Q[k - 1][j] = 1.0 / h0;
        Q[k][j] = -1.0 / h0 - 1.0 / h1;
        Q[k + 1][j] = 1.0 / h1;
        R[j][j] = (h0 + h1) / 3.0;
        if (j + 1 < m) R[j][j + 1] = h1 / 6.0;
        if (j > 0) R[j][j - 1] = (t[k] - t[k - 1]) / 6.0;
    }

    // Z = R^{-1} Q^T, column by column.
    std::vector<std::vector<double>> Z(m, std::vector<double>(n, 0.0));
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<double> rhs(m);
        for (std::size_t j = 0; j < m; ++j) rhs[j] = Q[col][j];
        const std::vector<double> z = dense_solve(R, rhs);
        for (std::size_t j = 0; j < m; ++j) Z[j][col] = z[j];
    }

    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
        A[r][r] = 1.0;
        for (std::size_t c = 0; c < n; ++c) {
            double k_rc = 0.0;
            for (std::size_t j = 0; j < m; ++j) k_rc += Q[r][j] * Z[j][c];
            A[r][c] += lambda * k_rc;
        }
    }
    return dense_solve(std::move(A), y);
}

// ---------------------------------------------------------------------------
// Track builders
// ---------------------------------------------------------------------------

/// Samples a callable position(t) -> Vec2 at fixed rate over [t0, t1].
template <typename F>
vkin::SampledTrack sample_track(F&& position, double t0, double t1, double rate) {
    vkin::SampledTrack track;
    const std::size_t n = static_cast<std::size_t>(std::llround((t1 - t0) * rate));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = t0 + static_cast<double>(i) / rate;
        const vkin::Vec2 p = position(t);
        track.append(t, p.x, p.y);
    }
    return track;
}

}  // namespace testutil
