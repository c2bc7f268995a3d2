#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vkin/core_model.hpp"
#include "vkin/steering.hpp"
#include "vkin/vec2.hpp"

namespace vkin {

/// Wheel slots, also the order of all per-wheel arrays and CSV columns.
enum class Wheel : int { FL = 0, FR = 1, RL = 2, RR = 3 };

inline constexpr std::array<const char*, 4> kWheelNames{"fl", "fr", "rl", "rr"};

/// Geometric description of the vehicle: wheelbase, the four wheel mounts and
/// the steering-wheel-to-wheel-angle map.  Mount offsets follow the library
/// convention (d_lon toward the front, d_lat positive to the right).
struct VehicleGeometry {
    double wheelbase = 2.7;              ///< l > 0 [m]
    std::array<WheelMount, 4> wheels{};  ///< indexed by Wheel
    SteeringPolynomial steering;         ///< delta [rad] -> delta_SWA [deg]
    Vec2 north{0.0, 1.0};                ///< reference direction for headings

    const WheelMount& mount(Wheel w) const { return wheels[static_cast<int>(w)]; }

    /// Mount of the virtual center front wheel used by the single-track
    /// steering relation delta(l, 0).
    WheelMount center_wheel() const {
        return {wheelbase, 0.0, wheels[static_cast<int>(Wheel::FL)].tire_radius};
    }

    /// Symmetric four-wheel layout: front mounts at d_lon = wheelbase, rear
    /// at 0, left/right at -/+ track/2.
    static VehicleGeometry standard(double wheelbase, double track, double tire_radius,
                                    SteeringPolynomial steering) {
        VehicleGeometry g;
        g.wheelbase = wheelbase;
        g.steering = steering;
        g.wheels[static_cast<int>(Wheel::FL)] = {wheelbase, -track / 2.0, tire_radius};
        g.wheels[static_cast<int>(Wheel::FR)] = {wheelbase, track / 2.0, tire_radius};
        g.wheels[static_cast<int>(Wheel::RL)] = {0.0, -track / 2.0, tire_radius};
        g.wheels[static_cast<int>(Wheel::RR)] = {0.0, track / 2.0, tire_radius};
        return g;
    }

    /// Enforces the layout invariants; throws std::invalid_argument.
    void validate() const {
        if (!(wheelbase > 0.0)) throw std::invalid_argument("vehicle: wheelbase must be > 0");
        if (!(norm(north) > 0.0) || !is_finite(north))
            throw std::invalid_argument("vehicle: north vector must be nonzero and finite");
        static constexpr std::array<const char*, 4> names{"fl", "fr", "rl", "rr"};
        for (int i = 0; i < 4; ++i) {
            const WheelMount& m = wheels[i];
            if (!(m.tire_radius > 0.0))
                throw std::invalid_argument(std::string("vehicle: wheel.") + names[i] +
                                            ".tire_radius must be > 0");
            if (!std::isfinite(m.d_lon) || !std::isfinite(m.d_lat))
                throw std::invalid_argument(std::string("vehicle: wheel.") + names[i] +
                                            " offsets must be finite");
            const bool front = i < 2;
            const double want_lon = front ? wheelbase : 0.0;
            if (std::abs(m.d_lon - want_lon) > 1e-9)
                throw std::invalid_argument(std::string("vehicle: wheel.") + names[i] +
                                            ".d_lon must equal " + (front ? "wheelbase" : "0"));
            const bool left = (i % 2) == 0;
            if (left ? !(m.d_lat < 0.0) : !(m.d_lat > 0.0))
                throw std::invalid_argument(std::string("vehicle: wheel.") + names[i] +
                                            ".d_lat must be " + (left ? "negative" : "positive") +
                                            " (right-positive convention)");
        }
        if (!(steering.delta_max > steering.delta_min))
            throw std::invalid_argument("vehicle: steering range is empty");
        if (!steering.monotone_on_range())
            throw std::invalid_argument(
                "vehicle: steering polynomial not strictly increasing on its declared range");
    }
};

}  // namespace vkin
