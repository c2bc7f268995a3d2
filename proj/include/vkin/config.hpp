#pragma once

#include <charconv>
#include <map>
#include <string>
#include <string_view>

#include "vkin/csv.hpp"
#include "vkin/errors.hpp"
#include "vkin/geometry.hpp"

// Vehicle description file: flat "key = value" lines with dotted section
// names, '#' comments.  Example:
//
//     wheelbase = 2.63
//     tire_radius = 0.316
//     wheel.fl.d_lat = -0.775
//     wheel.fr.d_lat = 0.775
//     wheel.rl.d_lat = -0.765
//     wheel.rr.d_lat = 0.765
//     steering.c0 = 0
//     steering.c1 = 859
//     steering.c2 = 0
//     steering.c3 = 0
//     steering.range.min = -0.55
//     steering.range.max = 0.55
//     north.x = 0
//     north.y = 1
//
// Longitudinal mount offsets default to the wheelbase on the front axle and
// zero on the rear axle; wheel.<pos>.d_lon and wheel.<pos>.tire_radius may
// override per wheel.  Lateral offsets are positive to the right.

namespace vkin {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Parses and validates a vehicle config file.  Throws ParseError with the
/// offending line or key for every failure mode.
inline VehicleGeometry load_vehicle_config(const std::string& path) {
    const std::string text = csv::read_text(path);

    std::map<std::string, double> kv;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            std::string_view(text).substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                             : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view value = detail::trim(line.substr(eq + 1));
        double v = 0.0;
        const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
        if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
            throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" +
                             std::string(value) + "'");
        if (!kv.emplace(key, v).second)
            throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }

    auto take = [&kv](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::optional<double>{};
        const double v = it->second;
        kv.erase(it);
        return std::optional<double>{v};
    };
    auto require = [&take, &path](const std::string& key) {
        const auto v = take(key);
        if (!v) throw ParseError(path + ": missing required key '" + key + "'");
        return *v;
    };

    VehicleGeometry geom;
    geom.wheelbase = require("wheelbase");
    const double tire_radius = require("tire_radius");

    for (int i = 0; i < 4; ++i) {
        const std::string prefix = std::string("wheel.") + kWheelNames[i] + ".";
        WheelMount& m = geom.wheels[i];
        m.d_lat = require(prefix + "d_lat");
        m.d_lon = take(prefix + "d_lon").value_or(i < 2 ? geom.wheelbase : 0.0);
        m.tire_radius = take(prefix + "tire_radius").value_or(tire_radius);
    }

    geom.steering.c = {require("steering.c0"), require("steering.c1"), require("steering.c2"),
                       require("steering.c3")};
    geom.steering.delta_min = require("steering.range.min");
    geom.steering.delta_max = require("steering.range.max");
    geom.north.x = take("north.x").value_or(0.0);
    geom.north.y = take("north.y").value_or(1.0);

    if (!kv.empty()) throw ParseError(path + ": unknown key '" + kv.begin()->first + "'");

    try {
        geom.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
    return geom;
}

}  // namespace vkin
