#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "vkin/errors.hpp"
#include "vkin/forward_model.hpp"
#include "vkin/steering.hpp"
#include "vkin/trajectory.hpp"

// CSV boundary of the toolset.  Comma separated, mandatory header row, '.'
// decimal separator, LF line endings, UTF-8.  Columns carry SI units (m, s,
// m/s, rad); steering wheel angles are the one exception and their columns
// say so (delta_swa_deg).  All numbers are written with 9 significant digits
// so identical inputs produce byte-identical outputs.

namespace vkin::csv {

/// Formats a double with 9 significant digits, locale-independent.
inline std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // collapse negative zero
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

/// Numeric table: header names plus row-major double cells.
struct Table {
    std::string origin;  // file name for diagnostics
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::size_t require_column(std::string_view name) const {
        if (auto c = column(name)) return *c;
        throw ParseError(origin + ": missing required column '" + std::string(name) + "'");
    }

    std::vector<double> values(std::size_t col) const {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[col]);
        return out;
    }
};

namespace detail {

inline double parse_number(std::string_view field, const std::string& origin, std::size_t line) {
    // Trim surrounding blanks; from_chars is strict about leading spaces.
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
    if (field.empty()) return std::numeric_limits<double>::quiet_NaN();  // optional cell
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError(origin + ":" + std::to_string(line) + ": not a number: '" +
                         std::string(field) + "'");
    return v;
}

inline double require_finite(double v, const std::string& origin, std::size_t line,
                             const std::string& column) {
    if (!std::isfinite(v))
        throw ParseError(origin + ":" + std::to_string(line) + ": column '" + column +
                         "' must hold a finite number");
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace detail

/// Parses CSV text.  Line numbers in diagnostics are 1-based and include the
/// header line.
inline Table parse_table(std::string_view text, const std::string& origin) {
    Table table;
    table.origin = origin;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_fields(line);
        if (table.header.empty()) {
            for (const auto f : fields) table.header.emplace_back(f);
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto f : fields) row.push_back(detail::parse_number(f, origin, line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ParseError(origin + ": missing header row");
    return table;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Table read_table(const std::string& path) { return parse_table(read_text(path), path); }

/// Writes the whole content in one go; nothing is created before the content
/// is complete, so failed pipelines never leave partial outputs behind.
inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ParseError(path + ": write failed");
}

namespace detail {
inline std::uint8_t parse_flag(double v, const std::string& origin, std::size_t line,
                               const char* column) {
    if (v == 0.0) return 0;
    if (v == 1.0) return 1;
    throw ParseError(origin + ":" + std::to_string(line) + ": column '" + column +
                     "' must be 0 or 1");
}
}  // namespace detail

/// Reads a track file (t,x,y with optional quality and reverse flags) and
/// enforces strict timestamp monotonicity.
inline SampledTrack load_track(const std::string& path) {
    const Table table = read_table(path);
    const std::size_t ct = table.require_column("t");
    const std::size_t cx = table.require_column("x");
    const std::size_t cy = table.require_column("y");
    const auto cq = table.column("quality");
    const auto cr = table.column("reverse");

    SampledTrack track;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = i + 2;  // 1-based, after the header line
        detail::require_finite(row[ct], path, line, "t");
        if (i > 0 && !(row[ct] > track.time.back()))
            throw NonMonotoneTime(path + ":" + std::to_string(line) +
                                  ": timestamp not strictly increasing (t=" +
                                  format_number(row[ct]) + ")");
        track.append(row[ct], detail::require_finite(row[cx], path, line, "x"),
                     detail::require_finite(row[cy], path, line, "y"));
        if (cq) track.quality.push_back(detail::parse_flag(row[*cq], path, line, "quality"));
        if (cr) track.reverse.push_back(detail::parse_flag(row[*cr], path, line, "reverse"));
    }
    return track;
}

inline std::string write_track(const SampledTrack& track) {
    std::string out = "t,x,y";
    if (track.has_quality()) out += ",quality";
    if (track.has_reverse()) out += ",reverse";
    out += '\n';
    for (std::size_t i = 0; i < track.size(); ++i) {
        out += format_number(track.time[i]);
        out += ',';
        out += format_number(track.x[i]);
        out += ',';
        out += format_number(track.y[i]);
        if (track.has_quality()) {
            out += ',';
            out += track.quality[i] ? '1' : '0';
        }
        if (track.has_reverse()) {
            out += ',';
            out += track.reverse[i] ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

/// Control input file: t, delta_swa_deg, v_lon.  Profile files qualify, so
/// `forward` can replay what `analyze` produced.
inline ControlProfile load_controls(const std::string& path, ControlInterp interp) {
    const Table table = read_table(path);
    const std::size_t ct = table.require_column("t");
    const std::size_t cd = table.require_column("delta_swa_deg");
    const std::size_t cv = table.require_column("v_lon");
    ControlProfile controls;
    controls.interp = interp;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = i + 2;
        controls.points.push_back({detail::require_finite(row[ct], path, line, "t"),
                                   detail::require_finite(row[cd], path, line, "delta_swa_deg"),
                                   detail::require_finite(row[cv], path, line, "v_lon")});
    }
    controls.validate();
    return controls;
}

/// Steering calibration pairs: delta_wheel [rad], delta_swa_deg, optional
/// `wheel` column (0 = left, 1 = right); right-wheel rows enter the fit
/// through the symmetry map (-delta, -delta_swa).
inline std::vector<SteeringPair> load_steering_pairs(const std::string& path) {
    const Table table = read_table(path);
    const std::size_t cd = table.require_column("delta_wheel");
    const std::size_t cs = table.require_column("delta_swa_deg");
    const auto cw = table.column("wheel");
    std::vector<SteeringPair> left, right;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line = i + 2;
        const bool is_right = cw && detail::parse_flag(row[*cw], path, line, "wheel");
        (is_right ? right : left)
            .push_back({detail::require_finite(row[cd], path, line, "delta_wheel"),
                        detail::require_finite(row[cs], path, line, "delta_swa_deg")});
    }
    return pool_steering_pairs(left, right);
}

inline constexpr std::string_view kProfileHeader =
    "t,x,y,v_lon,v_lat,a_lon,a_lat,kappa,heading_psi,yaw_rate,delta_swa_deg,"
    "delta_fl,delta_fr,delta_rl,delta_rr,v_fl,v_fr,v_rl,v_rr,"
    "rho_dot_fl,rho_dot_fr,rho_dot_rl,rho_dot_rr,reverse,in_stop";

inline std::string write_profile(const KinematicProfile& profile) {
    std::string out{kProfileHeader};
    out += '\n';
    for (const KinematicSample& s : profile) {
        out += format_number(s.t);
        for (double v : {s.position.x, s.position.y, s.v_lon, s.v_lat, s.a_lon, s.a_lat, s.kappa,
                         s.heading_psi, s.yaw_rate, s.delta_swa}) {
            out += ',';
            out += format_number(v);
        }
        for (const auto& w : s.wheels) {
            out += ',';
            out += format_number(w.delta);
        }
        for (const auto& w : s.wheels) {
            out += ',';
            out += format_number(w.v);
        }
        for (const auto& w : s.wheels) {
            out += ',';
            out += format_number(w.rho_dot);
        }
        out += s.reverse ? ",1" : ",0";
        out += s.in_stop ? ",1\n" : ",0\n";
    }
    return out;
}

/// Model channel by column name (the names used in profile files), for
/// comparisons against recorded reference channels.
inline std::optional<std::vector<double>> profile_channel(const KinematicProfile& profile,
                                                          std::string_view name) {
    auto collect = [&](auto&& get) {
        std::vector<double> out;
        out.reserve(profile.size());
        for (const KinematicSample& s : profile) out.push_back(get(s));
        return out;
    };
    if (name == "v_lon") return collect([](const auto& s) { return s.v_lon; });
    if (name == "a_lon") return collect([](const auto& s) { return s.a_lon; });
    if (name == "a_lat") return collect([](const auto& s) { return s.a_lat; });
    if (name == "kappa") return collect([](const auto& s) { return s.kappa; });
    if (name == "heading_psi") return collect([](const auto& s) { return s.heading_psi; });
    if (name == "yaw_rate") return collect([](const auto& s) { return s.yaw_rate; });
    if (name == "delta_swa_deg") return collect([](const auto& s) { return s.delta_swa; });
    for (int w = 0; w < 4; ++w) {
        if (name == std::string("v_") + kWheelNames[w])
            return collect([w](const auto& s) { return s.wheels[w].v; });
        if (name == std::string("delta_") + kWheelNames[w])
            return collect([w](const auto& s) { return s.wheels[w].delta; });
        if (name == std::string("rho_dot_") + kWheelNames[w])
            return collect([w](const auto& s) { return s.wheels[w].rho_dot; });
    }
    return std::nullopt;
}

/// Generic channel file: column t plus one column per named series.
struct ChannelSet {
    std::string origin;
    std::vector<double> t;
    std::vector<std::pair<std::string, std::vector<double>>> channels;

    const std::vector<double>* channel(std::string_view name) const {
        for (const auto& [n, v] : channels)
            if (n == name) return &v;
        return nullptr;
    }
};

inline ChannelSet load_channels(const std::string& path) {
    const Table table = read_table(path);
    const std::size_t ct = table.require_column("t");
    ChannelSet set;
    set.origin = path;
    set.t = table.values(ct);
    for (std::size_t i = 1; i < set.t.size(); ++i)
        if (!(set.t[i] > set.t[i - 1]))
            throw NonMonotoneTime(path + ":" + std::to_string(i + 2) +
                                  ": timestamp not strictly increasing");
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c == ct) continue;
        std::vector<double> values = table.values(c);
        for (std::size_t i = 0; i < values.size(); ++i)
            detail::require_finite(values[i], path, i + 2, table.header[c]);
        set.channels.emplace_back(table.header[c], std::move(values));
    }
    return set;
}

}  // namespace vkin::csv
