#include "mmsounder/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mmsounder {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kMinHeadingDisplacementM = 0.1;
}  // namespace

void Trajectory::validate() const {
    if (waypoints.empty()) throw std::invalid_argument("trajectory: needs at least one waypoint");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        if (!(waypoints[i].t_s > waypoints[i - 1].t_s))
            throw std::invalid_argument("trajectory: timestamps must be strictly increasing");
}

double distance_3d_m(const EnuPosition& a, const EnuPosition& b) {
    const double de = b.east_m - a.east_m;
    const double dn = b.north_m - a.north_m;
    const double du = b.up_m - a.up_m;
    return std::sqrt(de * de + dn * dn + du * du);
}

double horizontal_distance_m(const EnuPosition& a, const EnuPosition& b) {
    const double de = b.east_m - a.east_m;
    const double dn = b.north_m - a.north_m;
    return std::sqrt(de * de + dn * dn);
}

double bearing_deg(const EnuPosition& a, const EnuPosition& b) {
    return wrap_deg(std::atan2(b.east_m - a.east_m, b.north_m - a.north_m) * kRadToDeg);
}

EnuPosition interpolate_position(const Trajectory& traj, double t_s) {
    traj.validate();
    const auto& wp = traj.waypoints;
    if (wp.size() == 1) return wp.front().position;  // static: holds for all t
    if (t_s < wp.front().t_s || t_s > wp.back().t_s)
        throw std::out_of_range("interpolate_position: time outside trajectory span");

    auto hi = std::lower_bound(wp.begin(), wp.end(), t_s,
                               [](const Waypoint& w, double t) { return w.t_s < t; });
    if (hi == wp.begin()) return wp.front().position;
    if (hi == wp.end()) return wp.back().position;
    const auto& b = *hi;
    const auto& a = *(hi - 1);
    const double f = (t_s - a.t_s) / (b.t_s - a.t_s);
    return {a.position.east_m + f * (b.position.east_m - a.position.east_m),
            a.position.north_m + f * (b.position.north_m - a.position.north_m),
            a.position.up_m + f * (b.position.up_m - a.position.up_m)};
}

double heading_from_gps(const std::vector<GpsFix>& fixes, double t_s) {
    if (fixes.size() < 2)
        throw std::invalid_argument("heading_from_gps: needs at least two fixes");
    if (t_s < fixes.front().t_s || t_s > fixes.back().t_s)
        throw std::out_of_range("heading_from_gps: time outside fix span");

    // Nearest fix, then a +/-2 fix window clamped at the log edges.
    std::size_t nearest = 0;
    double best_dt = std::abs(fixes[0].t_s - t_s);
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        const double dt = std::abs(fixes[i].t_s - t_s);
        if (dt < best_dt) {
            best_dt = dt;
            nearest = i;
        }
    }
    const std::size_t lo = nearest >= 2 ? nearest - 2 : 0;
    const std::size_t hi = std::min(nearest + 2, fixes.size() - 1);

    const auto& p0 = fixes[lo].position;
    const auto& p1 = fixes[hi].position;
    if (horizontal_distance_m(p0, p1) < kMinHeadingDisplacementM)
        throw StationaryError("heading_from_gps: displacement under 0.1 m, heading undefined");
    return bearing_deg(p0, p1);
}

double trajectory_heading(const Trajectory& traj, double t_s) {
    if (traj.heading_override_deg) return wrap_deg(*traj.heading_override_deg);
    const auto& wp = traj.waypoints;
    if (wp.size() < 2)
        throw StationaryError("trajectory_heading: static trajectory without heading override");
    if (t_s < wp.front().t_s || t_s > wp.back().t_s)
        throw std::out_of_range("trajectory_heading: time outside trajectory span");

    auto hi = std::upper_bound(wp.begin(), wp.end(), t_s,
                               [](double t, const Waypoint& w) { return t < w.t_s; });
    if (hi == wp.end()) hi = wp.end() - 1;
    if (hi == wp.begin()) hi = wp.begin() + 1;
    const auto& b = *hi;
    const auto& a = *(hi - 1);
    if (horizontal_distance_m(a.position, b.position) < kMinHeadingDisplacementM)
        throw StationaryError("trajectory_heading: segment too short, heading undefined");
    return bearing_deg(a.position, b.position);
}

Direction los_direction(const EnuPosition& rx_pos, double rx_heading_deg,
                        const EnuPosition& tx_pos) {
    const double horiz = horizontal_distance_m(rx_pos, tx_pos);
    const double du = tx_pos.up_m - rx_pos.up_m;
    if (horiz == 0.0 && du == 0.0)
        throw std::invalid_argument("los_direction: coincident positions");
    const double az = wrap_deg(bearing_deg(rx_pos, tx_pos) - rx_heading_deg);
    const double el = std::atan2(du, horiz) * kRadToDeg;
    return {az, el};
}

}  // namespace mmsounder
