// Local ENU geometry: trajectories, GPS-rate fixes, heading estimation and
// the RX-frame direction math shared by the simulator and the analysis.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "mmsounder/codebook.hpp"

namespace mmsounder {

struct EnuPosition {
    double east_m = 0.0;
    double north_m = 0.0;
    double up_m = 0.0;
};

struct Waypoint {
    double t_s = 0.0;
    EnuPosition position;
};

// Piecewise-linear motion. A single waypoint means a fixed position.
struct Trajectory {
    std::vector<Waypoint> waypoints;
    std::optional<double> heading_override_deg;  // compass degrees, clockwise from north

    void validate() const;  // strictly increasing timestamps, >= 1 waypoint
    double start_time() const { return waypoints.front().t_s; }
    double end_time() const { return waypoints.back().t_s; }
};

struct GpsFix {
    double t_s = 0.0;
    EnuPosition position;
    double noise_sigma_m = 0.0;
};

// Thrown when a heading is requested but the platform barely moved.
struct StationaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear interpolation between the bracketing waypoints. A single-waypoint
// trajectory is static and valid for all t; otherwise times outside the
// span throw std::out_of_range.
EnuPosition interpolate_position(const Trajectory& traj, double t_s);

// Heading of motion at time t from a centered window of +/-2 fixes,
// compass degrees in [-180, 180). Throws StationaryError when the window
// displacement is under 0.1 m (heading undefined), std::out_of_range when
// t is outside the fix span, std::invalid_argument with < 2 fixes.
double heading_from_gps(const std::vector<GpsFix>& fixes, double t_s);

// Heading of the trajectory itself at time t (segment direction), honoring
// heading_override_deg. Used by the simulator, which knows ground truth.
double trajectory_heading(const Trajectory& traj, double t_s);

// Compass bearing of the horizontal vector from `a` to `b`.
double bearing_deg(const EnuPosition& a, const EnuPosition& b);

// Direction of tx as seen from an RX at rx_pos with the given heading:
// azimuth relative to the heading (wrapped to [-180, 180)), elevation from
// the horizontal plane. Throws std::invalid_argument on coincident points.
Direction los_direction(const EnuPosition& rx_pos, double rx_heading_deg,
                        const EnuPosition& tx_pos);

double distance_3d_m(const EnuPosition& a, const EnuPosition& b);
double horizontal_distance_m(const EnuPosition& a, const EnuPosition& b);

}  // namespace mmsounder
