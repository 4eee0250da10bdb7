// Simulation scenario: carrier, radio parameters, TX/RX motion, reflectors
// and LOS blockage. Loaded from the JSON schema described in
// docs/scenario_schema.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mmsounder/codebook.hpp"
#include "mmsounder/geo.hpp"

namespace mmsounder {

// Point specular scatterer with a fixed reflection loss.
struct Reflector {
    EnuPosition position;
    double loss_db = 0.0;  // >= 0
};

struct TimeInterval {
    double start_s = 0.0;
    double end_s = 0.0;  // half-open [start, end)

    bool contains(double t) const { return t >= start_s && t < end_s; }
};

struct Scenario {
    double carrier_freq_hz = 28.3e9;
    double tx_power_dbm = -12.0;  // at the TX array input; must stay <= -12
    BeamType tx_beam_type = BeamType::tx(3);  // Type 3: wide coverage
    Direction tx_boresight;                   // global compass frame
    BeamType rx_beam_type = BeamType::rx(2);  // Type 2: sidelobe suppression
    Trajectory tx_trajectory;
    Trajectory rx_trajectory;
    std::vector<Reflector> reflectors;
    std::vector<TimeInterval> los_blocked_intervals;
    double noise_figure_db = 5.0;
    bool noise_enabled = true;  // disable for exact link-budget verification
    std::uint32_t averaging_m = 1;
    double calibration_offset_db = 0.0;
    double measurement_floor_dbm = -100.0;
    double gps_sigma_m = 0.3;  // RTK-grade position noise, per ENU axis
    std::uint64_t rng_seed = 1;

    // Throws std::invalid_argument naming the offending field path.
    void validate() const;

    bool los_clear(double t_s) const {
        for (const auto& iv : los_blocked_intervals)
            if (iv.contains(t_s)) return false;
        return true;
    }
};

// JSON file ingestion; validation errors carry the JSON field path.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace mmsounder
