// Receiver beam codebook: hexagonal tessellation of the azimuthal spherical
// segment, sector assignment across the four arrays, and beam gain patterns.
//
// Angle conventions: azimuth in degrees clockwise from the array frame's
// forward axis, stored in [-180, 180); elevation in degrees above the
// azimuth plane. The four sector boresights sit at 0, 90, 180, 270 degrees.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace mmsounder {

struct Direction {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

// Great-circle angle between two directions, degrees in [0, 180].
double angular_distance_deg(const Direction& a, const Direction& b);

// Wraps any angle to [-180, 180).
double wrap_deg(double deg);

enum class ArraySide { Tx, Rx };

// One row of the measured beam tables: 3 dB width and overall module
// boresight gain for the selectable beam types (1..4) of each array side.
struct BeamType {
    int id = 0;
    ArraySide side = ArraySide::Rx;
    double beamwidth_3db_deg = 0.0;
    double boresight_gain_db = 0.0;

    // Table lookups; id must be 1..4, otherwise std::invalid_argument.
    static BeamType tx(int id);  // 256-element transmit array
    static BeamType rx(int id);  // 64-element receive arrays
};

struct Beam {
    Direction center;       // global RX frame
    BeamType beam_type;
    int sector = 0;         // 0..3
    std::size_t index = 0;  // position in codebook order (sector-major)
};

// Pattern model anchored to the table values: quadratic main lobe
//   G(psi) = boresight_gain - 3 * (2*psi / beamwidth_3db)^2   [dB]
// clamped at boresight_gain - 30 dB (sidelobe floor).
double beam_gain_db(const BeamType& type, const Direction& beam_center,
                    const Direction& direction);
inline double beam_gain_db(const Beam& beam, const Direction& direction) {
    return beam_gain_db(beam.beam_type, beam.center, direction);
}

// Hexagon cell centers covering 360 deg azimuth and `elevation_span` degrees
// of elevation (centered on 0): rows uniformly spaced in elevation, each row
// a uniform azimuth grid, odd rows shifted by half the azimuth pitch so
// sector edges mesh without gaps. `cells` must be divisible by 4.
std::vector<Direction> tessellate_segment(double elevation_span_deg, std::size_t cells);

class Codebook {
  public:
    // Assigns each direction to the sector whose boresight is within 45 deg
    // of it; a direction exactly on a boundary goes with the sector it
    // trails (az = +45 relative -> that sector, so global az 45 -> sector 0).
    // Beams are indexed sector-major, then by (elevation row, azimuth).
    // Throws std::runtime_error if any sector would not get cells/4 beams.
    static Codebook assign_sectors(const std::vector<Direction>& directions,
                                   const BeamType& type, double elevation_span_deg);

    // tessellate_segment + assign_sectors in one step.
    static Codebook make(double elevation_span_deg, std::size_t cells, const BeamType& type);

    const std::vector<Beam>& beams() const { return beams_; }
    std::size_t cells_total() const { return beams_.size(); }
    std::size_t beams_per_sector() const { return beams_.size() / 4; }
    double segment_elevation_span_deg() const { return elevation_span_deg_; }

    // Distinct elevation row values, ascending.
    const std::vector<double>& elevation_rows() const { return elevation_rows_; }
    // Azimuth pitch within a row, degrees.
    double azimuth_pitch_deg() const { return azimuth_pitch_deg_; }
    // Circumradius of the plotted hexagon cell, degrees (pitch / sqrt(3)).
    double hex_circumradius_deg() const;

    // Beam with minimum great-circle angle to `direction`; ties go to the
    // lowest beam index.
    const Beam& nearest_beam(const Direction& direction) const;

    // CSV round trip, header: index,sector,azimuth_deg,elevation_deg,beam_type
    // Angles carry 6 fractional digits.
    void save_csv(const std::filesystem::path& path) const;
    static Codebook load_csv(const std::filesystem::path& path, ArraySide side = ArraySide::Rx);

  private:
    Codebook() = default;
    std::vector<Beam> beams_;
    std::vector<double> elevation_rows_;
    double azimuth_pitch_deg_ = 0.0;
    double elevation_span_deg_ = 0.0;
};

}  // namespace mmsounder
