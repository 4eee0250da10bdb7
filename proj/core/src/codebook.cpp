#include "mmsounder/codebook.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mmsounder {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Vec3 {
    double x, y, z;
};

// Compass convention: azimuth clockwise from +y (north/forward).
Vec3 unit_vector(const Direction& d) {
    const double az = d.azimuth_deg * kDegToRad;
    const double el = d.elevation_deg * kDegToRad;
    return {std::sin(az) * std::cos(el), std::cos(az) * std::cos(el), std::sin(el)};
}

}  // namespace

double wrap_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < -180.0) w += 360.0;
    if (w >= 180.0) w -= 360.0;
    return w;
}

double angular_distance_deg(const Direction& a, const Direction& b) {
    const Vec3 u = unit_vector(a);
    const Vec3 v = unit_vector(b);
    const double dot = u.x * v.x + u.y * v.y + u.z * v.z;
    const Vec3 c = {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
    const double cross = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
    return std::atan2(cross, dot) / kDegToRad;
}

BeamType BeamType::tx(int id) {
    // AWA-0134 transmit module: {3 dB width deg, boresight gain dB}.
    static constexpr std::array<std::pair<double, double>, 4> table = {
        {{7.0, 59.1}, {25.0, 41.3}, {54.1, 36.8}, {80.0, 33.4}}};
    if (id < 1 || id > 4) throw std::invalid_argument("tx beam type must be 1..4");
    return {id, ArraySide::Tx, table[id - 1].first, table[id - 1].second};
}

BeamType BeamType::rx(int id) {
    // AWMF-0129 receive module: {3 dB width deg, boresight gain dB}.
    static constexpr std::array<std::pair<double, double>, 4> table = {
        {{14.2, 47.0}, {16.8, 43.3}, {18.7, 34.3}, {16.5, 30.3}}};
    if (id < 1 || id > 4) throw std::invalid_argument("rx beam type must be 1..4");
    return {id, ArraySide::Rx, table[id - 1].first, table[id - 1].second};
}

double beam_gain_db(const BeamType& type, const Direction& beam_center,
                    const Direction& direction) {
    const double psi = angular_distance_deg(beam_center, direction);
    const double ratio = 2.0 * psi / type.beamwidth_3db_deg;
    const double rolloff = std::min(3.0 * ratio * ratio, 30.0);
    return type.boresight_gain_db - rolloff;
}

std::vector<Direction> tessellate_segment(double elevation_span_deg, std::size_t cells) {
    if (cells == 0 || cells % 4 != 0)
        throw std::invalid_argument("tessellate_segment: cell count must be a positive multiple of 4");
    if (!(elevation_span_deg > 0.0) || elevation_span_deg > 90.0)
        throw std::invalid_argument("tessellate_segment: elevation span must be in (0, 90] degrees");

    // Factor cells into elevation rows x azimuth columns. Columns must stay
    // divisible by 4 so each quarter sector gets an integer share of every
    // row. Among valid factorizations pick the one whose cell aspect
    // (row pitch / azimuth pitch) is closest to the sqrt(3)/2 of a regular
    // hexagonal lattice. 200 cells over 60 deg resolve to 5 rows of 40.
    constexpr double kHexAspect = 0.8660254037844386;
    std::size_t best_rows = 0;
    double best_score = 0.0;
    for (std::size_t rows = 1; rows <= cells; ++rows) {
        if (cells % rows != 0) continue;
        const std::size_t cols = cells / rows;
        if (cols % 4 != 0) continue;
        const double aspect = (elevation_span_deg / static_cast<double>(rows)) /
                              (360.0 / static_cast<double>(cols));
        const double score = std::abs(aspect - kHexAspect);
        if (best_rows == 0 || score < best_score) {
            best_rows = rows;
            best_score = score;
        }
    }
    const std::size_t rows = best_rows;
    const std::size_t cols = cells / rows;

    const double el_pitch = elevation_span_deg / static_cast<double>(rows);
    const double az_pitch = 360.0 / static_cast<double>(cols);

    std::vector<Direction> out;
    out.reserve(cells);
    for (std::size_t r = 0; r < rows; ++r) {
        const double el =
            -0.5 * elevation_span_deg + (static_cast<double>(r) + 0.5) * el_pitch;
        const double row_offset = (r % 2 == 1) ? 0.5 * az_pitch : 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const double az = wrap_deg(static_cast<double>(c) * az_pitch + row_offset);
            out.push_back({az, el});
        }
    }
    return out;
}

Codebook Codebook::assign_sectors(const std::vector<Direction>& directions,
                                  const BeamType& type, double elevation_span_deg) {
    if (directions.empty() || directions.size() % 4 != 0)
        throw std::invalid_argument("assign_sectors: direction count must be a positive multiple of 4");

    struct Entry {
        Direction dir;
        int sector;
        double rel_az;
    };
    std::vector<Entry> entries;
    entries.reserve(directions.size());
    for (const auto& d : directions) {
        int sector = -1;
        double rel = 0.0;
        for (int s = 0; s < 4; ++s) {
            rel = wrap_deg(d.azimuth_deg - 90.0 * s);
            if (rel > -45.0 && rel <= 45.0) {
                sector = s;
                break;
            }
        }
        if (sector < 0)
            throw std::invalid_argument("assign_sectors: direction has non-finite azimuth");
        entries.push_back({d, sector, rel});
    }

    std::array<std::size_t, 4> counts{};
    for (const auto& e : entries) counts[static_cast<std::size_t>(e.sector)]++;
    const std::size_t per_sector = directions.size() / 4;
    for (int s = 0; s < 4; ++s) {
        if (counts[static_cast<std::size_t>(s)] != per_sector) {
            std::ostringstream msg;
            msg << "unbalanced-assignment: sector " << s << " has "
                << counts[static_cast<std::size_t>(s)] << " beams, expected " << per_sector;
            throw std::runtime_error(msg.str());
        }
    }

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.sector != b.sector) return a.sector < b.sector;
        if (a.dir.elevation_deg != b.dir.elevation_deg)
            return a.dir.elevation_deg < b.dir.elevation_deg;
        return a.rel_az < b.rel_az;
    });

    Codebook cb;
    cb.elevation_span_deg_ = elevation_span_deg;
    cb.beams_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i)
        cb.beams_.push_back({entries[i].dir, type, entries[i].sector, i});

    cb.elevation_rows_.clear();
    for (const auto& b : cb.beams_) cb.elevation_rows_.push_back(b.center.elevation_deg);
    std::sort(cb.elevation_rows_.begin(), cb.elevation_rows_.end());
    cb.elevation_rows_.erase(std::unique(cb.elevation_rows_.begin(), cb.elevation_rows_.end()),
                             cb.elevation_rows_.end());

    const double first_row = cb.elevation_rows_.front();
    const auto row_count = static_cast<std::size_t>(
        std::count_if(cb.beams_.begin(), cb.beams_.end(),
                      [&](const Beam& b) { return b.center.elevation_deg == first_row; }));
    cb.azimuth_pitch_deg_ = 360.0 / static_cast<double>(row_count);
    return cb;
}

Codebook Codebook::make(double elevation_span_deg, std::size_t cells, const BeamType& type) {
    return assign_sectors(tessellate_segment(elevation_span_deg, cells), type,
                          elevation_span_deg);
}

double Codebook::hex_circumradius_deg() const {
    return azimuth_pitch_deg_ / std::sqrt(3.0);
}

const Beam& Codebook::nearest_beam(const Direction& direction) const {
    if (beams_.empty()) throw std::logic_error("nearest_beam: empty codebook");
    // Distances within a nanodegree count as a tie and keep the lower
    // index; exact midpoints between cell centers land here.
    constexpr double kTieEpsilonDeg = 1e-9;
    std::size_t best = 0;
    double best_psi = angular_distance_deg(beams_[0].center, direction);
    for (std::size_t i = 1; i < beams_.size(); ++i) {
        const double psi = angular_distance_deg(beams_[i].center, direction);
        if (psi < best_psi - kTieEpsilonDeg) {
            best_psi = psi;
            best = i;
        }
    }
    return beams_[best];
}

void Codebook::save_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "index,sector,azimuth_deg,elevation_deg,beam_type\n";
    char line[160];
    for (const auto& b : beams_) {
        std::snprintf(line, sizeof(line), "%zu,%d,%.6f,%.6f,%d\n", b.index, b.sector,
                      b.center.azimuth_deg, b.center.elevation_deg, b.beam_type.id);
        out << line;
    }
}

Codebook Codebook::load_csv(const std::filesystem::path& path, ArraySide side) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open codebook: " + path.string());
    std::string header;
    std::getline(in, header);
    if (header != "index,sector,azimuth_deg,elevation_deg,beam_type")
        throw std::runtime_error("codebook csv: unexpected header in " + path.string());

    Codebook cb;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t index = 0;
        int sector = 0, type_id = 0;
        double az = 0.0, el = 0.0;
        if (std::sscanf(line.c_str(), "%zu,%d,%lf,%lf,%d", &index, &sector, &az, &el,
                        &type_id) != 5)
            throw std::runtime_error("codebook csv: malformed row: " + line);
        const BeamType type = side == ArraySide::Rx ? BeamType::rx(type_id) : BeamType::tx(type_id);
        cb.beams_.push_back({{az, el}, type, sector, index});
    }
    if (cb.beams_.empty() || cb.beams_.size() % 4 != 0)
        throw std::runtime_error("codebook csv: beam count must be a positive multiple of 4");
    std::sort(cb.beams_.begin(), cb.beams_.end(),
              [](const Beam& a, const Beam& b) { return a.index < b.index; });

    for (const auto& b : cb.beams_) cb.elevation_rows_.push_back(b.center.elevation_deg);
    std::sort(cb.elevation_rows_.begin(), cb.elevation_rows_.end());
    cb.elevation_rows_.erase(std::unique(cb.elevation_rows_.begin(), cb.elevation_rows_.end()),
                             cb.elevation_rows_.end());

    const double first_row = cb.elevation_rows_.front();
    const auto row_count = static_cast<std::size_t>(
        std::count_if(cb.beams_.begin(), cb.beams_.end(),
                      [&](const Beam& b) { return b.center.elevation_deg == first_row; }));
    cb.azimuth_pitch_deg_ = 360.0 / static_cast<double>(row_count);

    if (cb.elevation_rows_.size() > 1) {
        const double row_pitch = cb.elevation_rows_[1] - cb.elevation_rows_[0];
        cb.elevation_span_deg_ =
            cb.elevation_rows_.back() - cb.elevation_rows_.front() + row_pitch;
    }
    return cb;
}

}  // namespace mmsounder
