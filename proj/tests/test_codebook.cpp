#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "mmsounder/codebook.hpp"
#include "oracles.hpp"

using namespace mmsounder;

namespace {

Codebook default_codebook() { return Codebook::make(60.0, 200, BeamType::rx(2)); }

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

Direction random_direction(std::mt19937_64& rng, double el_span = 60.0) {
    std::uniform_real_distribution<double> az(-180.0, 180.0);
    std::uniform_real_distribution<double> el(-el_span / 2.0, el_span / 2.0);
    return {az(rng), el(rng)};
}

}  // namespace

TEST_CASE("beam tables match the measured module characteristics") {
    CHECK(BeamType::tx(1).beamwidth_3db_deg == 7.0);
    CHECK(BeamType::tx(1).boresight_gain_db == 59.1);
    CHECK(BeamType::tx(3).beamwidth_3db_deg == 54.1);
    CHECK(BeamType::tx(3).boresight_gain_db == 36.8);
    CHECK(BeamType::rx(2).beamwidth_3db_deg == 16.8);
    CHECK(BeamType::rx(2).boresight_gain_db == 43.3);
    CHECK(BeamType::rx(4).boresight_gain_db == 30.3);
    CHECK_THROWS_AS(BeamType::tx(0), std::invalid_argument);
    CHECK_THROWS_AS(BeamType::rx(5), std::invalid_argument);
}

TEST_CASE("tessellate_segment: default 200-cell segment") {
    const auto dirs = tessellate_segment(60.0, 200);
    REQUIRE(dirs.size() == 200);

    // 50 directions per azimuthal quadrant.
    std::array<int, 4> quadrant{};
    for (const auto& d : dirs) {
        for (int s = 0; s < 4; ++s) {
            const double rel = wrap_deg(d.azimuth_deg - 90.0 * s);
            if (rel > -45.0 && rel <= 45.0) quadrant[static_cast<std::size_t>(s)]++;
        }
    }
    for (int s = 0; s < 4; ++s) CHECK(quadrant[static_cast<std::size_t>(s)] == 50);

    // No duplicate directions.
    std::set<std::pair<double, double>> unique;
    for (const auto& d : dirs) unique.insert({d.azimuth_deg, d.elevation_deg});
    CHECK(unique.size() == 200);

    // Five rows at band centers across +/-30 deg.
    std::set<double> elevations;
    for (const auto& d : dirs) elevations.insert(d.elevation_deg);
    CHECK(elevations == std::set<double>{-24.0, -12.0, 0.0, 12.0, 24.0});
}

TEST_CASE("tessellate_segment: four cells degenerate to the sector boresights") {
    const auto dirs = tessellate_segment(60.0, 4);
    REQUIRE(dirs.size() == 4);
    std::set<double> azimuths;
    for (const auto& d : dirs) {
        CHECK(d.elevation_deg == 0.0);
        azimuths.insert(d.azimuth_deg);
    }
    CHECK(azimuths == std::set<double>{-180.0, -90.0, 0.0, 90.0});
}

TEST_CASE("tessellate_segment: in-row nearest-neighbor spacing is uniform") {
    const auto dirs = tessellate_segment(60.0, 200);
    // Group by row, sort by azimuth, compare consecutive great-circle gaps.
    std::map<double, std::vector<double>> rows;
    for (const auto& d : dirs) rows[d.elevation_deg].push_back(d.azimuth_deg);
    for (auto& [el, azs] : rows) {
        std::sort(azs.begin(), azs.end());
        REQUIRE(azs.size() == 40);
        const double expected =
            angular_distance_deg({azs[0], el}, {azs[1], el});
        for (std::size_t i = 1; i + 1 < azs.size(); ++i) {
            const double gap = angular_distance_deg({azs[i], el}, {azs[i + 1], el});
            CAPTURE(el);
            CAPTURE(i);
            REQUIRE(std::abs(gap - expected) < 1e-6);
        }
    }
}

TEST_CASE("tessellate_segment: validation") {
    CHECK_THROWS_AS(tessellate_segment(60.0, 6), std::invalid_argument);    // not /4
    CHECK_THROWS_AS(tessellate_segment(60.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(tessellate_segment(0.0, 200), std::invalid_argument);
    CHECK_THROWS_AS(tessellate_segment(91.0, 200), std::invalid_argument);
    CHECK_NOTHROW(tessellate_segment(90.0, 200));  // +/-45 deg variant
}

TEST_CASE("assign_sectors: boundaries and balance") {
    const auto cb = default_codebook();
    REQUIRE(cb.cells_total() == 200);
    REQUIRE(cb.beams_per_sector() == 50);

    std::array<std::size_t, 4> counts{};
    for (const auto& b : cb.beams()) {
        counts[static_cast<std::size_t>(b.sector)]++;
        // Beam azimuth stays within +/-45 deg of its sector boresight.
        const double rel = wrap_deg(b.center.azimuth_deg - 90.0 * b.sector);
        CHECK(rel > -45.0 - 1e-12);
        CHECK(rel <= 45.0 + 1e-12);
    }
    for (auto c : counts) CHECK(c == 50);

    // Interior and boundary assignments.
    auto sector_of = [&](double az) {
        for (int s = 0; s < 4; ++s) {
            const double rel = wrap_deg(az - 90.0 * s);
            if (rel > -45.0 && rel <= 45.0) return s;
        }
        return -1;
    };
    CHECK(sector_of(10.0) == 0);
    CHECK(sector_of(45.0) == 0);  // boundary goes with the lower sector
    CHECK(sector_of(46.0) == 1);
    CHECK(sector_of(135.0) == 1);
    CHECK(sector_of(-135.0) == 2);
}

TEST_CASE("codebook: 90-degree rotation maps each sector onto the next, exactly") {
    const auto cb = default_codebook();
    const std::size_t per = cb.beams_per_sector();
    for (std::size_t i = 0; i < 3 * per; ++i) {
        const Beam& beam = cb.beams()[i];
        const Beam& next = cb.beams()[i + per];
        CAPTURE(i);
        REQUIRE(wrap_deg(beam.center.azimuth_deg + 90.0) == next.center.azimuth_deg);
        REQUIRE(beam.center.elevation_deg == next.center.elevation_deg);
    }
}

TEST_CASE("beam_gain: anchored to boresight gain and 3 dB width") {
    const BeamType type = BeamType::rx(2);  // 16.8 deg, 43.3 dB
    const Direction center{0.0, 0.0};

    CHECK(beam_gain_db(type, center, center) == doctest::Approx(43.3).epsilon(1e-12));
    // Half the 3 dB width off boresight loses exactly 3 dB.
    CHECK(beam_gain_db(type, center, {8.4, 0.0}) == doctest::Approx(40.3).epsilon(1e-9));
    // Far off boresight clamps at the 30 dB sidelobe floor.
    CHECK(beam_gain_db(type, center, {168.0, 0.0}) == doctest::Approx(13.3).epsilon(1e-9));

    // Monotone non-increasing in offset angle until the floor.
    std::mt19937_64 rng = rng_for(11);
    std::uniform_real_distribution<double> psi_dist(0.0, 60.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = psi_dist(rng), b = psi_dist(rng);
        if (a > b) std::swap(a, b);
        REQUIRE(beam_gain_db(type, center, {a, 0.0}) >= beam_gain_db(type, center, {b, 0.0}) - 1e-12);
    }
}

TEST_CASE("nearest_beam: exact centers, ties, and the brute-force oracle") {
    const auto cb = default_codebook();

    for (std::size_t i : {std::size_t{0}, std::size_t{24}, std::size_t{111}, std::size_t{199}}) {
        const Beam& b = cb.beams()[i];
        CHECK(cb.nearest_beam(b.center).index == i);
    }

    // Midpoint between two same-row neighbors resolves to the lower index.
    const Beam& b0 = cb.beams()[0];
    const Beam* right = nullptr;
    for (const auto& b : cb.beams())
        if (b.center.elevation_deg == b0.center.elevation_deg &&
            b.center.azimuth_deg == b0.center.azimuth_deg + cb.azimuth_pitch_deg())
            right = &b;
    REQUIRE(right != nullptr);
    const Direction midpoint{b0.center.azimuth_deg + cb.azimuth_pitch_deg() / 2.0,
                             b0.center.elevation_deg};
    const Beam& tie = cb.nearest_beam(midpoint);
    CHECK(tie.index == std::min(b0.index, right->index));

    std::mt19937_64 rng = rng_for(404);
    for (int trial = 0; trial < 1000; ++trial) {
        const Direction dir = random_direction(rng);
        REQUIRE(cb.nearest_beam(dir).index == oracles::brute_nearest_beam(cb, dir).index);
    }
}

TEST_CASE("codebook: every segment direction falls inside a 3 dB footprint") {
    const auto cb = default_codebook();
    const double half_width = BeamType::rx(2).beamwidth_3db_deg / 2.0;  // 8.4 deg
    std::mt19937_64 rng = rng_for(500);
    for (int trial = 0; trial < 1000; ++trial) {
        const Direction dir = random_direction(rng, 60.0);
        const Beam& nearest = cb.nearest_beam(dir);
        REQUIRE(angular_distance_deg(nearest.center, dir) <= half_width + 1e-9);
    }
}

TEST_CASE("codebook: csv round trip") {
    const auto cb = default_codebook();
    const auto path = std::filesystem::temp_directory_path() / "mmsounder_cb_test.csv";
    cb.save_csv(path);
    const auto loaded = Codebook::load_csv(path);

    REQUIRE(loaded.cells_total() == cb.cells_total());
    CHECK(loaded.azimuth_pitch_deg() == cb.azimuth_pitch_deg());
    CHECK(loaded.elevation_rows() == cb.elevation_rows());
    CHECK(loaded.segment_elevation_span_deg() == cb.segment_elevation_span_deg());
    for (std::size_t i = 0; i < cb.cells_total(); ++i) {
        const Beam& a = cb.beams()[i];
        const Beam& b = loaded.beams()[i];
        CAPTURE(i);
        REQUIRE(a.index == b.index);
        REQUIRE(a.sector == b.sector);
        REQUIRE(a.beam_type.id == b.beam_type.id);
        REQUIRE(std::abs(a.center.azimuth_deg - b.center.azimuth_deg) < 1e-6);
        REQUIRE(std::abs(a.center.elevation_deg - b.center.elevation_deg) < 1e-6);
    }
    std::filesystem::remove(path);
}

TEST_CASE("codebook: hexagon geometry for plotting") {
    const auto cb = default_codebook();
    CHECK(cb.azimuth_pitch_deg() == doctest::Approx(9.0));
    CHECK(cb.hex_circumradius_deg() == doctest::Approx(9.0 / std::sqrt(3.0)));
}
