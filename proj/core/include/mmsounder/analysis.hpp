// Measurement analysis: best-beam and boresight-beam path loss extraction,
// local-square averaging, close-in model fitting, elevation statistics and
// per-sweep heatmap export.

#pragma once

#include <filesystem>
#include <cstdint>
#include <string>
#include <vector>

#include "mmsounder/codebook.hpp"
#include "mmsounder/geo.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/sounder.hpp"

namespace mmsounder {

enum class BeamCategory { Best, Boresight };

const char* to_string(BeamCategory category);

struct PathLossSample {
    double distance_m = 0.0;  // 3D TX-RX separation
    double pathloss_db = 0.0;
    bool los = false;
    BeamCategory category = BeamCategory::Best;
    EnuPosition rx_position;
    double elevation_of_best_deg = 0.0;
};

// Close-in model fit: PL(d) = fspl(f, 1 m) + 10 n log10(d) + X_sigma.
struct CiFit {
    double n = 0.0;        // path loss exponent
    double sigma_db = 0.0; // RMS residual
    double d0_m = 1.0;
    double fspl_d0_db = 0.0;
    std::size_t sample_count = 0;
};

// Per sweep: the strongest beam and the beam nearest the geometric TX
// direction, de-embedded to path loss with the configured boresight gains.
// Below-floor records are excluded; boresight samples are dropped when the
// RX heading is undefined (stationary, no override). Throws
// std::out_of_range when a sweep timestamp falls outside the GPS span.
std::vector<PathLossSample> extract_pathloss(const std::vector<SweepRecord>& records,
                                             const Scenario& scenario, const Codebook& codebook,
                                             const std::vector<GpsFix>& gps_rx,
                                             const std::vector<GpsFix>& gps_tx,
                                             double run_start_s);

// Groups samples into axis-aligned squares of the given side (by RX east/
// north), one output per (square, los, category): dB-mean path loss, mean
// distance, centroid position. Ameliorates small-scale fading.
std::vector<PathLossSample> local_square_average(const std::vector<PathLossSample>& samples,
                                                 double side_m);

// Slope-only least squares with the intercept pinned to fspl(f, 1 m).
// Throws std::invalid_argument with < 2 samples or distances < 1 m, and
// std::runtime_error when all distances are equal (degenerate).
CiFit fit_ci(const std::vector<PathLossSample>& samples, double carrier_freq_hz);

struct ElevationHistogram {
    std::vector<double> row_elevations_deg;  // codebook rows, ascending
    std::vector<std::size_t> counts;
    std::vector<double> fractions;  // sum to 1 when any sample binned
};

// Fraction of best-beam samples whose strongest beam sits in each codebook
// elevation row.
ElevationHistogram elevation_histogram(const std::vector<PathLossSample>& best_samples,
                                       const Codebook& codebook);

struct HeatmapCell {
    std::uint32_t beam_index = 0;
    Direction center;
    double rx_power_dbm = 0.0;
    bool below_floor = false;
};

struct Heatmap {
    std::vector<HeatmapCell> cells;
    double hex_circumradius_deg = 0.0;
};

// Per-beam received power of one complete sweep, with the hexagon geometry
// needed to draw it. Throws std::invalid_argument on an incomplete sweep.
Heatmap heatmap_export(const std::vector<SweepRecord>& sweep_records, const Codebook& codebook);

struct FitRow {
    BeamCategory category;
    bool los = false;
    CiFit fit;
};

struct AnalysisReport {
    std::vector<PathLossSample> best;       // averaged samples
    std::vector<PathLossSample> boresight;  // averaged samples
    std::vector<FitRow> fits;
    ElevationHistogram histogram;
    Heatmap heatmap;
    std::uint32_t heatmap_sweep = 0;
    std::vector<std::string> notes;  // skipped fits, filtered samples, ...
};

struct AnalysisOptions {
    double square_side_m = 4.0;
    std::uint32_t heatmap_sweep = 0;
};

AnalysisReport run_analysis(const std::vector<SweepRecord>& records, const Scenario& scenario,
                            const Codebook& codebook, const std::vector<GpsFix>& gps_rx,
                            const std::vector<GpsFix>& gps_tx, double run_start_s,
                            const AnalysisOptions& options = {});

// Writes pathloss_best.csv, pathloss_boresight.csv, ci_fits.csv,
// elevation_hist.csv, heatmap_sweep_<k>.csv and notes.txt into `dir`.
void write_analysis_report(const std::filesystem::path& dir, const AnalysisReport& report);

}  // namespace mmsounder
