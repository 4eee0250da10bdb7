#include "mmsounder/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mmsounder/channel.hpp"

namespace mmsounder {

const char* to_string(BeamCategory category) {
    return category == BeamCategory::Best ? "best" : "boresight";
}

namespace {

Trajectory trajectory_from_fixes(const std::vector<GpsFix>& fixes) {
    Trajectory traj;
    traj.waypoints.reserve(fixes.size());
    for (const auto& f : fixes) traj.waypoints.push_back({f.t_s, f.position});
    return traj;
}

}  // namespace

std::vector<PathLossSample> extract_pathloss(const std::vector<SweepRecord>& records,
                                             const Scenario& scenario, const Codebook& codebook,
                                             const std::vector<GpsFix>& gps_rx,
                                             const std::vector<GpsFix>& gps_tx,
                                             double run_start_s) {
    if (gps_rx.size() < 2 || gps_tx.size() < 2)
        throw std::invalid_argument("extract_pathloss: need at least two GPS fixes per log");

    const std::size_t cells = codebook.cells_total();
    const double de_embed = scenario.tx_power_dbm + scenario.tx_beam_type.boresight_gain_db +
                            scenario.rx_beam_type.boresight_gain_db;

    // GPS logs run on the capture clock (ns from run start).
    const Trajectory rx_traj = trajectory_from_fixes(gps_rx);
    const Trajectory tx_traj = trajectory_from_fixes(gps_tx);

    std::map<std::uint32_t, std::vector<const SweepRecord*>> sweeps;
    for (const auto& r : records) sweeps[r.sweep_index].push_back(&r);

    std::vector<PathLossSample> samples;
    for (const auto& [sweep_index, recs] : sweeps) {
        if (recs.size() != cells) continue;  // incomplete trailing sweep

        std::int64_t ts_lo = recs.front()->timestamp_ns, ts_hi = ts_lo;
        for (const auto* r : recs) {
            ts_lo = std::min(ts_lo, r->timestamp_ns);
            ts_hi = std::max(ts_hi, r->timestamp_ns);
        }
        const double t_sweep = static_cast<double>(ts_lo + ts_hi) * 0.5e-9;
        if (t_sweep < rx_traj.start_time() || t_sweep > rx_traj.end_time() ||
            t_sweep < tx_traj.start_time() || t_sweep > tx_traj.end_time())
            throw std::out_of_range("extract_pathloss: sweep timestamp outside GPS span");

        const EnuPosition rx_pos = interpolate_position(rx_traj, t_sweep);
        const EnuPosition tx_pos = interpolate_position(tx_traj, t_sweep);
        const double distance = distance_3d_m(tx_pos, rx_pos);
        if (distance == 0.0) continue;
        const bool los = scenario.los_clear(run_start_s + t_sweep);

        // Best beam: strongest received power over the full sweep.
        const SweepRecord* best = nullptr;
        for (const auto* r : recs) {
            if (r->below_floor) continue;
            if (!best || r->rx_power_dbm > best->rx_power_dbm ||
                (r->rx_power_dbm == best->rx_power_dbm && r->beam_index < best->beam_index))
                best = r;
        }
        if (best) {
            PathLossSample s;
            s.distance_m = distance;
            s.pathloss_db = de_embed - best->rx_power_dbm;
            s.los = los;
            s.category = BeamCategory::Best;
            s.rx_position = rx_pos;
            s.elevation_of_best_deg = codebook.beams().at(best->beam_index).center.elevation_deg;
            samples.push_back(s);
        }

        // Boresight beam: the codebook beam pointing at the TX, with the RX
        // heading taken from the scenario override when present (static
        // platforms) or derived from the GPS log.
        double heading = 0.0;
        bool heading_ok = true;
        if (scenario.rx_trajectory.heading_override_deg) {
            heading = *scenario.rx_trajectory.heading_override_deg;
        } else {
            try {
                heading = heading_from_gps(gps_rx, t_sweep);
            } catch (const StationaryError&) {
                heading_ok = false;
            }
        }
        if (heading_ok) {
            const Direction tx_dir = los_direction(rx_pos, heading, tx_pos);
            const Beam& beam = codebook.nearest_beam(tx_dir);
            const SweepRecord* bore = recs[beam.index];
            if (bore->beam_index != beam.index) {
                for (const auto* r : recs)
                    if (r->beam_index == beam.index) {
                        bore = r;
                        break;
                    }
            }
            if (!bore->below_floor) {
                PathLossSample s;
                s.distance_m = distance;
                s.pathloss_db = de_embed - bore->rx_power_dbm;
                s.los = los;
                s.category = BeamCategory::Boresight;
                s.rx_position = rx_pos;
                s.elevation_of_best_deg =
                    codebook.beams().at(bore->beam_index).center.elevation_deg;
                samples.push_back(s);
            }
        }
    }
    return samples;
}

std::vector<PathLossSample> local_square_average(const std::vector<PathLossSample>& samples,
                                                 double side_m) {
    if (!(side_m > 0.0)) throw std::invalid_argument("local_square_average: side must be > 0");

    struct Key {
        long long ix, iy;
        bool los;
        BeamCategory category;
        bool operator<(const Key& o) const {
            if (ix != o.ix) return ix < o.ix;
            if (iy != o.iy) return iy < o.iy;
            if (los != o.los) return los < o.los;
            return static_cast<int>(category) < static_cast<int>(o.category);
        }
    };
    struct Acc {
        double pl_sum = 0.0, d_sum = 0.0, e_sum = 0.0, n_sum = 0.0, u_sum = 0.0, el_sum = 0.0;
        std::size_t count = 0;
    };

    std::map<Key, Acc> groups;
    for (const auto& s : samples) {
        const Key key{static_cast<long long>(std::floor(s.rx_position.east_m / side_m)),
                      static_cast<long long>(std::floor(s.rx_position.north_m / side_m)), s.los,
                      s.category};
        Acc& acc = groups[key];
        acc.pl_sum += s.pathloss_db;
        acc.d_sum += s.distance_m;
        acc.e_sum += s.rx_position.east_m;
        acc.n_sum += s.rx_position.north_m;
        acc.u_sum += s.rx_position.up_m;
        acc.el_sum += s.elevation_of_best_deg;
        acc.count++;
    }

    std::vector<PathLossSample> out;
    out.reserve(groups.size());
    for (const auto& [key, acc] : groups) {
        const double inv = 1.0 / static_cast<double>(acc.count);
        PathLossSample s;
        s.distance_m = acc.d_sum * inv;
        s.pathloss_db = acc.pl_sum * inv;  // dB-domain mean
        s.los = key.los;
        s.category = key.category;
        s.rx_position = {acc.e_sum * inv, acc.n_sum * inv, acc.u_sum * inv};
        s.elevation_of_best_deg = acc.el_sum * inv;
        out.push_back(s);
    }
    return out;
}

CiFit fit_ci(const std::vector<PathLossSample>& samples, double carrier_freq_hz) {
    if (samples.size() < 2) throw std::invalid_argument("fit_ci: needs at least two samples");
    for (const auto& s : samples)
        if (s.distance_m < 1.0)
            throw std::invalid_argument("fit_ci: all distances must be >= 1 m (d0 reference)");

    double d_min = samples.front().distance_m, d_max = d_min;
    for (const auto& s : samples) {
        d_min = std::min(d_min, s.distance_m);
        d_max = std::max(d_max, s.distance_m);
    }
    if (d_max - d_min < 1e-12)
        throw std::runtime_error("fit_ci: degenerate sample set, all distances equal");

    CiFit fit;
    fit.d0_m = 1.0;
    fit.fspl_d0_db = fspl_db(carrier_freq_hz, 1.0);
    fit.sample_count = samples.size();

    // Minimize sum((PL_i - fspl_d0 - 10 n a_i)^2), a_i = log10(d_i):
    // closed form n = sum(a_i (PL_i - fspl_d0)) / (10 sum(a_i^2)).
    double num = 0.0, den = 0.0;
    for (const auto& s : samples) {
        const double a = std::log10(s.distance_m);
        num += a * (s.pathloss_db - fit.fspl_d0_db);
        den += a * a;
    }
    fit.n = num / (10.0 * den);

    double ss = 0.0;
    for (const auto& s : samples) {
        const double r =
            s.pathloss_db - fit.fspl_d0_db - 10.0 * fit.n * std::log10(s.distance_m);
        ss += r * r;
    }
    fit.sigma_db = std::sqrt(ss / static_cast<double>(samples.size()));
    return fit;
}

ElevationHistogram elevation_histogram(const std::vector<PathLossSample>& best_samples,
                                       const Codebook& codebook) {
    ElevationHistogram hist;
    hist.row_elevations_deg = codebook.elevation_rows();
    hist.counts.assign(hist.row_elevations_deg.size(), 0);
    hist.fractions.assign(hist.row_elevations_deg.size(), 0.0);

    std::size_t total = 0;
    for (const auto& s : best_samples) {
        if (s.category != BeamCategory::Best) continue;
        // Bin by the nearest row; simulated samples land exactly on a row.
        std::size_t bin = 0;
        double best_diff = std::abs(hist.row_elevations_deg[0] - s.elevation_of_best_deg);
        for (std::size_t i = 1; i < hist.row_elevations_deg.size(); ++i) {
            const double diff = std::abs(hist.row_elevations_deg[i] - s.elevation_of_best_deg);
            if (diff < best_diff) {
                best_diff = diff;
                bin = i;
            }
        }
        hist.counts[bin]++;
        total++;
    }
    if (total > 0)
        for (std::size_t i = 0; i < hist.counts.size(); ++i)
            hist.fractions[i] =
                static_cast<double>(hist.counts[i]) / static_cast<double>(total);
    return hist;
}

Heatmap heatmap_export(const std::vector<SweepRecord>& sweep_records, const Codebook& codebook) {
    if (sweep_records.size() != codebook.cells_total())
        throw std::invalid_argument("heatmap_export: needs one complete sweep");

    Heatmap map;
    map.hex_circumradius_deg = codebook.hex_circumradius_deg();
    map.cells.reserve(sweep_records.size());
    for (const auto& r : sweep_records) {
        const Beam& beam = codebook.beams().at(r.beam_index);
        map.cells.push_back({r.beam_index, beam.center, r.rx_power_dbm, r.below_floor});
    }
    std::sort(map.cells.begin(), map.cells.end(),
              [](const HeatmapCell& a, const HeatmapCell& b) { return a.beam_index < b.beam_index; });
    return map;
}

AnalysisReport run_analysis(const std::vector<SweepRecord>& records, const Scenario& scenario,
                            const Codebook& codebook, const std::vector<GpsFix>& gps_rx,
                            const std::vector<GpsFix>& gps_tx, double run_start_s,
                            const AnalysisOptions& options) {
    AnalysisReport report;
    report.heatmap_sweep = options.heatmap_sweep;

    auto raw = extract_pathloss(records, scenario, codebook, gps_rx, gps_tx, run_start_s);

    std::vector<PathLossSample> best_raw;
    for (const auto& s : raw)
        if (s.category == BeamCategory::Best) best_raw.push_back(s);
    report.histogram = elevation_histogram(best_raw, codebook);

    auto averaged = local_square_average(raw, options.square_side_m);
    std::size_t dropped = 0;
    for (const auto& s : averaged) {
        if (s.distance_m < 1.0) {
            dropped++;
            continue;
        }
        (s.category == BeamCategory::Best ? report.best : report.boresight).push_back(s);
    }
    if (dropped > 0)
        report.notes.push_back(std::to_string(dropped) +
                               " averaged sample(s) below the 1 m reference distance dropped");

    for (BeamCategory category : {BeamCategory::Best, BeamCategory::Boresight}) {
        for (bool los : {true, false}) {
            std::vector<PathLossSample> subset;
            const auto& pool = category == BeamCategory::Best ? report.best : report.boresight;
            for (const auto& s : pool)
                if (s.los == los) subset.push_back(s);
            const std::string label =
                std::string(to_string(category)) + "/" + (los ? "los" : "nlos");
            if (subset.empty()) {
                report.notes.push_back("no samples for " + label + "; fit skipped");
                continue;
            }
            try {
                report.fits.push_back({category, los, fit_ci(subset, scenario.carrier_freq_hz)});
            } catch (const std::exception& e) {
                report.notes.push_back("fit skipped for " + label + ": " + e.what());
            }
        }
    }

    // Heatmap of the requested sweep when it is complete.
    std::vector<SweepRecord> sweep;
    for (const auto& r : records)
        if (r.sweep_index == options.heatmap_sweep) sweep.push_back(r);
    if (sweep.size() == codebook.cells_total()) {
        report.heatmap = heatmap_export(sweep, codebook);
    } else {
        report.notes.push_back("sweep " + std::to_string(options.heatmap_sweep) +
                               " incomplete; heatmap skipped");
    }
    return report;
}

void write_analysis_report(const std::filesystem::path& dir, const AnalysisReport& report) {
    std::filesystem::create_directories(dir);
    char line[256];

    auto write_samples = [&](const std::filesystem::path& path,
                             const std::vector<PathLossSample>& samples) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write: " + path.string());
        out << "distance_m,pathloss_db,los\n";
        for (const auto& s : samples) {
            std::snprintf(line, sizeof(line), "%.4f,%.4f,%d\n", s.distance_m, s.pathloss_db,
                          s.los ? 1 : 0);
            out << line;
        }
    };
    write_samples(dir / "pathloss_best.csv", report.best);
    write_samples(dir / "pathloss_boresight.csv", report.boresight);

    {
        std::ofstream out(dir / "ci_fits.csv");
        out << "category,los,n,sigma_db,samples\n";
        for (const auto& row : report.fits) {
            std::snprintf(line, sizeof(line), "%s,%d,%.4f,%.4f,%zu\n", to_string(row.category),
                          row.los ? 1 : 0, row.fit.n, row.fit.sigma_db, row.fit.sample_count);
            out << line;
        }
    }
    {
        std::ofstream out(dir / "elevation_hist.csv");
        out << "elevation_deg,count,fraction\n";
        for (std::size_t i = 0; i < report.histogram.row_elevations_deg.size(); ++i) {
            std::snprintf(line, sizeof(line), "%.6f,%zu,%.6f\n",
                          report.histogram.row_elevations_deg[i], report.histogram.counts[i],
                          report.histogram.fractions[i]);
            out << line;
        }
    }
    if (!report.heatmap.cells.empty()) {
        std::ofstream out(dir / ("heatmap_sweep_" + std::to_string(report.heatmap_sweep) + ".csv"));
        out << "beam_index,azimuth_deg,elevation_deg,rx_power_dbm,below_floor,hex_circumradius_deg\n";
        for (const auto& c : report.heatmap.cells) {
            std::snprintf(line, sizeof(line), "%u,%.6f,%.6f,%.4f,%d,%.6f\n", c.beam_index,
                          c.center.azimuth_deg, c.center.elevation_deg, c.rx_power_dbm,
                          c.below_floor ? 1 : 0, report.heatmap.hex_circumradius_deg);
            out << line;
        }
    }
    {
        std::ofstream out(dir / "notes.txt");
        for (const auto& note : report.notes) out << note << "\n";
    }
}

}  // namespace mmsounder
