#include "mmsounder/sounder.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "mmsounder/rng.hpp"

namespace mmsounder {

namespace {
// Keeps empty-channel PDP bins finite: 1e-30 linear == -300 dBm.
constexpr double kPowerFloorLinear = 1e-30;

Scenario validated(Scenario s) {
    s.validate();
    return s;
}
}  // namespace

Pdp pdp_from_capture(const ComplexSequence& rx, const CircularCorrelator& correlator,
                     std::uint32_t m, double calibration_offset_db) {
    const std::size_t n = correlator.period_length();
    if (m < 1 || rx.size() != static_cast<std::size_t>(m) * n)
        throw std::invalid_argument("pdp_from_capture: rx length must equal m * n_zc");

    const auto periods = correlator.correlate(rx);
    const double n2 = static_cast<double>(n) * static_cast<double>(n);

    std::vector<double> mean_power(n, 0.0);
    for (const auto& c : periods)
        for (std::size_t k = 0; k < n; ++k) mean_power[k] += std::norm(c.samples[k]) / n2;
    const double inv_m = 1.0 / static_cast<double>(periods.size());

    Pdp pdp;
    pdp.bin_period_s = rx.sample_period;
    pdp.bins_dbm.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::max(mean_power[k] * inv_m, kPowerFloorLinear);
        pdp.bins_dbm[k] = 10.0 * std::log10(p) + calibration_offset_db;
    }
    return pdp;
}

Pdp pdp_from_capture(const ComplexSequence& rx, const ComplexSequence& ref, std::uint32_t m,
                     double calibration_offset_db) {
    return pdp_from_capture(rx, CircularCorrelator(ref), m, calibration_offset_db);
}

std::pair<double, bool> peak_power(const Pdp& pdp, double floor_dbm) {
    if (pdp.bins_dbm.empty()) throw std::invalid_argument("peak_power: empty pdp");
    const double peak = *std::max_element(pdp.bins_dbm.begin(), pdp.bins_dbm.end());
    return {peak, peak < floor_dbm};
}

std::int64_t dwell_timestamp_ns(std::uint64_t sweep_index, std::uint64_t slot,
                                std::uint64_t slots_per_sweep, std::uint32_t averaging_m,
                                std::int64_t period_ns) {
    const auto dwell = static_cast<std::int64_t>(sweep_index * slots_per_sweep + slot);
    return dwell * static_cast<std::int64_t>(averaging_m) * period_ns;
}

Sounder::Sounder(Scenario scenario, Codebook codebook, SounderOptions options)
    : scenario_(validated(std::move(scenario))),
      codebook_(std::move(codebook)),
      options_(options),
      zc_(generate_zc(options_.zc)),
      tx_capture_(periodic_signal(zc_, scenario_.averaging_m)),
      correlator_(zc_) {
    if (codebook_.cells_total() == 0 || codebook_.cells_total() % 4 != 0)
        throw std::invalid_argument("sounder: codebook must have a positive multiple of 4 beams");
    // The analysis de-embeds path loss with the scenario's rx beam type, so
    // a codebook built for a different type would corrupt every sample.
    for (const auto& beam : codebook_.beams()) {
        if (beam.beam_type.side != ArraySide::Rx ||
            beam.beam_type.id != scenario_.rx_beam_type.id)
            throw std::invalid_argument(
                "sounder: codebook beam type " + std::to_string(beam.beam_type.id) +
                " does not match scenario rx_beam_type " +
                std::to_string(scenario_.rx_beam_type.id));
    }
    // Place the digital reference on the dBm plane: unit signal power is
    // 0 dBm, so the transmitted amplitude encodes the array input power.
    const double amplitude = std::pow(10.0, scenario_.tx_power_dbm / 20.0);
    for (auto& v : tx_capture_.samples) v *= amplitude;
}

std::vector<SweepRecord> Sounder::run_sweep(std::uint32_t sweep_index, double t0_s,
                                            std::vector<Pdp>* pdps) const {
    const std::size_t cells = codebook_.cells_total();
    const std::size_t slots = slots_per_sweep();
    const double dwell_s = static_cast<double>(dwell_duration_ns()) * 1e-9;

    // The whole sweep must fit inside both trajectory spans.
    const double sweep_end = t0_s + static_cast<double>(sweep_duration_ns()) * 1e-9;
    auto check_span = [&](const Trajectory& traj, const char* name) {
        if (traj.waypoints.size() < 2) return;  // static: valid for all t
        if (t0_s < traj.start_time() || sweep_end > traj.end_time() + 1e-12)
            throw std::out_of_range(std::string("run_sweep: sweep [") + std::to_string(t0_s) +
                                    ", " + std::to_string(sweep_end) + "] s outside " + name +
                                    " span");
    };
    check_span(scenario_.tx_trajectory, "tx_trajectory");
    check_span(scenario_.rx_trajectory, "rx_trajectory");

    std::vector<SweepRecord> records(cells);
    if (pdps) pdps->assign(cells, Pdp{});

    auto process_slot = [&](std::size_t slot) {
        // Run-clock timestamp for the record; the channel is evaluated on
        // the scenario clock at this dwell's midpoint within the sweep.
        const std::int64_t ts_ns =
            dwell_timestamp_ns(sweep_index, slot, slots, scenario_.averaging_m, period_ns());
        const double slot_offset_s =
            static_cast<double>(static_cast<std::int64_t>(slot) * dwell_duration_ns()) * 1e-9;
        const double t_mid = t0_s + slot_offset_s + 0.5 * dwell_s;

        const std::vector<Ray> rays = build_rays(scenario_, t_mid);
        std::vector<double> tx_gains(rays.size());
        for (std::size_t i = 0; i < rays.size(); ++i)
            tx_gains[i] = beam_gain_db(scenario_.tx_beam_type, scenario_.tx_boresight,
                                       rays[i].aod);

        // All four arrays dwell on this slot simultaneously, one beam each.
        for (int sector = 0; sector < 4; ++sector) {
            const std::size_t beam_index = static_cast<std::size_t>(sector) * slots + slot;
            const Beam& beam = codebook_.beams()[beam_index];

            std::vector<double> rx_gains(rays.size());
            for (std::size_t i = 0; i < rays.size(); ++i)
                rx_gains[i] = beam_gain_db(beam, rays[i].aoa);

            ComplexSequence capture = apply_channel(tx_capture_, rays, tx_gains, rx_gains);
            if (scenario_.noise_enabled) {
                const std::uint64_t dwell_id =
                    static_cast<std::uint64_t>(sweep_index) * cells + beam_index;
                capture = add_noise(capture, scenario_.noise_figure_db,
                                    options_.zc.sample_rate, scenario_.rng_seed,
                                    kStreamDwellNoise, dwell_id);
            }

            Pdp pdp = pdp_from_capture(capture, correlator_, scenario_.averaging_m,
                                       scenario_.calibration_offset_db);
            const auto [power, below] = peak_power(pdp, scenario_.measurement_floor_dbm);

            SweepRecord rec;
            rec.sweep_index = sweep_index;
            rec.beam_index = static_cast<std::uint32_t>(beam_index);
            rec.timestamp_ns = ts_ns;
            rec.rx_power_dbm = power;
            rec.below_floor = below;
            records[beam_index] = rec;
            if (pdps) (*pdps)[beam_index] = std::move(pdp);
        }
    };

    unsigned threads = options_.threads ? options_.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(slots)));
    if (threads == 1) {
        for (std::size_t slot = 0; slot < slots; ++slot) process_slot(slot);
    } else {
        // Dwells are independent (per-dwell noise streams), so slots can be
        // striped across workers without affecting the output.
        std::vector<std::future<void>> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            workers.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t slot = w; slot < slots; slot += threads) process_slot(slot);
            }));
        }
        for (auto& f : workers) f.get();
    }
    return records;
}

SimulationRun Sounder::simulate_run(const PdpSink& pdp_sink) const {
    // Overlap of the mobile trajectory spans; static (single waypoint)
    // trajectories hold for all time.
    double start = std::numeric_limits<double>::lowest();
    double end = std::numeric_limits<double>::max();
    for (const Trajectory* traj : {&scenario_.tx_trajectory, &scenario_.rx_trajectory}) {
        if (traj->waypoints.size() < 2) continue;
        start = std::max(start, traj->start_time());
        end = std::min(end, traj->end_time());
    }
    if (start == std::numeric_limits<double>::lowest()) {
        // Both ends static: run for one second by convention.
        start = 0.0;
        end = 1.0;
    }
    if (!(end > start))
        throw std::out_of_range("simulate_run: trajectory spans do not overlap");

    const double sweep_s = static_cast<double>(sweep_duration_ns()) * 1e-9;
    const auto sweep_count = static_cast<std::uint64_t>((end - start) / sweep_s + 1e-9);
    if (sweep_count == 0)
        throw std::out_of_range("simulate_run: trajectory overlap shorter than one sweep");

    SimulationRun run;
    run.run_start_s = start;
    run.sweep_count = sweep_count;
    run.records.reserve(sweep_count * codebook_.cells_total());

    std::vector<Pdp> pdps;
    for (std::uint64_t s = 0; s < sweep_count; ++s) {
        const double t0 = start + static_cast<double>(s) * sweep_s;
        auto records =
            run_sweep(static_cast<std::uint32_t>(s), t0, pdp_sink ? &pdps : nullptr);
        if (pdp_sink)
            for (std::size_t i = 0; i < records.size(); ++i) pdp_sink(records[i], pdps[i]);
        run.records.insert(run.records.end(), records.begin(), records.end());
    }

    // 70 ms GPS cadence over the run span, noisy per-axis at gps_sigma_m.
    // Fix timestamps are on the run clock (t = 0 at run start), matching
    // the capture records.
    auto synthesize_gps = [&](const Trajectory& traj, std::uint64_t stream) {
        std::vector<GpsFix> fixes;
        const double run_span = static_cast<double>(sweep_count) * sweep_s;
        for (std::uint64_t k = 0;; ++k) {
            const double t_rel = static_cast<double>(k) * 0.070;
            const double t_abs = start + t_rel;
            EnuPosition pos =
                traj.waypoints.size() < 2
                    ? traj.waypoints.front().position
                    : interpolate_position(traj, std::min(t_abs, traj.end_time()));
            if (scenario_.gps_sigma_m > 0.0) {
                GaussianSampler gauss(make_engine(scenario_.rng_seed, stream, k));
                pos.east_m += scenario_.gps_sigma_m * gauss.next();
                pos.north_m += scenario_.gps_sigma_m * gauss.next();
                pos.up_m += scenario_.gps_sigma_m * gauss.next();
            }
            fixes.push_back({t_rel, pos, scenario_.gps_sigma_m});
            if (t_rel >= run_span) break;  // last fix must cover the run end
        }
        return fixes;
    };
    run.gps_rx = synthesize_gps(scenario_.rx_trajectory, kStreamGpsRx);
    run.gps_tx = synthesize_gps(scenario_.tx_trajectory, kStreamGpsTx);
    return run;
}

}  // namespace mmsounder
