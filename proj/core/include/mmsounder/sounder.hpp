// Receiver measurement loop: per-dwell correlation and PDP averaging,
// slot-timed beam sweeping across the four sectors, and full-run capture
// generation with synthesized GPS logs.
//
// The four arrays sweep their sectors simultaneously, one codebook beam
// per array per 125 us sounding slot, so a 200-beam segment scan finishes
// in 50 slots = 6.25 ms (averaging m stretches every dwell by m periods).

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "mmsounder/channel.hpp"
#include "mmsounder/codebook.hpp"
#include "mmsounder/geo.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/waveform.hpp"

namespace mmsounder {

// Power-delay profile on the calibrated dBm plane.
struct Pdp {
    std::vector<double> bins_dbm;
    double bin_period_s = 0.0;  // = T_s
};

struct SweepRecord {
    std::uint32_t sweep_index = 0;
    std::uint32_t beam_index = 0;
    std::int64_t timestamp_ns = 0;  // dwell start, relative to run start
    double rx_power_dbm = 0.0;      // peak of the averaged PDP
    bool below_floor = false;
};

// m per-period correlations -> per-period power |c|^2 / N^2 -> bin-wise mean
// across periods -> dB + calibration offset. rx must hold exactly m periods.
Pdp pdp_from_capture(const ComplexSequence& rx, const CircularCorrelator& correlator,
                     std::uint32_t m, double calibration_offset_db = 0.0);
Pdp pdp_from_capture(const ComplexSequence& rx, const ComplexSequence& ref, std::uint32_t m,
                     double calibration_offset_db = 0.0);

// Peak bin and the below-measurement-floor flag.
std::pair<double, bool> peak_power(const Pdp& pdp, double floor_dbm);

// Dwell start time on the run clock: (sweep * slots + slot) * m * period.
std::int64_t dwell_timestamp_ns(std::uint64_t sweep_index, std::uint64_t slot,
                                std::uint64_t slots_per_sweep, std::uint32_t averaging_m,
                                std::int64_t period_ns);

struct SimulationRun {
    double run_start_s = 0.0;  // scenario time of run-clock zero
    std::uint64_t sweep_count = 0;
    std::vector<SweepRecord> records;  // sweep-major, beam_index ascending
    std::vector<GpsFix> gps_rx;        // 70 ms cadence, run-clock timestamps
    std::vector<GpsFix> gps_tx;
};

struct SounderOptions {
    ZcConfig zc;           // 8192 / 1729 / 65.536 MHz
    unsigned threads = 0;  // 0: hardware concurrency
};

class Sounder {
  public:
    Sounder(Scenario scenario, Codebook codebook, SounderOptions options = SounderOptions{});

    const Scenario& scenario() const { return scenario_; }
    const Codebook& codebook() const { return codebook_; }
    const ZcConfig& zc_config() const { return options_.zc; }

    std::int64_t period_ns() const { return options_.zc.period_ns(); }
    std::int64_t dwell_duration_ns() const { return scenario_.averaging_m * period_ns(); }
    std::uint64_t slots_per_sweep() const { return codebook_.beams_per_sector(); }
    std::int64_t sweep_duration_ns() const {
        return static_cast<std::int64_t>(slots_per_sweep()) * dwell_duration_ns();
    }

    // One full 200-beam sweep starting at t0 on the scenario clock. Records
    // come back beam-index ascending; the channel is evaluated once per
    // dwell at the dwell midpoint. Throws std::out_of_range when the sweep
    // does not fit inside the trajectory span. When `pdps` is non-null it
    // receives one averaged PDP per record, same order.
    std::vector<SweepRecord> run_sweep(std::uint32_t sweep_index, double t0_s,
                                       std::vector<Pdp>* pdps = nullptr) const;

    // Back-to-back sweeps covering the overlap of the TX and RX trajectory
    // spans, plus 70 ms GPS fix logs for both ends. `pdp_sink`, when set,
    // is called once per record in capture order.
    using PdpSink = std::function<void(const SweepRecord&, const Pdp&)>;
    SimulationRun simulate_run(const PdpSink& pdp_sink = nullptr) const;

  private:
    Scenario scenario_;
    Codebook codebook_;
    SounderOptions options_;
    ComplexSequence zc_;          // one reference period, unit amplitude
    ComplexSequence tx_capture_;  // m periods scaled to the TX power plane
    CircularCorrelator correlator_;
};

}  // namespace mmsounder
