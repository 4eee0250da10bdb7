// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line. Exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mmsounder/analysis.hpp"
#include "mmsounder/capture_io.hpp"
#include "mmsounder/channel.hpp"
#include "mmsounder/codebook.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/sounder.hpp"
#include "mmsounder/waveform.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

namespace fs = std::filesystem;
using namespace mmsounder;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = true;
    try {
        detail = body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    std::printf("[%s] criterion %2d %-24s %s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!ok) g_failures++;
}

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Codebook default_codebook() { return Codebook::make(60.0, 200, BeamType::rx(2)); }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MMSOUNDER_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- criterion bodies ----------------------------------------------------

std::string zc_ideality() {
    const auto t0 = Clock::now();

    auto check_pair = [](std::size_t n, std::size_t u) {
        const auto zc = generate_zc({n, u, 65.536e6});
        for (std::size_t k = 0; k < n; ++k)
            require(std::abs(std::abs(zc.samples[k]) - 1.0) < 1e-12,
                    "sample magnitude off unity");
        const auto c = circular_xcorr(zc, zc).front().samples;
        const double nn = static_cast<double>(n);
        require(std::abs(std::abs(c[0]) - nn) < 1e-6 * nn, "autocorrelation peak != N");
        for (std::size_t m = 1; m < n; ++m)
            require(std::abs(c[m]) < 1e-6 * nn, "off-peak autocorrelation too high");
    };

    check_pair(8192, 1729);
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> n_dist(32, 4096);
    int tested = 0;
    while (tested < 20) {
        const std::size_t n = n_dist(rng);
        std::uniform_int_distribution<std::size_t> u_dist(1, n - 1);
        const std::size_t u = u_dist(rng);
        if (std::gcd(n, u) != 1) continue;
        check_pair(n, u);
        tested++;
    }

    const double elapsed = seconds_since(t0);
    require(elapsed < 5.0, "runtime over 5 s");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "(8192,1729) + 20 random pairs ideal in %.2f s", elapsed);
    return buf;
}

std::string timing_reproduction() {
    const auto cb = default_codebook();

    auto sweep_stats = [&](std::uint32_t m) {
        Scenario s = test_scenarios::anechoic();
        s.averaging_m = m;
        const Sounder sounder(s, cb, test_scenarios::small_options());
        const auto records = sounder.run_sweep(0, 0.0);
        require(records.size() == 200, "sweep must hold 200 records");
        std::set<std::int64_t> stamps;
        for (const auto& r : records) stamps.insert(r.timestamp_ns);
        require(stamps.size() == 50, "expected 50 dwell slots");
        std::int64_t spacing = 0;
        std::int64_t prev = -1;
        for (std::int64_t t : stamps) {
            if (prev >= 0) {
                if (spacing == 0) spacing = t - prev;
                require(t - prev == spacing, "irregular dwell spacing");
            }
            prev = t;
        }
        return std::pair{spacing, sounder.sweep_duration_ns()};
    };

    const auto [spacing1, scan1] = sweep_stats(1);
    require(spacing1 == 125000, "dwell spacing must be 125000 ns");
    require(scan1 == 6250000, "segment scan must be 6.25 ms");
    const auto [spacing2, scan2] = sweep_stats(2);
    require(spacing2 == 250000, "m=2 must double the dwell spacing");
    require(scan2 == 12500000, "m=2 must double the scan time");
    return "200 records, 125000 ns dwells, 6.25 ms scan; m=2 doubles both";
}

std::string ota_verification_twin() {
    const Scenario s = test_scenarios::anechoic();
    const auto cb = default_codebook();
    const Sounder sounder(s, cb, SounderOptions{});  // full 8192-sample waveform
    const auto records = sounder.run_sweep(0, 0.0);

    const auto best = std::max_element(records.begin(), records.end(),
                                       [](const SweepRecord& a, const SweepRecord& b) {
                                           return a.rx_power_dbm < b.rx_power_dbm;
                                       });
    const double budget = s.tx_power_dbm + s.tx_beam_type.boresight_gain_db +
                          s.rx_beam_type.boresight_gain_db;
    const double measured_pl = budget - best->rx_power_dbm;
    const double closed_form = fspl_db(s.carrier_freq_hz, 17.0 * 0.3048);

    require(std::abs(measured_pl - 75.67) < 0.2, "path loss outside 75.67 +/- 0.2 dB");
    require(std::abs(measured_pl - closed_form) < 0.01,
            "path loss disagrees with the closed form");

    const Direction tx_dir = los_direction(s.rx_trajectory.waypoints.front().position, 0.0,
                                           s.tx_trajectory.waypoints.front().position);
    require(best->beam_index == cb.nearest_beam(tx_dir).index,
            "heatmap maximum not at the TX direction");

    char buf[128];
    std::snprintf(buf, sizeof(buf), "measured %.4f dB vs 75.67 (closed form %.4f), hot spot ok",
                  measured_pl, closed_form);
    return buf;
}

std::string link_budget_closure() {
    const auto cb = default_codebook();
    const ZcConfig zc_cfg;  // default waveform
    const auto zc = generate_zc(zc_cfg);
    const CircularCorrelator correlator(zc);
    const double fspl = fspl_db(28.3e9, 17.0 * 0.3048);

    double worst = 0.0;
    for (int tx_type = 1; tx_type <= 4; ++tx_type) {
        for (int rx_type = 1; rx_type <= 4; ++rx_type) {
            Scenario s = test_scenarios::anechoic();
            s.tx_beam_type = BeamType::tx(tx_type);
            s.rx_beam_type = BeamType::rx(rx_type);

            // One noiseless boresight dwell through the full capture path.
            const auto rays = build_rays(s, 0.0);
            require(rays.size() == 1, "expected the LOS ray only");
            const double tx_gain = beam_gain_db(s.tx_beam_type, s.tx_boresight, rays[0].aod);
            const double rx_gain =
                beam_gain_db(s.rx_beam_type, Direction{0.0, 0.0}, rays[0].aoa);

            ComplexSequence tx_signal = zc;
            const double amp = std::pow(10.0, s.tx_power_dbm / 20.0);
            for (auto& v : tx_signal.samples) v *= amp;
            const auto capture = apply_channel(tx_signal, rays, {tx_gain}, {rx_gain});
            const auto pdp = pdp_from_capture(capture, correlator, 1);
            const auto [power, below] = peak_power(pdp, s.measurement_floor_dbm);
            require(!below, "dwell unexpectedly below the floor");

            const double expected = s.tx_power_dbm + s.tx_beam_type.boresight_gain_db +
                                    s.rx_beam_type.boresight_gain_db - fspl;
            worst = std::max(worst, std::abs(power - expected));
            require(std::abs(power - expected) < 0.01, "budget error over 0.01 dB for type " +
                                                           std::to_string(tx_type) + "x" +
                                                           std::to_string(rx_type));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "16 tx/rx combinations close, worst error %.2e dB", worst);
    return buf;
}

std::string fit_recovery() {
    const auto t0 = Clock::now();
    const double fspl_d0 = fspl_db(28.3e9, 1.0);

    char buf[160];
    std::string detail;
    for (const auto& [n_true, sigma_true] :
         std::vector<std::pair<double, double>>{{1.70, 3.0}, {1.94, 4.0}, {2.25, 8.0}}) {
        double n_sum = 0.0, sigma_sum = 0.0;
        const int seeds = 100;
        for (int seed = 0; seed < seeds; ++seed) {
            std::mt19937_64 rng(9000 + static_cast<std::uint64_t>(seed) +
                                static_cast<std::uint64_t>(n_true * 1000));
            std::uniform_real_distribution<double> d_dist(10.0, 200.0);
            std::normal_distribution<double> shadow(0.0, sigma_true);
            std::vector<PathLossSample> samples;
            samples.reserve(500);
            for (int i = 0; i < 500; ++i) {
                const double d = d_dist(rng);
                samples.push_back({d, fspl_d0 + 10.0 * n_true * std::log10(d) + shadow(rng),
                                   true, BeamCategory::Best, {}, 0.0});
            }
            const auto fit = fit_ci(samples, 28.3e9);
            n_sum += fit.n;
            sigma_sum += fit.sigma_db;
        }
        const double n_mean = n_sum / seeds;
        const double sigma_mean = sigma_sum / seeds;
        require(std::abs(n_mean - n_true) < 0.05, "exponent recovery outside +/-0.05");
        require(std::abs(sigma_mean - sigma_true) < 0.5, "sigma recovery outside +/-0.5 dB");
        std::snprintf(buf, sizeof(buf), "(%.2f,%.0f)->(%.3f,%.2f) ", n_true, sigma_true, n_mean,
                      sigma_mean);
        detail += buf;
    }
    const double elapsed = seconds_since(t0);
    require(elapsed < 30.0, "runtime over 30 s");
    std::snprintf(buf, sizeof(buf), "over 100 seeds in %.2f s", elapsed);
    return detail + buf;
}

std::string argmax_dominance() {
    const Scenario s = test_scenarios::drive_away(0.625);
    const auto cb = default_codebook();
    const auto run = Sounder(s, cb, test_scenarios::small_options(2)).simulate_run();
    const auto samples =
        extract_pathloss(run.records, s, cb, run.gps_rx, run.gps_tx, run.run_start_s);

    std::map<double, double> best_pl, bore_pl;
    std::vector<PathLossSample> best_samples, bore_samples;
    for (const auto& sample : samples) {
        if (sample.category == BeamCategory::Best) {
            best_pl[sample.distance_m] = sample.pathloss_db;
            best_samples.push_back(sample);
        } else {
            bore_pl[sample.distance_m] = sample.pathloss_db;
            bore_samples.push_back(sample);
        }
    }

    std::size_t compared = 0;
    for (const auto& [d, pl] : best_pl) {
        const auto it = bore_pl.find(d);
        if (it == bore_pl.end()) continue;
        require(pl <= it->second + 1e-12, "best-beam path loss exceeded boresight");
        compared++;
    }
    require(compared >= 90, "too few sweeps with both categories");

    // The reflector-assisted NLOS stretch drags the best-beam exponent
    // below the boresight one.
    const auto fit_best = fit_ci(local_square_average(best_samples, 4.0), s.carrier_freq_hz);
    const auto fit_bore = fit_ci(local_square_average(bore_samples, 4.0), s.carrier_freq_hz);
    require(fit_best.n < fit_bore.n, "expected a strictly smaller best-beam exponent");

    char buf[128];
    std::snprintf(buf, sizeof(buf), "dominance on %zu sweeps; n_best %.3f < n_boresight %.3f",
                  compared, fit_best.n, fit_bore.n);
    return buf;
}

std::string oracle_equivalence() {
    std::mt19937_64 rng(314);
    std::normal_distribution<double> gauss;

    // Transform correlation against the O(N^2) direct sum.
    for (std::size_t n : {16, 64, 256}) {
        std::vector<Complex> rx(n), ref(n);
        for (auto& v : rx) v = Complex(gauss(rng), gauss(rng));
        for (auto& v : ref) v = Complex(gauss(rng), gauss(rng));
        const auto fast =
            circular_xcorr({rx, 1e-6}, {ref, 1e-6}).front().samples;
        const auto direct = oracles::direct_xcorr(rx, ref);
        double scale = 0.0;
        for (const auto& v : direct) scale = std::max(scale, std::abs(v));
        for (std::size_t m = 0; m < n; ++m)
            require(std::abs(fast[m] - direct[m]) < 1e-9 * scale,
                    "correlation mismatch at N=" + std::to_string(n));
    }

    // Channel application against the direct tap-line convolution.
    std::uniform_int_distribution<std::size_t> n_taps(1, 5);
    std::uniform_int_distribution<std::size_t> delay_dist(0, 63);
    for (int trial = 0; trial < 100; ++trial) {
        ComplexSequence x;
        x.sample_period = 1e-6;
        x.samples.resize(64);
        for (auto& v : x.samples) v = Complex(gauss(rng), gauss(rng));

        const std::size_t taps = n_taps(rng);
        std::vector<Ray> rays(taps);
        std::vector<double> zero_gain(taps, 0.0);
        std::vector<std::size_t> delays(taps);
        std::vector<Complex> amps(taps);
        for (std::size_t i = 0; i < taps; ++i) {
            delays[i] = delay_dist(rng);
            rays[i].delay_s = static_cast<double>(delays[i]) * x.sample_period;
            rays[i].gain = Complex(gauss(rng), gauss(rng)) * 0.2;
            amps[i] = rays[i].gain;
        }
        const auto fast = apply_channel(x, rays, zero_gain, zero_gain);
        const auto direct = oracles::direct_cyclic_taps(x.samples, delays, amps);
        for (std::size_t k = 0; k < 64; ++k)
            require(std::abs(fast.samples[k] - direct[k]) < 1e-12,
                    "channel mismatch against the convolution oracle");
    }
    return "fft correlation at N in {16,64,256} and 100 random channels match";
}

std::string codebook_structure() {
    const auto cb = default_codebook();
    require(cb.cells_total() == 200, "expected 200 cells");

    std::array<std::size_t, 4> counts{};
    for (const auto& b : cb.beams()) counts[static_cast<std::size_t>(b.sector)]++;
    for (auto c : counts) require(c == 50, "sector does not hold 50 beams");

    const std::size_t per = cb.beams_per_sector();
    for (std::size_t i = 0; i < 3 * per; ++i) {
        const Beam& beam = cb.beams()[i];
        const Beam& next = cb.beams()[i + per];
        require(wrap_deg(beam.center.azimuth_deg + 90.0) == next.center.azimuth_deg &&
                    beam.center.elevation_deg == next.center.elevation_deg,
                "90-degree rotation symmetry broken");
    }

    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> az(-180.0, 180.0);
    std::uniform_real_distribution<double> el(-30.0, 30.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const Direction dir{az(rng), el(rng)};
        require(cb.nearest_beam(dir).index == oracles::brute_nearest_beam(cb, dir).index,
                "nearest beam differs from the exhaustive argmin");
    }
    return "200 cells, 50/sector, exact rotation symmetry, 1000 argmin checks";
}

std::string determinism() {
    const fs::path dir = fs::temp_directory_path() / "mmsounder_acceptance";
    fs::create_directories(dir);
    const auto cb_path = dir / "cb.csv";
    default_codebook().save_csv(cb_path);

    Scenario scenario = test_scenarios::drive_away(0.25);
    scenario.noise_enabled = true;
    scenario.gps_sigma_m = 0.3;
    const auto scenario_path = dir / "scenario.json";
    save_scenario(scenario, scenario_path);

    const std::string base = "simulate --scenario " + scenario_path.string() + " --codebook " +
                             cb_path.string() +
                             " --zc-length 64 --zc-root 21 --sample-rate 512e3";
    require(run_cli(base + " --seed 11 --out " + (dir / "a").string()) == 0, "run A failed");
    require(run_cli(base + " --seed 11 --out " + (dir / "b").string()) == 0, "run B failed");
    require(run_cli(base + " --seed 12 --out " + (dir / "c").string()) == 0, "run C failed");

    require(read_file(dir / "a" / "capture.csv") == read_file(dir / "b" / "capture.csv"),
            "same seed must give byte-identical captures");
    require(read_file(dir / "a" / "gps_rx.csv") == read_file(dir / "b" / "gps_rx.csv"),
            "same seed must give byte-identical GPS logs");

    const auto rec_a = read_capture_csv(dir / "a" / "capture.csv");
    const auto rec_c = read_capture_csv(dir / "c" / "capture.csv");
    require(rec_a.size() == rec_c.size(), "seed change altered the record count");
    bool power_differs = false;
    for (std::size_t i = 0; i < rec_a.size(); ++i) {
        require(rec_a[i].sweep_index == rec_c[i].sweep_index &&
                    rec_a[i].timestamp_ns == rec_c[i].timestamp_ns &&
                    rec_a[i].beam_index == rec_c[i].beam_index,
                "seed change altered a noise-free field");
        if (rec_a[i].rx_power_dbm != rec_c[i].rx_power_dbm) power_differs = true;
    }
    require(power_differs, "different seeds produced identical noise");
    return "byte-identical reruns; different seed changes only noisy fields";
}

std::string histogram_wellformed() {
    const Scenario s = test_scenarios::roof_reflection(0.125);
    const auto cb = default_codebook();
    const auto run = Sounder(s, cb, test_scenarios::small_options()).simulate_run();
    const auto samples =
        extract_pathloss(run.records, s, cb, run.gps_rx, run.gps_tx, run.run_start_s);
    const auto hist = elevation_histogram(samples, cb);

    double total = 0.0;
    for (double f : hist.fractions) total += f;
    require(std::abs(total - 1.0) < 1e-12, "fractions do not sum to 1");

    const auto mode = static_cast<std::size_t>(
        std::max_element(hist.fractions.begin(), hist.fractions.end()) - hist.fractions.begin());
    require(hist.row_elevations_deg[mode] < 0.0, "mode not at a negative-elevation row");

    char buf[128];
    std::snprintf(buf, sizeof(buf), "fractions sum to 1; mode at %.0f deg row",
                  hist.row_elevations_deg[mode]);
    return buf;
}

}  // namespace

int main() {
    std::printf("mmsounder acceptance suite\n");
    criterion(1, "zc-ideality", zc_ideality);
    criterion(2, "timing-reproduction", timing_reproduction);
    criterion(3, "ota-verification-twin", ota_verification_twin);
    criterion(4, "link-budget-closure", link_budget_closure);
    criterion(5, "fit-recovery", fit_recovery);
    criterion(6, "argmax-dominance", argmax_dominance);
    criterion(7, "oracle-equivalence", oracle_equivalence);
    criterion(8, "codebook-structure", codebook_structure);
    criterion(9, "determinism", determinism);
    criterion(10, "histogram-wellformed", histogram_wellformed);

    if (g_failures == 0) {
        std::printf("all %d criteria passed\n", 10);
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
