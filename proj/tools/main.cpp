// mmsounder command-line front end: codebook generation, sweep simulation,
// measurement analysis, and the built-in boresight verification scenario.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mmsounder/analysis.hpp"
#include "mmsounder/capture_io.hpp"
#include "mmsounder/channel.hpp"
#include "mmsounder/codebook.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/sounder.hpp"
#include "mmsounder/waveform.hpp"

namespace fs = std::filesystem;
using namespace mmsounder;

namespace {

constexpr const char* kToolName = "mmsounder";
constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 ok, 1 failed verification checks, 2 validation errors,
// 3 runtime errors.
constexpr int kExitChecksFailed = 1;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CodebookArgs {
    std::size_t cells = 200;
    double elevation_span = 60.0;
    int beam_type = 2;
    std::string out;
};

int cmd_codebook(const CodebookArgs& args) {
    const Codebook cb = Codebook::make(args.elevation_span, args.cells, BeamType::rx(args.beam_type));
    cb.save_csv(args.out);

    std::vector<std::size_t> counts(4, 0);
    for (const auto& b : cb.beams()) counts[static_cast<std::size_t>(b.sector)]++;
    std::printf("wrote %zu beams to %s\n", cb.cells_total(), args.out.c_str());
    for (int s = 0; s < 4; ++s)
        std::printf("  sector %d (boresight %3d deg): %zu beams\n", s, s * 90,
                    counts[static_cast<std::size_t>(s)]);
    std::printf("  elevation rows:");
    for (double el : cb.elevation_rows()) std::printf(" %.3f", el);
    std::printf(" deg\n");
    return 0;
}

struct SimulateArgs {
    std::string scenario_path;
    std::string codebook_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool write_pdp = false;
    unsigned threads = 0;
    std::size_t zc_length = 8192;
    std::size_t zc_root = 1729;
    double sample_rate = 65.536e6;
};

int cmd_simulate(const SimulateArgs& args) {
    Scenario scenario = load_scenario(args.scenario_path);
    if (args.seed_set) scenario.rng_seed = args.seed;
    const Codebook codebook = Codebook::load_csv(args.codebook_path);

    SounderOptions options;
    options.threads = args.threads;
    options.zc = {args.zc_length, args.zc_root, args.sample_rate};
    const Sounder sounder(scenario, codebook, options);

    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);

    SimulationRun run;
    if (args.write_pdp) {
        PdpSidecarWriter pdp_writer(out / "pdp.bin", out / "pdp_index.csv");
        run = sounder.simulate_run(
            [&](const SweepRecord& rec, const Pdp& pdp) { pdp_writer.append(rec, pdp); });
        pdp_writer.close();
    } else {
        run = sounder.simulate_run();
    }

    write_capture_csv(out / "capture.csv", run.records, codebook);
    write_gps_csv(out / "gps_rx.csv", run.gps_rx);
    write_gps_csv(out / "gps_tx.csv", run.gps_tx);
    fs::copy_file(args.scenario_path, out / "scenario.json", fs::copy_options::overwrite_existing);
    fs::copy_file(args.codebook_path, out / "codebook.csv", fs::copy_options::overwrite_existing);

    RunManifest manifest;
    manifest.tool = kToolName;
    manifest.version = kToolVersion;
    manifest.command = "simulate";
    manifest.scenario_path = args.scenario_path;
    manifest.scenario_hash = file_hash_fnv1a(args.scenario_path);
    manifest.codebook_path = args.codebook_path;
    manifest.codebook_hash = file_hash_fnv1a(args.codebook_path);
    manifest.seed = scenario.rng_seed;
    manifest.out_dir = args.out_dir;
    manifest.run_start_s = run.run_start_s;
    manifest.sweep_count = run.sweep_count;
    manifest.averaging_m = scenario.averaging_m;
    manifest.save(out / "manifest.json");

    std::printf("simulated %llu sweeps (%zu records) into %s\n",
                static_cast<unsigned long long>(run.sweep_count), run.records.size(),
                args.out_dir.c_str());
    std::printf("  sweep duration %.3f ms, dwell %.0f us, %zu gps fixes per log\n",
                static_cast<double>(sounder.sweep_duration_ns()) * 1e-6,
                static_cast<double>(sounder.dwell_duration_ns()) * 1e-3, run.gps_rx.size());
    return 0;
}

struct AnalyzeArgs {
    std::string run_dir;
    std::string out_dir;
    double square = 4.0;
    std::uint32_t heatmap_sweep = 0;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const fs::path run(args.run_dir);
    const RunManifest manifest = RunManifest::load(run / "manifest.json");
    const Scenario scenario = load_scenario(run / "scenario.json");
    const Codebook codebook = Codebook::load_csv(run / "codebook.csv");
    const auto records = read_capture_csv(run / "capture.csv");
    const auto gps_rx = read_gps_csv(run / "gps_rx.csv");
    const auto gps_tx = read_gps_csv(run / "gps_tx.csv");

    AnalysisOptions options;
    options.square_side_m = args.square;
    options.heatmap_sweep = args.heatmap_sweep;
    const AnalysisReport report = run_analysis(records, scenario, codebook, gps_rx, gps_tx,
                                               manifest.run_start_s, options);

    const fs::path out = args.out_dir.empty() ? run / "report" : fs::path(args.out_dir);
    write_analysis_report(out, report);

    RunManifest report_manifest = manifest;
    report_manifest.command = "analyze";
    report_manifest.out_dir = out.string();
    report_manifest.save(out / "manifest.json");

    std::printf("analysis report written to %s\n", out.string().c_str());
    std::printf("  %zu best / %zu boresight averaged samples (square %.1f m)\n",
                report.best.size(), report.boresight.size(), args.square);
    for (const auto& row : report.fits)
        std::printf("  fit %s/%s: n=%.3f sigma=%.2f dB over %zu samples\n",
                    to_string(row.category), row.los ? "los" : "nlos", row.fit.n,
                    row.fit.sigma_db, row.fit.sample_count);
    for (const auto& note : report.notes) std::printf("  note: %s\n", note.c_str());
    return 0;
}

// Verification twin of the anechoic-chamber procedure: TX and RX arrays
// 17 ft apart in boresight, noise disabled.
Scenario make_anechoic_scenario() {
    Scenario s;
    s.carrier_freq_hz = 28.3e9;
    s.tx_power_dbm = -12.0;
    s.tx_beam_type = BeamType::tx(3);
    s.rx_beam_type = BeamType::rx(2);
    s.noise_enabled = false;
    s.averaging_m = 1;
    s.gps_sigma_m = 0.0;
    s.rng_seed = 1;

    const double separation_m = 17.0 * 0.3048;  // 17 ft
    s.rx_trajectory.waypoints = {{0.0, {0.0, 0.0, 0.0}}};
    s.rx_trajectory.heading_override_deg = 0.0;
    s.tx_trajectory.waypoints = {{0.0, {0.0, separation_m, 0.0}}};
    s.tx_boresight = {180.0, 0.0};  // pointing back at the RX
    return s;
}

struct VerifyArgs {
    std::string out_dir;  // optional heatmap dump
};

int cmd_verify(const VerifyArgs& args) {
    int failures = 0;
    auto check = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("[%s] %-18s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        if (!ok) failures++;
    };
    char detail[256];

    // 1. Sounding sequence ideality: peak N at lag 0, nothing elsewhere.
    {
        const ZcConfig zc_cfg;
        const auto zc = generate_zc(zc_cfg);
        const auto corr = circular_xcorr(zc, zc).front();
        const double n = static_cast<double>(zc_cfg.n_zc);
        double off_peak = 0.0;
        for (std::size_t k = 1; k < corr.samples.size(); ++k)
            off_peak = std::max(off_peak, std::abs(corr.samples[k]));
        const double peak = std::abs(corr.samples[0]);
        std::snprintf(detail, sizeof(detail), "peak %.3f (N=%zu), max off-peak %.3e",
                      peak, zc_cfg.n_zc, off_peak);
        check("zc-autocorrelation", std::abs(peak - n) < 1e-6 * n && off_peak < 1e-6 * n, detail);
    }

    const Scenario scenario = make_anechoic_scenario();
    const Codebook codebook = Codebook::make(60.0, 200, scenario.rx_beam_type);
    const Sounder sounder(scenario, codebook, {});
    const auto records = sounder.run_sweep(0, 0.0);

    const double separation_m = 17.0 * 0.3048;
    const double fspl_expected = fspl_db(scenario.carrier_freq_hz, separation_m);
    const double budget = scenario.tx_power_dbm + scenario.tx_beam_type.boresight_gain_db +
                          scenario.rx_beam_type.boresight_gain_db;

    double best_power = records[0].rx_power_dbm;
    std::uint32_t best_beam = records[0].beam_index;
    for (const auto& r : records) {
        if (r.rx_power_dbm > best_power) {
            best_power = r.rx_power_dbm;
            best_beam = r.beam_index;
        }
    }

    // 2. Link budget closure at boresight.
    {
        const double expected = budget - fspl_expected;
        std::snprintf(detail, sizeof(detail), "rx %.4f dBm, budget %.4f dBm", best_power,
                      expected);
        check("link-budget", std::abs(best_power - expected) < 0.01, detail);
    }

    // 3. Measured path loss against the published chamber value and the
    //    closed-form free-space loss.
    {
        const double measured_pl = budget - best_power;
        std::snprintf(detail, sizeof(detail),
                      "measured %.4f dB, closed form %.4f dB, reference 75.67 dB", measured_pl,
                      fspl_expected);
        check("fspl-17ft",
              std::abs(measured_pl - 75.67) < 0.2 && std::abs(measured_pl - fspl_expected) < 0.01,
              detail);
    }

    // 4. Scan timing: 200 beams in 50 slots of 125 us -> 6.25 ms.
    {
        std::vector<std::int64_t> stamps;
        stamps.reserve(records.size());
        for (const auto& r : records) stamps.push_back(r.timestamp_ns);
        std::sort(stamps.begin(), stamps.end());
        stamps.erase(std::unique(stamps.begin(), stamps.end()), stamps.end());
        bool spacing_ok = stamps.size() == sounder.slots_per_sweep();
        for (std::size_t i = 1; i < stamps.size() && spacing_ok; ++i)
            spacing_ok = stamps[i] - stamps[i - 1] == 125000;
        const bool duration_ok = sounder.sweep_duration_ns() == 6250000;
        std::snprintf(detail, sizeof(detail), "%zu slots, dwell 125000 ns, scan %.2f ms",
                      stamps.size(), static_cast<double>(sounder.sweep_duration_ns()) * 1e-6);
        check("scan-timing", spacing_ok && duration_ok, detail);
    }

    // 5. Heatmap hot spot at the geometric TX direction.
    {
        const EnuPosition rx = scenario.rx_trajectory.waypoints.front().position;
        const EnuPosition tx = scenario.tx_trajectory.waypoints.front().position;
        const Direction tx_dir =
            los_direction(rx, *scenario.rx_trajectory.heading_override_deg, tx);
        const Beam& expected = codebook.nearest_beam(tx_dir);
        std::snprintf(detail, sizeof(detail), "hot spot beam %u at (%.1f, %.1f) deg, expected %zu",
                      best_beam, codebook.beams()[best_beam].center.azimuth_deg,
                      codebook.beams()[best_beam].center.elevation_deg, expected.index);
        check("heatmap-hotspot", best_beam == expected.index, detail);

        if (!args.out_dir.empty()) {
            fs::create_directories(args.out_dir);
            const fs::path out(args.out_dir);
            AnalysisReport report;
            report.heatmap = heatmap_export(records, codebook);
            report.heatmap_sweep = 0;
            write_analysis_report(out, report);
            write_capture_csv(out / "capture.csv", records, codebook);
            save_scenario(scenario, out / "scenario.json");
            codebook.save_csv(out / "codebook.csv");

            RunManifest manifest;
            manifest.tool = kToolName;
            manifest.version = kToolVersion;
            manifest.command = "verify";
            manifest.scenario_path = (out / "scenario.json").string();
            manifest.scenario_hash = file_hash_fnv1a(out / "scenario.json");
            manifest.codebook_path = (out / "codebook.csv").string();
            manifest.codebook_hash = file_hash_fnv1a(out / "codebook.csv");
            manifest.seed = scenario.rng_seed;
            manifest.out_dir = args.out_dir;
            manifest.sweep_count = 1;
            manifest.averaging_m = scenario.averaging_m;
            manifest.save(out / "manifest.json");
        }
    }

    std::printf("%s\n", failures == 0 ? "all checks passed" : "verification FAILED");
    return failures == 0 ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Software twin of a beam-sweeping mmWave channel sounder"};
    app.require_subcommand(1);

    CodebookArgs cb_args;
    auto* cb = app.add_subcommand("codebook", "Generate the hexagonal beam codebook CSV");
    cb->add_option("--cells", cb_args.cells, "Total beam count (divisible by 4)")
        ->capture_default_str();
    cb->add_option("--elevation-span", cb_args.elevation_span,
                   "Total elevation coverage, degrees")
        ->capture_default_str();
    cb->add_option("--beam-type", cb_args.beam_type, "RX beam type 1..4")
        ->capture_default_str();
    cb->add_option("--out", cb_args.out, "Output CSV path")->required();

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Run the sweep simulation and write a capture");
    sim->add_option("--scenario", sim_args.scenario_path, "Scenario JSON")->required();
    sim->add_option("--codebook", sim_args.codebook_path, "Codebook CSV")->required();
    sim->add_option("--out", sim_args.out_dir, "Output run directory")->required();
    auto* seed_opt = sim->add_option("--seed", sim_args.seed, "Override the scenario RNG seed");
    sim->add_flag("--pdp", sim_args.write_pdp, "Write the binary PDP sidecar");
    sim->add_option("--threads", sim_args.threads, "Worker threads (0 = auto)");
    sim->add_option("--zc-length", sim_args.zc_length, "Sounding sequence length N_ZC")
        ->capture_default_str();
    sim->add_option("--zc-root", sim_args.zc_root, "Sounding sequence root index u")
        ->capture_default_str();
    sim->add_option("--sample-rate", sim_args.sample_rate, "Sample rate, Hz")
        ->capture_default_str();

    AnalyzeArgs an_args;
    auto* an = app.add_subcommand("analyze", "Extract path loss and fit the close-in model");
    an->add_option("--run", an_args.run_dir, "Run directory from `simulate`")->required();
    an->add_option("--out", an_args.out_dir, "Report directory (default <run>/report)");
    an->add_option("--square", an_args.square, "Local averaging square side, meters")
        ->capture_default_str();
    an->add_option("--heatmap-sweep", an_args.heatmap_sweep, "Sweep index to export as heatmap")
        ->capture_default_str();

    VerifyArgs ver_args;
    auto* ver = app.add_subcommand("verify", "Run the built-in boresight verification checks");
    ver->add_option("--out", ver_args.out_dir, "Optional directory for the verification heatmap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (cb->parsed()) return cmd_codebook(cb_args);
        if (sim->parsed()) {
            sim_args.seed_set = seed_opt->count() > 0;
            return cmd_simulate(sim_args);
        }
        if (an->parsed()) return cmd_analyze(an_args);
        if (ver->parsed()) return cmd_verify(ver_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
