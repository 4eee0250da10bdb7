// On-disk run formats: capture CSV, GPS fix logs, the binary PDP sidecar
// with its offset table, and the run manifest.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mmsounder/codebook.hpp"
#include "mmsounder/geo.hpp"
#include "mmsounder/sounder.hpp"

namespace mmsounder {

// capture.csv, header:
//   sweep_index,timestamp_ns,beam_index,azimuth_deg,elevation_deg,rx_power_dbm,below_floor
void write_capture_csv(const std::filesystem::path& path,
                       const std::vector<SweepRecord>& records, const Codebook& codebook);
std::vector<SweepRecord> read_capture_csv(const std::filesystem::path& path);

// gps_*.csv, header: timestamp_ns,east_m,north_m,up_m,fix_quality
// Timestamps are on the run clock. fix_quality is 4 (RTK fixed) when sigma
// stays below 1 m, else 1 (plain GPS).
void write_gps_csv(const std::filesystem::path& path, const std::vector<GpsFix>& fixes);
std::vector<GpsFix> read_gps_csv(const std::filesystem::path& path);

// PDP sidecar: pdp.bin holds one record per dwell, n_zc little-endian
// float32 dB values back to back; pdp_index.csv maps
// (sweep_index, beam_index) -> byte offset.
class PdpSidecarWriter {
  public:
    PdpSidecarWriter(const std::filesystem::path& bin_path,
                     const std::filesystem::path& index_path);
    ~PdpSidecarWriter();
    void append(const SweepRecord& record, const Pdp& pdp);
    void close();

  private:
    std::ofstream bin_;
    std::ofstream index_;
    std::uint64_t offset_ = 0;
};

Pdp read_pdp_sidecar(const std::filesystem::path& bin_path,
                     const std::filesystem::path& index_path, std::uint32_t sweep_index,
                     std::uint32_t beam_index);

// FNV-1a 64-bit content hash, hex string; used for manifest provenance.
std::string file_hash_fnv1a(const std::filesystem::path& path);

struct RunManifest {
    std::string tool;
    std::string version;
    std::string command;
    std::string scenario_path;
    std::string scenario_hash;
    std::string codebook_path;
    std::string codebook_hash;
    std::uint64_t seed = 0;
    std::string out_dir;
    double run_start_s = 0.0;
    std::uint64_t sweep_count = 0;
    std::uint32_t averaging_m = 1;

    void save(const std::filesystem::path& path) const;
    static RunManifest load(const std::filesystem::path& path);
};

}  // namespace mmsounder
