#include "mmsounder/capture_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmsounder {

namespace {

constexpr char kCaptureHeader[] =
    "sweep_index,timestamp_ns,beam_index,azimuth_deg,elevation_deg,rx_power_dbm,below_floor";
constexpr char kGpsHeader[] = "timestamp_ns,east_m,north_m,up_m,fix_quality";

std::ifstream open_checked(const std::filesystem::path& path, const char* header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != header)
        throw std::runtime_error("unexpected header in " + path.string() + ": " + line);
    return in;
}

}  // namespace

void write_capture_csv(const std::filesystem::path& path,
                       const std::vector<SweepRecord>& records, const Codebook& codebook) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << kCaptureHeader << "\n";
    char line[256];
    for (const auto& r : records) {
        const Beam& beam = codebook.beams().at(r.beam_index);
        std::snprintf(line, sizeof(line), "%u,%lld,%u,%.6f,%.6f,%.4f,%d\n", r.sweep_index,
                      static_cast<long long>(r.timestamp_ns), r.beam_index,
                      beam.center.azimuth_deg, beam.center.elevation_deg, r.rx_power_dbm,
                      r.below_floor ? 1 : 0);
        out << line;
    }
}

std::vector<SweepRecord> read_capture_csv(const std::filesystem::path& path) {
    auto in = open_checked(path, kCaptureHeader);
    std::vector<SweepRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SweepRecord r;
        long long ts = 0;
        double az = 0.0, el = 0.0;
        int below = 0;
        if (std::sscanf(line.c_str(), "%u,%lld,%u,%lf,%lf,%lf,%d", &r.sweep_index, &ts,
                        &r.beam_index, &az, &el, &r.rx_power_dbm, &below) != 7)
            throw std::runtime_error("capture csv: malformed row: " + line);
        r.timestamp_ns = ts;
        r.below_floor = below != 0;
        records.push_back(r);
    }
    return records;
}

void write_gps_csv(const std::filesystem::path& path, const std::vector<GpsFix>& fixes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << kGpsHeader << "\n";
    char line[256];
    for (const auto& f : fixes) {
        const auto ts = static_cast<long long>(std::llround(f.t_s * 1e9));
        const int quality = f.noise_sigma_m < 1.0 ? 4 : 1;
        std::snprintf(line, sizeof(line), "%lld,%.4f,%.4f,%.4f,%d\n", ts, f.position.east_m,
                      f.position.north_m, f.position.up_m, quality);
        out << line;
    }
}

std::vector<GpsFix> read_gps_csv(const std::filesystem::path& path) {
    auto in = open_checked(path, kGpsHeader);
    std::vector<GpsFix> fixes;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        long long ts = 0;
        GpsFix f;
        int quality = 0;
        if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%d", &ts, &f.position.east_m,
                        &f.position.north_m, &f.position.up_m, &quality) != 5)
            throw std::runtime_error("gps csv: malformed row: " + line);
        f.t_s = static_cast<double>(ts) * 1e-9;
        f.noise_sigma_m = 0.0;  // not carried by the log format
        fixes.push_back(f);
    }
    return fixes;
}

PdpSidecarWriter::PdpSidecarWriter(const std::filesystem::path& bin_path,
                                   const std::filesystem::path& index_path)
    : bin_(bin_path, std::ios::binary), index_(index_path) {
    if (!bin_) throw std::runtime_error("cannot write: " + bin_path.string());
    if (!index_) throw std::runtime_error("cannot write: " + index_path.string());
    index_ << "sweep_index,beam_index,offset_bytes,bins\n";
}

PdpSidecarWriter::~PdpSidecarWriter() = default;

void PdpSidecarWriter::append(const SweepRecord& record, const Pdp& pdp) {
    static_assert(sizeof(float) == 4);
    std::vector<std::uint32_t> raw(pdp.bins_dbm.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto f = static_cast<float>(pdp.bins_dbm[i]);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        raw[i] = bits;
    }
    bin_.write(reinterpret_cast<const char*>(raw.data()),
               static_cast<std::streamsize>(raw.size() * 4));
    index_ << record.sweep_index << ',' << record.beam_index << ',' << offset_ << ','
           << raw.size() << "\n";
    offset_ += raw.size() * 4;
}

void PdpSidecarWriter::close() {
    bin_.close();
    index_.close();
}

Pdp read_pdp_sidecar(const std::filesystem::path& bin_path,
                     const std::filesystem::path& index_path, std::uint32_t sweep_index,
                     std::uint32_t beam_index) {
    std::ifstream index(index_path);
    if (!index) throw std::runtime_error("cannot open: " + index_path.string());
    std::string line;
    std::getline(index, line);  // header
    std::uint64_t offset = 0, bins = 0;
    bool found = false;
    while (std::getline(index, line)) {
        std::uint32_t s = 0, b = 0;
        unsigned long long off = 0, n = 0;
        if (std::sscanf(line.c_str(), "%u,%u,%llu,%llu", &s, &b, &off, &n) != 4) continue;
        if (s == sweep_index && b == beam_index) {
            offset = off;
            bins = n;
            found = true;
            break;
        }
    }
    if (!found)
        throw std::runtime_error("pdp sidecar: no record for sweep " +
                                 std::to_string(sweep_index) + " beam " +
                                 std::to_string(beam_index));

    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open: " + bin_path.string());
    bin.seekg(static_cast<std::streamoff>(offset));
    std::vector<std::uint32_t> raw(bins);
    bin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bins * 4));
    if (!bin) throw std::runtime_error("pdp sidecar: truncated read");

    Pdp pdp;
    pdp.bins_dbm.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        std::uint32_t bits = raw[i];
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        float f;
        std::memcpy(&f, &bits, 4);
        pdp.bins_dbm[i] = static_cast<double>(f);
    }
    return pdp;
}

std::string file_hash_fnv1a(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path.string());
    std::uint64_t h = 0xCBF29CE484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ULL;
        }
        if (!in) break;
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void RunManifest::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["tool"] = tool;
    j["version"] = version;
    j["command"] = command;
    j["inputs"]["scenario"] = {{"path", scenario_path}, {"fnv1a64", scenario_hash}};
    j["inputs"]["codebook"] = {{"path", codebook_path}, {"fnv1a64", codebook_hash}};
    j["seed"] = seed;
    j["out_dir"] = out_dir;
    j["run_start_s"] = run_start_s;
    j["sweep_count"] = sweep_count;
    j["averaging"] = averaging_m;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << j.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    nlohmann::json j;
    in >> j;
    RunManifest m;
    m.tool = j.value("tool", "");
    m.version = j.value("version", "");
    m.command = j.value("command", "");
    if (j.contains("inputs")) {
        const auto& inputs = j["inputs"];
        if (inputs.contains("scenario")) {
            m.scenario_path = inputs["scenario"].value("path", "");
            m.scenario_hash = inputs["scenario"].value("fnv1a64", "");
        }
        if (inputs.contains("codebook")) {
            m.codebook_path = inputs["codebook"].value("path", "");
            m.codebook_hash = inputs["codebook"].value("fnv1a64", "");
        }
    }
    m.seed = j.value("seed", std::uint64_t{0});
    m.out_dir = j.value("out_dir", "");
    m.run_start_s = j.value("run_start_s", 0.0);
    m.sweep_count = j.value("sweep_count", std::uint64_t{0});
    m.averaging_m = j.value("averaging", std::uint32_t{1});
    return m;
}

}  // namespace mmsounder
