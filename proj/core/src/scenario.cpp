#include "mmsounder/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmsounder {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("scenario: " + path + ": " + what);
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Trajectory parse_trajectory(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    Trajectory traj;
    if (!j.contains("waypoints") || !j["waypoints"].is_array() || j["waypoints"].empty())
        fail(path + ".waypoints", "expected a non-empty array of [t, east, north, up]");
    std::size_t i = 0;
    for (const auto& row : j["waypoints"]) {
        const std::string wp_path = path + ".waypoints[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != 4) fail(wp_path, "expected [t, east, north, up]");
        Waypoint wp;
        wp.t_s = require_number(row[0], wp_path + "[0]");
        wp.position = {require_number(row[1], wp_path + "[1]"),
                       require_number(row[2], wp_path + "[2]"),
                       require_number(row[3], wp_path + "[3]")};
        if (!traj.waypoints.empty() && !(wp.t_s > traj.waypoints.back().t_s))
            fail(wp_path + "[0]", "timestamps must be strictly increasing");
        traj.waypoints.push_back(wp);
        ++i;
    }
    if (j.contains("heading_deg"))
        traj.heading_override_deg = require_number(j["heading_deg"], path + ".heading_deg");
    return traj;
}

}  // namespace

void Scenario::validate() const {
    if (!(carrier_freq_hz > 0.0)) fail("carrier_freq_hz", "must be positive");
    if (tx_power_dbm > -12.0)
        fail("tx_power_dbm", "must be <= -12 dBm (safe array input level)");
    if (averaging_m < 1) fail("averaging", "must be >= 1");
    if (gps_sigma_m < 0.0) fail("gps_sigma_m", "must be >= 0");
    for (std::size_t i = 0; i < reflectors.size(); ++i)
        if (reflectors[i].loss_db < 0.0)
            fail("reflectors[" + std::to_string(i) + "].loss_db", "must be >= 0");
    for (std::size_t i = 0; i < los_blocked_intervals.size(); ++i)
        if (!(los_blocked_intervals[i].end_s > los_blocked_intervals[i].start_s))
            fail("los_blocked_intervals[" + std::to_string(i) + "]", "end must exceed start");
    try {
        tx_trajectory.validate();
    } catch (const std::exception& e) {
        fail("tx_trajectory", e.what());
    }
    try {
        rx_trajectory.validate();
    } catch (const std::exception& e) {
        fail("rx_trajectory", e.what());
    }
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("scenario: top level must be an object");

    Scenario s;
    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return fallback;
        return require_number(j[key], key);
    };
    s.carrier_freq_hz = num("carrier_freq_hz", s.carrier_freq_hz);
    s.tx_power_dbm = num("tx_power_dbm", s.tx_power_dbm);
    s.noise_figure_db = num("noise_figure_db", s.noise_figure_db);
    s.calibration_offset_db = num("calibration_offset_db", s.calibration_offset_db);
    s.measurement_floor_dbm = num("measurement_floor_dbm", s.measurement_floor_dbm);
    s.gps_sigma_m = num("gps_sigma_m", s.gps_sigma_m);

    if (j.contains("noise_enabled")) {
        if (!j["noise_enabled"].is_boolean()) fail("noise_enabled", "expected a boolean");
        s.noise_enabled = j["noise_enabled"].get<bool>();
    }
    if (j.contains("averaging")) {
        if (!j["averaging"].is_number_unsigned()) fail("averaging", "expected a positive integer");
        s.averaging_m = j["averaging"].get<std::uint32_t>();
    }
    if (j.contains("rng_seed")) {
        if (!j["rng_seed"].is_number_unsigned()) fail("rng_seed", "expected an unsigned integer");
        s.rng_seed = j["rng_seed"].get<std::uint64_t>();
    }
    if (j.contains("tx_beam_type")) {
        if (!j["tx_beam_type"].is_number_integer()) fail("tx_beam_type", "expected 1..4");
        try {
            s.tx_beam_type = BeamType::tx(j["tx_beam_type"].get<int>());
        } catch (const std::exception& e) {
            fail("tx_beam_type", e.what());
        }
    }
    if (j.contains("rx_beam_type")) {
        if (!j["rx_beam_type"].is_number_integer()) fail("rx_beam_type", "expected 1..4");
        try {
            s.rx_beam_type = BeamType::rx(j["rx_beam_type"].get<int>());
        } catch (const std::exception& e) {
            fail("rx_beam_type", e.what());
        }
    }
    s.tx_boresight.azimuth_deg = num("tx_boresight_az_deg", 0.0);
    s.tx_boresight.elevation_deg = num("tx_boresight_el_deg", 0.0);

    if (!j.contains("tx_trajectory")) fail("tx_trajectory", "missing");
    if (!j.contains("rx_trajectory")) fail("rx_trajectory", "missing");
    s.tx_trajectory = parse_trajectory(j["tx_trajectory"], "tx_trajectory");
    s.rx_trajectory = parse_trajectory(j["rx_trajectory"], "rx_trajectory");

    if (j.contains("reflectors")) {
        if (!j["reflectors"].is_array()) fail("reflectors", "expected an array");
        std::size_t i = 0;
        for (const auto& r : j["reflectors"]) {
            const std::string rp = "reflectors[" + std::to_string(i) + "]";
            if (!r.is_object() || !r.contains("position_m")) fail(rp, "expected {position_m, loss_db}");
            const auto& p = r["position_m"];
            if (!p.is_array() || p.size() != 3) fail(rp + ".position_m", "expected [east, north, up]");
            Reflector refl;
            refl.position = {require_number(p[0], rp + ".position_m[0]"),
                             require_number(p[1], rp + ".position_m[1]"),
                             require_number(p[2], rp + ".position_m[2]")};
            refl.loss_db = r.contains("loss_db") ? require_number(r["loss_db"], rp + ".loss_db") : 0.0;
            s.reflectors.push_back(refl);
            ++i;
        }
    }
    if (j.contains("los_blocked_intervals_s")) {
        if (!j["los_blocked_intervals_s"].is_array())
            fail("los_blocked_intervals_s", "expected an array of [start, end]");
        std::size_t i = 0;
        for (const auto& iv : j["los_blocked_intervals_s"]) {
            const std::string ip = "los_blocked_intervals_s[" + std::to_string(i) + "]";
            if (!iv.is_array() || iv.size() != 2) fail(ip, "expected [start, end]");
            s.los_blocked_intervals.push_back(
                {require_number(iv[0], ip + "[0]"), require_number(iv[1], ip + "[1]")});
            ++i;
        }
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    json j;
    j["carrier_freq_hz"] = s.carrier_freq_hz;
    j["tx_power_dbm"] = s.tx_power_dbm;
    j["tx_beam_type"] = s.tx_beam_type.id;
    j["rx_beam_type"] = s.rx_beam_type.id;
    j["tx_boresight_az_deg"] = s.tx_boresight.azimuth_deg;
    j["tx_boresight_el_deg"] = s.tx_boresight.elevation_deg;
    j["noise_figure_db"] = s.noise_figure_db;
    j["noise_enabled"] = s.noise_enabled;
    j["averaging"] = s.averaging_m;
    j["calibration_offset_db"] = s.calibration_offset_db;
    j["measurement_floor_dbm"] = s.measurement_floor_dbm;
    j["gps_sigma_m"] = s.gps_sigma_m;
    j["rng_seed"] = s.rng_seed;

    auto traj_json = [](const Trajectory& t) {
        json out;
        out["waypoints"] = json::array();
        for (const auto& wp : t.waypoints)
            out["waypoints"].push_back(
                {wp.t_s, wp.position.east_m, wp.position.north_m, wp.position.up_m});
        if (t.heading_override_deg) out["heading_deg"] = *t.heading_override_deg;
        return out;
    };
    j["tx_trajectory"] = traj_json(s.tx_trajectory);
    j["rx_trajectory"] = traj_json(s.rx_trajectory);

    j["reflectors"] = json::array();
    for (const auto& r : s.reflectors)
        j["reflectors"].push_back(
            {{"position_m", {r.position.east_m, r.position.north_m, r.position.up_m}},
             {"loss_db", r.loss_db}});
    j["los_blocked_intervals_s"] = json::array();
    for (const auto& iv : s.los_blocked_intervals)
        j["los_blocked_intervals_s"].push_back({iv.start_s, iv.end_s});

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario: " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace mmsounder
