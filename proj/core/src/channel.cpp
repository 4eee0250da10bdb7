#include "mmsounder/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mmsounder/rng.hpp"

namespace mmsounder {

double fspl_db(double freq_hz, double distance_m) {
    if (!(freq_hz > 0.0) || !(distance_m > 0.0))
        throw std::domain_error("fspl: frequency and distance must be positive");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * freq_hz / kSpeedOfLight);
}

namespace {

Complex ray_amplitude(double path_loss_db, double carrier_freq_hz, double delay_s) {
    const double mag = std::pow(10.0, -path_loss_db / 20.0);
    const double phase = -2.0 * std::numbers::pi * carrier_freq_hz * delay_s;
    return std::polar(mag, phase);
}

}  // namespace

std::vector<Ray> build_rays(const Scenario& scenario, double t_s) {
    const EnuPosition tx = interpolate_position(scenario.tx_trajectory, t_s);
    const EnuPosition rx = interpolate_position(scenario.rx_trajectory, t_s);
    const double rx_heading = trajectory_heading(scenario.rx_trajectory, t_s);
    const double f = scenario.carrier_freq_hz;

    std::vector<Ray> rays;
    if (scenario.los_clear(t_s)) {
        const double d = distance_3d_m(tx, rx);
        if (d > 0.0) {
            Ray ray;
            ray.delay_s = d / kSpeedOfLight;
            ray.gain = ray_amplitude(fspl_db(f, d), f, ray.delay_s);
            ray.aoa = los_direction(rx, rx_heading, tx);
            ray.aod = {bearing_deg(tx, rx),
                       std::atan2(rx.up_m - tx.up_m, horizontal_distance_m(tx, rx)) * 180.0 /
                           std::numbers::pi};
            ray.is_los = true;
            rays.push_back(ray);
        }
    }

    for (const auto& refl : scenario.reflectors) {
        const double leg_tx = distance_3d_m(tx, refl.position);
        const double leg_rx = distance_3d_m(refl.position, rx);
        if (leg_tx == 0.0 || leg_rx == 0.0) continue;
        const double total = leg_tx + leg_rx;
        Ray ray;
        ray.delay_s = total / kSpeedOfLight;
        ray.gain = ray_amplitude(fspl_db(f, total) + refl.loss_db, f, ray.delay_s);
        ray.aoa = los_direction(rx, rx_heading, refl.position);
        ray.aod = {bearing_deg(tx, refl.position),
                   std::atan2(refl.position.up_m - tx.up_m,
                              horizontal_distance_m(tx, refl.position)) *
                       180.0 / std::numbers::pi};
        ray.is_los = false;
        rays.push_back(ray);
    }
    return rays;
}

ComplexSequence apply_channel(const ComplexSequence& tx_signal, const std::vector<Ray>& rays,
                              const std::vector<double>& tx_gains_db,
                              const std::vector<double>& rx_gains_db) {
    if (tx_gains_db.size() != rays.size() || rx_gains_db.size() != rays.size())
        throw std::invalid_argument("apply_channel: one tx/rx gain per ray required");
    const std::size_t n = tx_signal.size();
    ComplexSequence out;
    out.sample_period = tx_signal.sample_period;
    out.samples.assign(n, Complex(0.0, 0.0));
    if (n == 0) return out;

    for (std::size_t i = 0; i < rays.size(); ++i) {
        const Complex amp =
            rays[i].gain * std::pow(10.0, (tx_gains_db[i] + rx_gains_db[i]) / 20.0);
        const auto shift = static_cast<std::size_t>(
            std::llround(rays[i].delay_s / tx_signal.sample_period) %
            static_cast<long long>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t src = (k + n - shift) % n;
            out.samples[k] += amp * tx_signal.samples[src];
        }
    }
    return out;
}

double noise_power_dbm(double noise_figure_db, double sample_rate_hz) {
    return -174.0 + 10.0 * std::log10(sample_rate_hz) + noise_figure_db;
}

ComplexSequence add_noise(const ComplexSequence& signal, double noise_figure_db,
                          double sample_rate_hz, std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t substream) {
    const double power = std::pow(10.0, noise_power_dbm(noise_figure_db, sample_rate_hz) / 10.0);
    const double sigma_per_axis = std::sqrt(power / 2.0);

    GaussianSampler gauss(make_engine(seed, stream, substream));
    ComplexSequence out = signal;
    for (auto& v : out.samples) {
        const double re = gauss.next();
        const double im = gauss.next();
        v += Complex(sigma_per_axis * re, sigma_per_axis * im);
    }
    return out;
}

}  // namespace mmsounder
