// Ray-based time-varying multipath channel: free-space path loss, ray
// construction from scenario geometry, channel application and noise.

#pragma once

#include <cstdint>
#include <vector>

#include "mmsounder/codebook.hpp"
#include "mmsounder/geo.hpp"
#include "mmsounder/scenario.hpp"
#include "mmsounder/waveform.hpp"

namespace mmsounder {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// One propagation path. `gain` is the complex linear amplitude including
// path loss and any reflection loss; beam gains are applied separately.
struct Ray {
    double delay_s = 0.0;
    Complex gain;
    Direction aoa;  // at RX, in the RX body frame
    Direction aod;  // at TX, global compass frame
    bool is_los = false;
};

// Free-space path loss 20*log10(4*pi*d*f/c), dB.
// Throws std::domain_error on nonpositive inputs.
double fspl_db(double freq_hz, double distance_m);

// Rays at time t: the LOS path when t is outside every blocked interval,
// plus one specular path per reflector. Ray phase is -2*pi*f*delay.
// Throws std::out_of_range when t is outside either trajectory span.
std::vector<Ray> build_rays(const Scenario& scenario, double t_s);

// r[k] = sum_i gain_i * 10^((tx_gain_i + rx_gain_i)/20) * x[(k - d_i) mod N]
// with d_i = round(delay_i / T_s): the cyclic sounding signal through the
// multipath channel, delays quantized to the sample grid.
ComplexSequence apply_channel(const ComplexSequence& tx_signal, const std::vector<Ray>& rays,
                              const std::vector<double>& tx_gains_db,
                              const std::vector<double>& rx_gains_db);

// Thermal noise power at the capture plane, dBm:
// -174 + 10*log10(sample_rate) + noise_figure.
double noise_power_dbm(double noise_figure_db, double sample_rate_hz);

// Adds circular complex Gaussian noise of the power above, in the same
// dBm-referenced amplitude plane as the received signal. The stream is
// fully determined by (seed, stream, substream).
ComplexSequence add_noise(const ComplexSequence& signal, double noise_figure_db,
                          double sample_rate_hz, std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t substream);

}  // namespace mmsounder
