#include "mmsounder/waveform.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace mmsounder {

void ZcConfig::validate() const {
    if (n_zc == 0) throw std::invalid_argument("zc: n_zc must be positive");
    if (u == 0 || u >= n_zc)
        throw std::invalid_argument("zc: root index u must satisfy 0 < u < n_zc (got u=" +
                                    std::to_string(u) + ", n_zc=" + std::to_string(n_zc) + ")");
    if (std::gcd(n_zc, u) != 1)
        throw std::invalid_argument("zc: gcd(n_zc, u) must be 1 (got n_zc=" +
                                    std::to_string(n_zc) + ", u=" + std::to_string(u) + ")");
    if (!(sample_rate > 0.0) || !(sample_rate < 160e6))
        throw std::invalid_argument("zc: sample_rate must be in (0, 160 MHz)");
}

std::int64_t ZcConfig::period_ns() const {
    return std::llround(static_cast<double>(n_zc) / sample_rate * 1e9);
}

ComplexSequence generate_zc(const ZcConfig& config) {
    config.validate();
    const auto n = static_cast<double>(config.n_zc);
    const auto two_n = 2 * static_cast<std::uint64_t>(config.n_zc);
    const bool even = config.n_zc % 2 == 0;
    ComplexSequence seq;
    seq.sample_period = config.sample_period();
    seq.samples.resize(config.n_zc);
    for (std::size_t k = 0; k < config.n_zc; ++k) {
        // Chu's parity-dependent quadratic phase: u*k^2 for even length,
        // u*k*(k+1) for odd. Only this pairing keeps the N-sample cyclic
        // extension consistent and the periodic autocorrelation at
        // N * delta[m]. The phase argument grows past the 53-bit double
        // mantissa, so reduce it mod 2*N_ZC in integer arithmetic first.
        unsigned __int128 prod = static_cast<unsigned __int128>(config.u) * k % two_n;
        prod = prod * (even ? k : k + 1) % two_n;
        const double phase = -std::numbers::pi * static_cast<double>(prod) / n;
        seq.samples[k] = Complex(std::cos(phase), std::sin(phase));
    }
    return seq;
}

ComplexSequence periodic_signal(const ComplexSequence& seq, std::size_t n_periods) {
    if (n_periods < 1) throw std::invalid_argument("periodic_signal: n_periods must be >= 1");
    if (seq.samples.empty()) throw std::invalid_argument("periodic_signal: empty sequence");
    ComplexSequence out;
    out.sample_period = seq.sample_period;
    out.samples.reserve(seq.size() * n_periods);
    for (std::size_t p = 0; p < n_periods; ++p)
        out.samples.insert(out.samples.end(), seq.samples.begin(), seq.samples.end());
    return out;
}

CircularCorrelator::CircularCorrelator(const ComplexSequence& ref)
    : n_(ref.size()), sample_period_(ref.sample_period) {
    if (n_ == 0) throw std::invalid_argument("correlator: empty reference");
    ref_spectrum_conj_.resize(n_);
    detail::fft_forward(ref.samples.data(), ref_spectrum_conj_.data(), n_);
    for (auto& v : ref_spectrum_conj_) v = std::conj(v);
}

std::vector<ComplexSequence> CircularCorrelator::correlate(const ComplexSequence& rx) const {
    if (rx.samples.empty() || rx.size() % n_ != 0)
        throw std::invalid_argument("correlate: rx length must be a nonzero multiple of ref length");
    const std::size_t periods = rx.size() / n_;

    // c = IDFT(DFT(rx_period) .* conj(DFT(ref))) per period.
    std::vector<ComplexSequence> out(periods);
    std::vector<Complex> spectrum(n_);
    for (std::size_t p = 0; p < periods; ++p) {
        detail::fft_forward(rx.samples.data() + p * n_, spectrum.data(), n_);
        for (std::size_t k = 0; k < n_; ++k) spectrum[k] *= ref_spectrum_conj_[k];
        out[p].sample_period = sample_period_;
        out[p].samples.resize(n_);
        detail::fft_inverse(spectrum.data(), out[p].samples.data(), n_);
    }
    return out;
}

std::vector<ComplexSequence> circular_xcorr(const ComplexSequence& rx,
                                            const ComplexSequence& ref) {
    return CircularCorrelator(ref).correlate(rx);
}

}  // namespace mmsounder
