// Zadoff-Chu sounding waveform: sequence generation, periodic extension,
// and circular cross-correlation used for channel estimation.

#pragma once

#include <complex>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace mmsounder {

using Complex = std::complex<double>;

// Parameters of the root Zadoff-Chu sounding sequence.
struct ZcConfig {
    std::size_t n_zc = 8192;       // sequence length, samples
    std::size_t u = 1729;          // root index, 0 < u < n_zc, gcd(n_zc, u) = 1
    double sample_rate = 65.536e6;  // Hz, must stay below the 160 MHz SDR limit

    // Throws std::invalid_argument when a constraint is violated.
    void validate() const;

    double sample_period() const { return 1.0 / sample_rate; }
    // Duration of one sequence period in integer nanoseconds (125000 ns for
    // the 8192 @ 65.536 MHz default). Rounded to the nearest nanosecond.
    std::int64_t period_ns() const;
};

// A complex baseband sample stream with its sample spacing.
struct ComplexSequence {
    std::vector<Complex> samples;
    double sample_period = 0.0;  // seconds

    std::size_t size() const { return samples.size(); }
};

// Root Zadoff-Chu sequence: x_u[n] = exp(-j*pi*u*n*(n+1)/n_zc) for odd
// n_zc, exp(-j*pi*u*n^2/n_zc) for even. Every sample has unit magnitude
// and the periodic autocorrelation is n_zc * delta[m].
ComplexSequence generate_zc(const ZcConfig& config);

// Cyclic repetition of `seq`, n_periods >= 1. Output length = n_periods * len.
ComplexSequence periodic_signal(const ComplexSequence& seq, std::size_t n_periods);

// One length-N circular cross-correlation per reference period of rx:
//   c[m] = sum_n rx[n] * conj(ref[(n - m) mod N])
// rx.size() must be an integer multiple of ref.size(). Values are raw
// (unnormalized): a unit-amplitude aligned period peaks at N. Power
// conversion happens once, in the sounder module.
std::vector<ComplexSequence> circular_xcorr(const ComplexSequence& rx,
                                            const ComplexSequence& ref);

// Transform-based circular correlator with the reference spectrum cached;
// use this when correlating many captures against one sounding sequence.
class CircularCorrelator {
  public:
    explicit CircularCorrelator(const ComplexSequence& ref);

    // Same contract as circular_xcorr().
    std::vector<ComplexSequence> correlate(const ComplexSequence& rx) const;

    std::size_t period_length() const { return n_; }

  private:
    std::size_t n_;
    double sample_period_;
    std::vector<Complex> ref_spectrum_conj_;
};

}  // namespace mmsounder
