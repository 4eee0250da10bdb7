// Internal FFTW3 wrapper. Plans are cached per transform size and shared;
// execution uses caller-owned buffers so concurrent calls are safe.

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mmsounder::detail {

// In-place-capable forward DFT, out[k] = sum_n in[n] e^{-j2pi kn/N}.
void fft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

// Inverse DFT including the 1/N scale, so fft_inverse(fft_forward(x)) == x.
void fft_inverse(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

}  // namespace mmsounder::detail
