#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace mmsounder::detail {
namespace {

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

// FFTW plan creation is not thread-safe; execution via fftw_execute_dft is.
// Plans are created FFTW_UNALIGNED so they accept arbitrary caller buffers.
std::mutex g_plan_mutex;
std::map<std::size_t, PlanPair>& plan_cache() {
    static std::map<std::size_t, PlanPair> cache;
    return cache;
}

PlanPair get_plans(std::size_t n) {
    std::lock_guard lock(g_plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    PlanPair plans;
    plans.forward = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.inverse = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, plans);
    return plans;
}

}  // namespace

void fft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    PlanPair plans = get_plans(n);
    fftw_execute_dft(plans.forward,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void fft_inverse(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    PlanPair plans = get_plans(n);
    fftw_execute_dft(plans.inverse,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

}  // namespace mmsounder::detail
