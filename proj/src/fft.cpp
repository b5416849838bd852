#include "gl3v/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace gl3v {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex mu;
    return mu;
}

} // namespace

void fft_inplace(std::vector<cplx>& a, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(a.size()), p, p, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
}

} // namespace gl3v
