#include "fft_util.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace crepair::fftutil {
namespace {

// Plan creation is not thread-safe in FFTW; executing a cached plan on fresh
// arrays is. Plans are created once per (H, W) under a lock and reused with
// the new-array execute interface.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

std::mutex plan_mutex;
std::map<std::pair<int, int>, PlanPair>& plan_cache() {
    static std::map<std::pair<int, int>, PlanPair> cache;
    return cache;
}

PlanPair get_plans(int h, int w) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find({h, w});
    if (it != cache.end()) return it->second;
    const int wc = w / 2 + 1;
    double* real_buf = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    fftw_complex* cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(h) * wc);
    PlanPair p;
    p.fwd = fftw_plan_dft_r2c_2d(h, w, real_buf, cplx_buf, FFTW_ESTIMATE);
    p.inv = fftw_plan_dft_c2r_2d(h, w, cplx_buf, real_buf, FFTW_ESTIMATE);
    fftw_free(real_buf);
    fftw_free(cplx_buf);
    cache[{h, w}] = p;
    return p;
}

}  // namespace

Spectrum fft2(const ScalarField& f) {
    const int h = f.height(), w = f.width(), wc = w / 2 + 1;
    PlanPair plans = get_plans(h, w);
    double* in = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(h) * wc);
    for (std::size_t k = 0; k < f.data().size(); ++k) in[k] = f.data()[k];
    fftw_execute_dft_r2c(plans.fwd, in, out);
    Spectrum s(static_cast<std::size_t>(h) * wc);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = {out[k][0], out[k][1]};
    fftw_free(in);
    fftw_free(out);
    return s;
}

ScalarField ifft2(const Spectrum& s, int h, int w) {
    const int wc = w / 2 + 1;
    PlanPair plans = get_plans(h, w);
    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(h) * wc);
    double* out = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    for (std::size_t k = 0; k < s.size(); ++k) {
        in[k][0] = s[k].real();
        in[k][1] = s[k].imag();
    }
    fftw_execute_dft_c2r(plans.inv, in, out);
    ScalarField f(h, w);
    const double scale = 1.0 / (static_cast<double>(h) * w);
    for (std::size_t k = 0; k < f.data().size(); ++k) f.data()[k] = out[k] * scale;
    fftw_free(in);
    fftw_free(out);
    return f;
}

}  // namespace crepair::fftutil
