#include "genlab/fft/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace genlab {

namespace {
// FFTW plan creation/destruction is not thread-safe; execution on distinct
// plans is.
std::mutex g_fftw_mutex;
}  // namespace

struct Fft::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    fftw_complex* buf = nullptr;
    std::size_t n = 0;
};

Fft::Plans* Fft::plans_for(std::size_t n) {
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    auto* p = new Plans;
    p->n = n;
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    p->buf = fftw_alloc_complex(n);
    if (!p->buf) throw std::bad_alloc();
    p->fwd = fftw_plan_dft_1d(static_cast<int>(n), p->buf, p->buf, FFTW_FORWARD, FFTW_ESTIMATE);
    p->inv = fftw_plan_dft_1d(static_cast<int>(n), p->buf, p->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!p->fwd || !p->inv) throw std::runtime_error("fftw plan creation failed");
    cache_.emplace(n, p);
    return p;
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    for (auto& [n, p] : cache_) {
        if (p->fwd) fftw_destroy_plan(p->fwd);
        if (p->inv) fftw_destroy_plan(p->inv);
        if (p->buf) fftw_free(p->buf);
        delete p;
    }
}

void Fft::forward(std::vector<cplx>& data) {
    if (data.empty()) return;
    Plans* p = plans_for(data.size());
    auto* buf = reinterpret_cast<cplx*>(p->buf);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(p->fwd);
    std::copy(buf, buf + p->n, data.begin());
}

void Fft::inverse(std::vector<cplx>& data) {
    if (data.empty()) return;
    Plans* p = plans_for(data.size());
    auto* buf = reinterpret_cast<cplx*>(p->buf);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(p->inv);
    const double scale = 1.0 / static_cast<double>(p->n);
    for (std::size_t i = 0; i < p->n; ++i) data[i] = buf[i] * scale;
}

std::vector<double> fft_angular_freqs(std::size_t n, double dt) {
    std::vector<double> w(n);
    const double df = 1.0 / (static_cast<double>(n) * dt);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = (k < (n + 1) / 2) ? static_cast<double>(k) * df
                                            : (static_cast<double>(k) - static_cast<double>(n)) * df;
        w[k] = two_pi * fk;
    }
    return w;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace genlab
