#include "genlab/signal/pulse.hpp"

#include <cmath>
#include <stdexcept>

namespace genlab::signal {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

std::vector<double> rrc_taps(double roll_off, int span_symbols, int sps) {
    if (!(roll_off > 0.0 && roll_off <= 1.0)) throw std::invalid_argument("roll_off must be in (0, 1]");
    if (span_symbols <= 0 || span_symbols % 2 != 0) throw std::invalid_argument("span_symbols must be even and positive");
    if (sps < 2) throw std::invalid_argument("sps must be >= 2");

    const int n = span_symbols * sps + 1;
    const int mid = span_symbols * sps / 2;
    const double b = roll_off;
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) {
        const double t = double(i - mid) / double(sps);  // in symbol periods
        double val;
        if (std::abs(t) < 1e-12) {
            val = 1.0 - b + 4.0 * b / kPi;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
            // removable singularity of the generic formula
            val = (b / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
                                          (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
        } else {
            const double num = std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b));
            const double den = kPi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t));
            val = num / den;
        }
        h[i] = val;
    }
    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double scale = std::sqrt(double(sps) / energy);
    for (double& v : h) v *= scale;
    return h;
}

std::vector<cplx> upsample_shape(const std::vector<cplx>& symbols, int sps,
                                 const std::vector<double>& taps) {
    if (sps < 2) throw std::invalid_argument("sps must be >= 2");
    const std::size_t n_up = symbols.size() * std::size_t(sps);
    const std::size_t n_out = n_up + taps.size() - 1;
    std::vector<cplx> out(n_out, cplx(0.0, 0.0));
    // sparse convolution: nonzero input samples sit at multiples of sps
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const cplx x = symbols[s];
        if (x == cplx(0.0, 0.0)) continue;
        const std::size_t base = s * std::size_t(sps);
        for (std::size_t k = 0; k < taps.size(); ++k) out[base + k] += x * taps[k];
    }
    return out;
}

std::vector<cplx> matched_filter_downsample(const std::vector<cplx>& waveform, int sps,
                                            const std::vector<double>& taps) {
    const std::size_t L = taps.size();
    if (waveform.size() < L || (waveform.size() - (L - 1)) % std::size_t(sps) != 0) {
        throw std::invalid_argument("waveform length inconsistent with sps and filter span");
    }
    const std::size_t n_sym = (waveform.size() - (L - 1)) / std::size_t(sps);
    // total group delay of shape+match is taps.size()-1 samples
    const std::size_t delay = L - 1;
    std::vector<cplx> out(n_sym);
    const double inv_sps = 1.0 / double(sps);
    for (std::size_t s = 0; s < n_sym; ++s) {
        // convolution output at sample (delay + s*sps): sum_k wave[i-k]*h[k]
        const std::size_t i = delay + s * std::size_t(sps);
        cplx acc(0.0, 0.0);
        const std::size_t k_lo = (i >= waveform.size()) ? i - waveform.size() + 1 : 0;
        const std::size_t k_hi = std::min(L - 1, i);
        for (std::size_t k = k_lo; k <= k_hi; ++k) acc += waveform[i - k] * taps[k];
        out[s] = acc * inv_sps;
    }
    return out;
}

}  // namespace genlab::signal
