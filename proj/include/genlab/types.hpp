#ifndef GENLAB_TYPES_HPP
#define GENLAB_TYPES_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace genlab {

using cplx = std::complex<double>;

// Single-polarization sampled waveform.
struct ComplexSequence {
    std::vector<cplx> values;
    double sample_rate_hz = 0.0;
};

// Dual-polarization sampled waveform on a common time grid.
struct DpWaveform {
    std::vector<cplx> h;
    std::vector<cplx> v;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return h.size(); }
};

// Dual-polarization symbol stream.
struct DpSymbols {
    std::vector<cplx> h;
    std::vector<cplx> v;
    double symbol_rate_baud = 0.0;

    std::size_t size() const { return h.size(); }
};

enum class Polarization : std::uint8_t { H = 0, V = 1 };

}  // namespace genlab

#endif
