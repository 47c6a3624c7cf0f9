#ifndef GENLAB_SIGNAL_PULSE_HPP
#define GENLAB_SIGNAL_PULSE_HPP

#include <vector>

#include "genlab/types.hpp"

namespace genlab::signal {

// Root-raised-cosine taps sampled at sps samples per symbol over
// span_symbols symbols (length span_symbols*sps + 1, symmetric, center tap
// is the global maximum). Normalized to sum(h^2) = sps so that a shaped
// unit-power symbol stream has unit waveform power and the TX+matched
// cascade is a unit-gain ISI-free raised cosine at symbol instants.
std::vector<double> rrc_taps(double roll_off, int span_symbols, int sps);

// Zero-insertion upsampling followed by linear convolution with taps.
// Output length = n*sps + taps.size() - 1; group delay (taps.size()-1)/2
// samples, compensated by matched_filter_downsample.
std::vector<cplx> upsample_shape(const std::vector<cplx>& symbols, int sps,
                                 const std::vector<double>& taps);

// Matched filter (same taps), total group-delay compensation, symbol-rate
// sampling, 1/sps gain so that shape->match is an identity back to back.
// Waveform length must equal n*sps + taps.size() - 1 for integer n.
std::vector<cplx> matched_filter_downsample(const std::vector<cplx>& waveform, int sps,
                                            const std::vector<double>& taps);

}  // namespace genlab::signal

#endif
