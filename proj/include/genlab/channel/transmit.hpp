#ifndef GENLAB_CHANNEL_TRANSMIT_HPP
#define GENLAB_CHANNEL_TRANSMIT_HPP

#include "genlab/channel/scenario.hpp"
#include "genlab/channel/ssfm.hpp"
#include "genlab/fft/fft.hpp"
#include "genlab/types.hpp"
#include "genlab/util/rng.hpp"

namespace genlab::channel {

// Full TX + link: RRC shaping, launch-power scaling (total over both
// polarizations), zero-padding to a power-of-two grid for propagation,
// n_spans x (fiber, amplifier with gain = span loss), then optional
// transceiver AWGN. transceiver_snr_db is calibrated so that the
// matched-filtered symbol stream sees that SNR per polarization.
//
// The returned waveform stays on the padded grid; unpadded_length reports
// the shaped length before padding (n_symbols*sps + taps-1).
struct TransmitResult {
    DpWaveform wave;
    std::size_t unpadded_length = 0;
};

TransmitResult transmit(const ScenarioConfig& scenario, const DpSymbols& symbols, Rng& rng, Fft& fft);

}  // namespace genlab::channel

#endif
