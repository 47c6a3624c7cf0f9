#ifndef GENLAB_SIGNAL_PRBS_HPP
#define GENLAB_SIGNAL_PRBS_HPP

#include <cstdint>
#include <vector>

namespace genlab::signal {

// Maximal-length Fibonacci LFSR bit source. Supported register orders and
// their primitive trinomials x^m + x^k + 1:
//   7 -> x^7+x^6+1, 15 -> x^15+x^14+1, 23 -> x^23+x^18+1, 31 -> x^31+x^28+1
// The start state is seed masked to m bits; a zero state is remapped to
// all-ones. Output bit at step t is the register LSB.
std::vector<std::uint8_t> prbs_generate(int order, std::size_t length, std::uint64_t seed);

}  // namespace genlab::signal

#endif
