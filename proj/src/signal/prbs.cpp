#include "genlab/signal/prbs.hpp"

#include <bit>
#include <stdexcept>

namespace genlab::signal {

namespace {

// For x^m + x^k + 1 with output at the register LSB and right shift, the
// feedback taps are register bits {k, 0}: o[t+m] = o[t+k] ^ o[t].
struct LfsrSpec {
    int order;
    std::uint32_t tap_mask;
};

LfsrSpec spec_for(int order) {
    switch (order) {
        case 7:
            return {7, (1u << 6) | 1u};
        case 15:
            return {15, (1u << 14) | 1u};
        case 23:
            return {23, (1u << 18) | 1u};
        case 31:
            return {31, (1u << 28) | 1u};
        default:
            throw std::invalid_argument("unsupported PRBS order " + std::to_string(order) +
                                        " (supported: 7, 15, 23, 31)");
    }
}

}  // namespace

std::vector<std::uint8_t> prbs_generate(int order, std::size_t length, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("PRBS length must be >= 1");
    const LfsrSpec spec = spec_for(order);
    const std::uint32_t mask = (order == 31) ? 0x7fffffffu : ((1u << order) - 1u);
    std::uint32_t state = static_cast<std::uint32_t>(seed) & mask;
    if (state == 0) state = mask;  // zero state is degenerate; remap to all-ones

    std::vector<std::uint8_t> bits(length);
    for (std::size_t i = 0; i < length; ++i) {
        bits[i] = std::uint8_t(state & 1u);
        const std::uint32_t fb = std::uint32_t(std::popcount(state & spec.tap_mask) & 1);
        state = (state >> 1) | (fb << (order - 1));
    }
    return bits;
}

}  // namespace genlab::signal
