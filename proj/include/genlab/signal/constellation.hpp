#ifndef GENLAB_SIGNAL_CONSTELLATION_HPP
#define GENLAB_SIGNAL_CONSTELLATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "genlab/types.hpp"

namespace genlab::signal {

enum class Modulation : std::uint8_t { QAM16, QAM64 };

const char* to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);

// Square Gray-labeled QAM, unit average power.
//
// points[idx] with idx = i_level * L + q_level (L levels per axis).
// labeling[bit_pattern] = point index, where the first half of the bits
// (MSB side) Gray-encodes the I level and the second half the Q level.
struct Constellation {
    std::vector<cplx> points;
    int bits_per_symbol = 0;
    std::vector<std::uint32_t> labeling;  // bit pattern -> point index

    std::size_t size() const { return points.size(); }
    int levels_per_axis() const { return 1 << (bits_per_symbol / 2); }
};

Constellation make_constellation(Modulation m);

// Gray map/unmap on axis indices (binary reflected code).
std::uint32_t gray_encode(std::uint32_t b);
std::uint32_t gray_decode(std::uint32_t g);

// Bits to Gray-labeled unit-power symbols. Bit count must be divisible by
// bits_per_symbol.
std::vector<cplx> map_qam(const std::vector<std::uint8_t>& bits, const Constellation& c);

// Minimum-distance hard decision followed by inverse labeling. Exact
// midpoints resolve to the lowest point index.
std::vector<std::uint8_t> demap_qam_hard(const std::vector<cplx>& symbols, const Constellation& c);

// Index of the nearest constellation point (lowest index wins ties).
std::uint32_t nearest_point(cplx y, const Constellation& c);

}  // namespace genlab::signal

#endif
