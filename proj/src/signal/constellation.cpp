#include "genlab/signal/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace genlab::signal {

const char* to_string(Modulation m) { return m == Modulation::QAM16 ? "QAM16" : "QAM64"; }

Modulation modulation_from_string(const std::string& s) {
    if (s == "QAM16" || s == "16QAM" || s == "16") return Modulation::QAM16;
    if (s == "QAM64" || s == "64QAM" || s == "64") return Modulation::QAM64;
    throw std::invalid_argument("unknown modulation: " + s);
}

std::uint32_t gray_encode(std::uint32_t b) { return b ^ (b >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
    std::uint32_t b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}

Constellation make_constellation(Modulation m) {
    Constellation c;
    c.bits_per_symbol = (m == Modulation::QAM16) ? 4 : 6;
    const int half_bits = c.bits_per_symbol / 2;
    const int levels = 1 << half_bits;
    const std::size_t size = std::size_t(1) << c.bits_per_symbol;

    // odd integer levels -(L-1)..(L-1); mean power over the square grid is
    // 2 * mean(level^2), giving 10 for 16-QAM and 42 for 64-QAM
    double mean_sq = 0.0;
    for (int l = 0; l < levels; ++l) {
        const double a = 2.0 * l - (levels - 1);
        mean_sq += a * a;
    }
    mean_sq /= levels;
    const double scale = 1.0 / std::sqrt(2.0 * mean_sq);

    c.points.resize(size);
    for (int i = 0; i < levels; ++i) {
        for (int q = 0; q < levels; ++q) {
            const double re = (2.0 * i - (levels - 1)) * scale;
            const double im = (2.0 * q - (levels - 1)) * scale;
            c.points[std::size_t(i) * levels + q] = cplx(re, im);
        }
    }
    c.labeling.resize(size);
    for (std::uint32_t pattern = 0; pattern < size; ++pattern) {
        const std::uint32_t gi = pattern >> half_bits;
        const std::uint32_t gq = pattern & std::uint32_t(levels - 1);
        c.labeling[pattern] = gray_decode(gi) * levels + gray_decode(gq);
    }
    return c;
}

std::vector<cplx> map_qam(const std::vector<std::uint8_t>& bits, const Constellation& c) {
    const std::size_t bps = std::size_t(c.bits_per_symbol);
    if (bits.size() % bps != 0) {
        throw std::invalid_argument("bit count not divisible by bits_per_symbol (remainder " +
                                    std::to_string(bits.size() % bps) + ")");
    }
    std::vector<cplx> out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        std::uint32_t pattern = 0;
        for (std::size_t b = 0; b < bps; ++b) pattern = (pattern << 1) | (bits[s * bps + b] & 1);
        out[s] = c.points[c.labeling[pattern]];
    }
    return out;
}

std::uint32_t nearest_point(cplx y, const Constellation& c) {
    std::uint32_t best = 0;
    double best_d = std::norm(y - c.points[0]);
    for (std::uint32_t i = 1; i < c.points.size(); ++i) {
        const double d = std::norm(y - c.points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::uint8_t> demap_qam_hard(const std::vector<cplx>& symbols, const Constellation& c) {
    // inverse labeling table: point index -> bit pattern
    std::vector<std::uint32_t> inverse(c.size());
    for (std::uint32_t pattern = 0; pattern < c.size(); ++pattern) inverse[c.labeling[pattern]] = pattern;

    const int bps = c.bits_per_symbol;
    std::vector<std::uint8_t> bits(symbols.size() * std::size_t(bps));
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const std::uint32_t pattern = inverse[nearest_point(symbols[s], c)];
        for (int b = 0; b < bps; ++b) bits[s * bps + b] = std::uint8_t((pattern >> (bps - 1 - b)) & 1);
    }
    return bits;
}

}  // namespace genlab::signal
