#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <numeric>

#include "genlab/fft/fft.hpp"
#include "genlab/signal/constellation.hpp"
#include "genlab/signal/prbs.hpp"
#include "genlab/signal/pulse.hpp"
#include "genlab/util/rng.hpp"

using namespace genlab;
using namespace genlab::signal;

namespace {

// independent LFSR oracle: the first `order` outputs equal the seed state
// bits (LSB first), after which o[n] = o[n-1] ^ o[n-order] for x^m+x^{m-1}+1
// style trinomials x^7+x^6+1
std::vector<std::uint8_t> lfsr7_oracle(std::uint32_t state, std::size_t n) {
    std::vector<std::uint8_t> o(n);
    for (std::size_t i = 0; i < std::min<std::size_t>(7, n); ++i) o[i] = (state >> i) & 1;
    for (std::size_t i = 7; i < n; ++i) o[i] = std::uint8_t(o[i - 1] ^ o[i - 7]);
    return o;
}

}  // namespace

TEST_CASE("prbs order 7 has period exactly 127") {
    const auto bits = prbs_generate(7, 3 * 127, 42);
    for (std::size_t i = 0; i + 127 < bits.size(); ++i) CHECK(bits[i] == bits[i + 127]);
    for (std::size_t p = 1; p < 127; ++p) {
        bool all_equal = true;
        for (std::size_t i = 0; i + p < 254; ++i)
            if (bits[i] != bits[i + p]) {
                all_equal = false;
                break;
            }
        CHECK_FALSE(all_equal);
    }
}

TEST_CASE("prbs order 7 seed 1 matches the recurrence oracle") {
    const auto bits = prbs_generate(7, 64, 1);
    const auto expect = lfsr7_oracle(1, 64);
    for (std::size_t i = 0; i < bits.size(); ++i) CHECK(bits[i] == expect[i]);
    // hand-derived head: state 0000001 reads out 1 then six zeros, then the
    // feedback run of ones
    const std::vector<std::uint8_t> head = {1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1};
    for (std::size_t i = 0; i < head.size(); ++i) CHECK(bits[i] == head[i]);
}

TEST_CASE("prbs determinism and seed remap") {
    const auto a = prbs_generate(31, 1000, 123456789);
    const auto b = prbs_generate(31, 1000, 123456789);
    CHECK(a == b);
    // zero-equivalent seed is remapped, not rejected
    const auto c = prbs_generate(15, 100, 0);
    const auto d = prbs_generate(15, 100, 1u << 15);  // masks to zero as well
    CHECK(c == d);
    CHECK(std::accumulate(c.begin(), c.end(), 0) > 0);
    CHECK_THROWS(prbs_generate(8, 10, 1));
    CHECK_THROWS(prbs_generate(7, 0, 1));
}

TEST_CASE("prbs supported orders produce balanced sequences") {
    for (int order : {7, 15, 23, 31}) {
        const auto bits = prbs_generate(order, 4096, 99);
        const int ones = std::accumulate(bits.begin(), bits.end(), 0);
        CHECK(ones > 4096 / 2 - 200);
        CHECK(ones < 4096 / 2 + 200);
    }
}

TEST_CASE("constellations are unit power with Gray labeling") {
    for (auto mod : {Modulation::QAM16, Modulation::QAM64}) {
        const Constellation c = make_constellation(mod);
        CHECK(c.points.size() == std::size_t(1) << c.bits_per_symbol);

        double p = 0;
        for (auto& pt : c.points) p += std::norm(pt);
        p /= double(c.points.size());
        CHECK(std::abs(p - 1.0) < 1e-12);

        // labeling is a bijection
        std::vector<int> seen(c.points.size(), 0);
        for (auto idx : c.labeling) seen[idx] += 1;
        for (int s : seen) CHECK(s == 1);

        // axis-adjacent points differ in exactly one bit
        std::vector<std::uint32_t> inverse(c.points.size());
        for (std::uint32_t pat = 0; pat < c.labeling.size(); ++pat) inverse[c.labeling[pat]] = pat;
        const int L = c.levels_per_axis();
        for (int i = 0; i < L; ++i) {
            for (int q = 0; q < L; ++q) {
                if (i + 1 < L) {
                    const auto x = inverse[std::uint32_t(i * L + q)] ^ inverse[std::uint32_t((i + 1) * L + q)];
                    CHECK(std::popcount(x) == 1);
                }
                if (q + 1 < L) {
                    const auto x = inverse[std::uint32_t(i * L + q)] ^ inverse[std::uint32_t(i * L + q + 1)];
                    CHECK(std::popcount(x) == 1);
                }
            }
        }
    }
}

TEST_CASE("qam scale factors") {
    const Constellation c16 = make_constellation(Modulation::QAM16);
    // outermost point is (3+3j)/sqrt(10)
    double max_re = 0;
    for (auto& p : c16.points) max_re = std::max(max_re, p.real());
    CHECK(max_re == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-12));

    const Constellation c64 = make_constellation(Modulation::QAM64);
    max_re = 0;
    for (auto& p : c64.points) max_re = std::max(max_re, p.real());
    CHECK(max_re == doctest::Approx(7.0 / std::sqrt(42.0)).epsilon(1e-12));
}

TEST_CASE("bits 0000 map to the Gray(00,00) point") {
    const Constellation c = make_constellation(Modulation::QAM16);
    // 2-bit Gray table 00,01,11,10: pattern 00 -> axis index 0 -> level -3
    const auto sym = map_qam({0, 0, 0, 0}, c);
    const double s = 1.0 / std::sqrt(10.0);
    CHECK(sym[0].real() == doctest::Approx(-3.0 * s).epsilon(1e-12));
    CHECK(sym[0].imag() == doctest::Approx(-3.0 * s).epsilon(1e-12));
    // and the full Gray axis readout: patterns 00,01,11,10 walk the levels
    const auto line = map_qam({0, 0, 0, 0, /**/ 0, 1, 0, 0, /**/ 1, 1, 0, 0, /**/ 1, 0, 0, 0}, c);
    CHECK(line[0].real() == doctest::Approx(-3 * s));
    CHECK(line[1].real() == doctest::Approx(-1 * s));
    CHECK(line[2].real() == doctest::Approx(1 * s));
    CHECK(line[3].real() == doctest::Approx(3 * s));
}

TEST_CASE("map rejects ragged bit counts") {
    const Constellation c = make_constellation(Modulation::QAM16);
    CHECK_THROWS(map_qam({0, 0, 0, 0, 1}, c));
}

TEST_CASE("map/demap round trip") {
    Rng rng(7);
    for (auto mod : {Modulation::QAM16, Modulation::QAM64}) {
        const Constellation c = make_constellation(mod);
        std::vector<std::uint8_t> bits(10000 * std::size_t(c.bits_per_symbol) / 4 * 4);
        bits.resize(bits.size() - bits.size() % std::size_t(c.bits_per_symbol));
        for (auto& b : bits) b = std::uint8_t(rng.next_u64() & 1);
        const auto sym = map_qam(bits, c);
        CHECK(demap_qam_hard(sym, c) == bits);
    }
}

TEST_CASE("hard decision tie-break picks the lowest point index") {
    const Constellation c = make_constellation(Modulation::QAM16);
    // origin is equidistant from the four inner points; their indices are
    // 5, 6, 9, 10 in i*4+q order
    CHECK(nearest_point(cplx(0.0, 0.0), c) == 5);
    // on-axis midpoint between two I columns at fixed Q
    CHECK(nearest_point(cplx(0.0, c.points[0].imag()), c) == 4);
}

TEST_CASE("noisy 16-QAM symbol decides to the (3,3) point") {
    const Constellation c = make_constellation(Modulation::QAM16);
    const cplx y = 1.1 * cplx(3.0, 3.0) / std::sqrt(10.0);
    const auto idx = nearest_point(y, c);
    CHECK(c.points[idx].real() == doctest::Approx(3.0 / std::sqrt(10.0)));
    CHECK(c.points[idx].imag() == doctest::Approx(3.0 / std::sqrt(10.0)));
}

TEST_CASE("rrc taps shape") {
    const auto taps = rrc_taps(0.1, 32, 8);
    CHECK(taps.size() == 32 * 8 + 1);
    const std::size_t mid = taps.size() / 2;
    for (std::size_t i = 0; i < taps.size(); ++i)
        if (i != mid) CHECK(taps[i] < taps[mid]);
    // symmetric
    for (std::size_t i = 0; i < taps.size(); ++i) CHECK(taps[i] == doctest::Approx(taps[taps.size() - 1 - i]));
    // energy per symbol period
    double e = 0;
    for (double t : taps) e += t * t;
    CHECK(e == doctest::Approx(8.0).epsilon(1e-12));
    CHECK_THROWS(rrc_taps(0.0, 32, 8));
    CHECK_THROWS(rrc_taps(0.1, 31, 8));
    CHECK_THROWS(rrc_taps(0.1, 32, 1));
}

TEST_CASE("shape + matched filter is a unit-gain ISI-free cascade") {
    // moderate roll-off converges within a 32-symbol span; the slow tails
    // of roll-off 0.1 need ~96 symbols for the same residual
    for (auto [roll, span] : std::initializer_list<std::pair<double, int>>{{0.35, 32}, {0.1, 96}}) {
        const auto taps = rrc_taps(roll, span, 4);
        std::vector<cplx> impulse(2 * std::size_t(span) + 1, cplx(0, 0));
        impulse[std::size_t(span)] = cplx(1, 0);
        const auto shaped = upsample_shape(impulse, 4, taps);
        const auto back = matched_filter_downsample(shaped, 4, taps);
        REQUIRE(back.size() == impulse.size());
        for (std::size_t i = 0; i < back.size(); ++i) {
            const double expect = (i == std::size_t(span)) ? 1.0 : 0.0;
            CHECK(std::abs(back[i] - cplx(expect, 0)) < 1e-3);
        }
    }
}

TEST_CASE("upsample_shape basics") {
    const auto taps = rrc_taps(0.2, 8, 4);
    const auto zeros = upsample_shape(std::vector<cplx>(16, cplx(0, 0)), 4, taps);
    for (auto& v : zeros) CHECK(std::abs(v) == 0.0);

    std::vector<cplx> one = {cplx(1, 0)};
    const auto w = upsample_shape(one, 4, taps);
    REQUIRE(w.size() == taps.size() + 3);
    for (std::size_t i = 0; i < taps.size(); ++i) CHECK(w[i] == cplx(taps[i], 0));
}

TEST_CASE("shaped 16-QAM stream has unit power") {
    Rng rng(11);
    const Constellation c = make_constellation(Modulation::QAM16);
    std::vector<std::uint8_t> bits(4096 * 4);
    for (auto& b : bits) b = std::uint8_t(rng.next_u64() & 1);
    const auto sym = map_qam(bits, c);
    const auto taps = rrc_taps(0.1, 32, 8);
    const auto wave = upsample_shape(sym, 8, taps);
    double p = 0;
    for (auto& v : wave) p += std::norm(v);
    p /= double(wave.size());
    CHECK(p == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("back-to-back loopback reproduces symbols") {
    Rng rng(3);
    const Constellation c = make_constellation(Modulation::QAM16);
    std::vector<std::uint8_t> bits(2048 * 4);
    for (auto& b : bits) b = std::uint8_t(rng.next_u64() & 1);
    const auto sym = map_qam(bits, c);

    for (auto [roll, span] : std::initializer_list<std::pair<double, int>>{{0.35, 32}, {0.35, 64}, {0.1, 96}}) {
        const auto taps = rrc_taps(roll, span, 4);
        const auto rxs = matched_filter_downsample(upsample_shape(sym, 4, taps), 4, taps);
        REQUIRE(rxs.size() == sym.size());
        double p_in = 0, p_out = 0, se = 0;
        for (std::size_t i = 0; i < sym.size(); ++i) {
            se += std::norm(rxs[i] - sym[i]);
            p_in += std::norm(sym[i]);
            p_out += std::norm(rxs[i]);
        }
        CHECK(std::sqrt(se / double(sym.size())) < 1e-3);  // per-symbol rms
        CHECK(p_out / p_in == doctest::Approx(1.0).epsilon(0.02));
    }

    const auto taps = rrc_taps(0.35, 32, 4);
    const auto z = matched_filter_downsample(std::vector<cplx>(taps.size() + 4 * 7 - 1, cplx(0, 0)), 4, taps);
    for (auto& v : z) CHECK(std::abs(v) == 0.0);
    CHECK_THROWS(matched_filter_downsample(std::vector<cplx>(taps.size() + 2, cplx(0, 0)), 4, taps));
}

TEST_CASE("shaped spectrum is confined to (1+roll_off) * symbol rate") {
    Rng rng(5);
    const Constellation c = make_constellation(Modulation::QAM16);
    std::vector<std::uint8_t> bits(8192 * 4);
    for (auto& b : bits) b = std::uint8_t(rng.next_u64() & 1);
    const auto sym = map_qam(bits, c);
    const int sps = 8;
    const auto taps = rrc_taps(0.1, 32, sps);
    auto wave = upsample_shape(sym, sps, taps);
    wave.resize(next_pow2(wave.size()), cplx(0, 0));

    Fft fft;
    fft.forward(wave);
    // at 34.4 GBd the occupied band is 34.4 * 1.1 = 37.84 GHz total
    const double fs = 34.4e9 * sps;
    const double half_band = 0.5 * 34.4e9 * 1.1;
    double in_band = 0, total = 0;
    for (std::size_t k = 0; k < wave.size(); ++k) {
        const double fk = (k < wave.size() / 2 ? double(k) : double(k) - double(wave.size())) * fs /
                          double(wave.size());
        const double e = std::norm(wave[k]);
        total += e;
        if (std::abs(fk) <= half_band) in_band += e;
    }
    CHECK(in_band / total > 0.9999);
}
