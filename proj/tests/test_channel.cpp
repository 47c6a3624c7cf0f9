#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "genlab/channel/dataset.hpp"
#include "genlab/channel/ssfm.hpp"
#include "genlab/channel/transmit.hpp"
#include "genlab/rxdsp/rxdsp.hpp"
#include "genlab/signal/prbs.hpp"
#include "genlab/signal/pulse.hpp"
#include "genlab/util/binio.hpp"

using namespace genlab;
using namespace genlab::channel;

namespace {

ScenarioConfig fast_scenario() {
    ScenarioConfig s = preset_scenario("B");
    s.n_spans = 1;
    s.fiber.length_km = 10.0;
    s.sim.step_km = 0.5;
    s.sim.sps = 4;
    s.sim.rrc_span = 16;
    return s;
}

double field_energy(const DpWaveform& w) {
    double e = 0;
    for (std::size_t i = 0; i < w.size(); ++i) e += std::norm(w.h[i]) + std::norm(w.v[i]);
    return e;
}

}  // namespace

TEST_CASE("beta2 conversion") {
    // D=17 ps/(nm km) at 1550 nm: -17 * 1550^2 / (2 pi c)
    const double b2 = derive_beta2(17.0, 1550.0);
    CHECK(b2 == doctest::Approx(-21.6826).epsilon(1e-4));
    CHECK(derive_beta2(0.0, 1550.0) == 0.0);
    CHECK(derive_beta2(3.0, 1550.0) < 0.0);
    CHECK(derive_beta2(-3.0, 1550.0) > 0.0);
}

TEST_CASE("linear SSFM matches the closed-form dispersed Gaussian") {
    const std::size_t n = 4096;
    const double dt_ps = 1.0;
    const double t0 = 20.0;   // ps
    const double z = 80.0;    // km
    FiberParams fiber{0.0, 17.0, 0.0, z};
    const double beta2 = derive_beta2(17.0, 1550.0);

    DpWaveform w;
    w.sample_rate_hz = 1e12 / dt_ps;
    w.h.resize(n);
    w.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (double(i) - double(n) / 2) * dt_ps;
        w.h[i] = std::exp(-t * t / (2 * t0 * t0));
        w.v[i] = 0.5 * std::exp(-t * t / (2 * t0 * t0));
    }

    Fft fft;
    ssfm_propagate(w, fiber, 1550.0, 1.0, fft);

    // A(z,t) = T0/sqrt(T0^2 - j b2 z) exp(-t^2 / (2 (T0^2 - j b2 z)))
    const cplx denom(t0 * t0, -beta2 * z);
    const cplx amp = t0 / std::sqrt(denom);
    double err2 = 0, ref2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (double(i) - double(n) / 2) * dt_ps;
        const cplx expect = amp * std::exp(-t * t / (2.0 * denom));
        err2 += std::norm(w.h[i] - expect);
        ref2 += std::norm(expect);
        err2 += std::norm(w.v[i] - 0.5 * expect);
        ref2 += std::norm(0.5 * expect);
    }
    CHECK(std::sqrt(err2 / ref2) < 1e-6);
}

TEST_CASE("CW self-phase modulation accumulates (8/9) gamma P L") {
    const std::size_t n = 1024;
    const double p_total = 0.005;  // W across both polarizations
    FiberParams fiber{0.0, 0.0, 1.3, 50.0};

    DpWaveform w;
    w.sample_rate_hz = 100e9;
    w.h.assign(n, cplx(std::sqrt(p_total / 2), 0));
    w.v.assign(n, cplx(std::sqrt(p_total / 2), 0));

    Fft fft;
    ssfm_propagate(w, fiber, 1550.0, 0.1, fft);

    const double expect_phase = (8.0 / 9.0) * 1.3 * p_total * 50.0;
    for (std::size_t i = 0; i < n; i += 97) {
        CHECK(std::arg(w.h[i]) == doctest::Approx(expect_phase).epsilon(1e-9));
        CHECK(std::arg(w.v[i]) == doctest::Approx(expect_phase).epsilon(1e-9));
        CHECK(std::abs(w.h[i]) == doctest::Approx(std::sqrt(p_total / 2)).epsilon(1e-9));
    }
}

TEST_CASE("zero input stays zero; oversized step rejected") {
    DpWaveform w;
    w.sample_rate_hz = 100e9;
    w.h.assign(256, cplx(0, 0));
    w.v.assign(256, cplx(0, 0));
    FiberParams fiber{0.2, 17.0, 1.3, 10.0};
    Fft fft;
    ssfm_propagate(w, fiber, 1550.0, 0.5, fft);
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(std::abs(w.h[i]) == 0.0);
        CHECK(std::abs(w.v[i]) == 0.0);
    }
    CHECK_THROWS(ssfm_propagate(w, fiber, 1550.0, 11.0, fft));
}

TEST_CASE("lossless propagation conserves energy to 1e-9") {
    Rng rng(21);
    DpWaveform w;
    w.sample_rate_hz = 275.2e9;
    const std::size_t n = 8192;
    w.h.resize(n);
    w.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.h[i] = 0.05 * cplx(rng.normal(), rng.normal());
        w.v[i] = 0.05 * cplx(rng.normal(), rng.normal());
    }
    const double e0 = field_energy(w);
    FiberParams fiber{0.0, 17.0, 1.3, 50.0};
    Fft fft;
    ssfm_propagate(w, fiber, 1550.0, 0.1, fft);
    CHECK(std::abs(field_energy(w) - e0) / e0 < 1e-9);
}

TEST_CASE("halving the default step changes the field by < 1e-6 RMS") {
    // shaped waveform at the B-preset launch power: the operating regime
    // the default step is tuned for
    ScenarioConfig s = preset_scenario("B");
    const auto c = signal::make_constellation(s.modulation);
    DpSymbols sym;
    sym.h = signal::map_qam(signal::prbs_generate(31, 2048 * 4, 7), c);
    sym.v = signal::map_qam(signal::prbs_generate(31, 2048 * 4, 8), c);
    const auto taps = signal::rrc_taps(s.roll_off, s.sim.rrc_span, s.sim.sps);
    DpWaveform a;
    a.h = signal::upsample_shape(sym.h, s.sim.sps, taps);
    a.v = signal::upsample_shape(sym.v, s.sim.sps, taps);
    a.sample_rate_hz = s.symbol_rate_baud * s.sim.sps;
    const double p_target = 1e-3 * std::pow(10.0, s.launch_power_dbm / 10.0);
    double p_now = 0;
    for (std::size_t i = 0; i < a.size(); ++i) p_now += std::norm(a.h[i]) + std::norm(a.v[i]);
    p_now /= double(a.size());
    const double scale = std::sqrt(p_target / p_now);
    for (auto* pol : {&a.h, &a.v})
        for (cplx& x : *pol) x *= scale;
    a.h.resize(next_pow2(a.size()), cplx(0, 0));
    a.v.resize(next_pow2(a.v.size()), cplx(0, 0));

    DpWaveform b = a;
    FiberParams fiber{0.205, 17.0, 1.3, 50.0};
    Fft fft;
    ssfm_propagate(a, fiber, 1550.0, 0.1, fft);
    ssfm_propagate(b, fiber, 1550.0, 0.05, fft);
    double err2 = 0, ref2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        err2 += std::norm(a.h[i] - b.h[i]) + std::norm(a.v[i] - b.v[i]);
        ref2 += std::norm(b.h[i]) + std::norm(b.v[i]);
    }
    CHECK(std::sqrt(err2 / ref2) < 1e-6);
}

TEST_CASE("gamma=0 equals one dispersion+loss operator") {
    Rng rng(23);
    DpWaveform a;
    a.sample_rate_hz = 137.6e9;
    const std::size_t n = 4096;
    a.h.resize(n);
    a.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.h[i] = cplx(rng.normal(), rng.normal());
        a.v[i] = cplx(rng.normal(), rng.normal());
    }
    DpWaveform b = a;
    FiberParams fiber{0.21, 16.8, 0.0, 60.0};
    Fft fft;
    ssfm_propagate(a, fiber, 1550.0, 0.1, fft);

    // oracle: single frequency-domain operator
    const double beta2 = derive_beta2(16.8, 1550.0);
    const double alpha_np = 0.21 * std::log(10.0) / 10.0;
    const double dt_ps = 1e12 / b.sample_rate_hz;
    const auto omega = fft_angular_freqs(n, dt_ps);
    const double loss = std::exp(-0.5 * alpha_np * 60.0);
    for (auto* pol : {&b.h, &b.v}) {
        fft.forward(*pol);
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = 0.5 * beta2 * omega[k] * omega[k] * 60.0;
            (*pol)[k] *= loss * cplx(std::cos(ph), std::sin(ph));
        }
        fft.inverse(*pol);
    }
    double err2 = 0, ref2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        err2 += std::norm(a.h[i] - b.h[i]) + std::norm(a.v[i] - b.v[i]);
        ref2 += std::norm(b.h[i]) + std::norm(b.v[i]);
    }
    CHECK(std::sqrt(err2 / ref2) < 1e-9);
}

TEST_CASE("edfa gain and ASE statistics") {
    Rng rng(31);
    DpWaveform w;
    w.sample_rate_hz = 100e9;
    w.h.assign(1 << 20, cplx(0, 0));
    w.v.assign(1 << 20, cplx(0, 0));

    CHECK_THROWS(edfa_amplify(w, -1.0, 4.5, 1550.0, rng));
    CHECK_THROWS(edfa_amplify(w, 10.0, -0.5, 1550.0, rng));

    // 0 dB gain adds no noise regardless of noise figure
    DpWaveform u;
    u.sample_rate_hz = 100e9;
    u.h.assign(1024, cplx(1.0, 0.0));
    u.v.assign(1024, cplx(0.0, 1.0));
    const double e0 = field_energy(u);
    edfa_amplify(u, 0.0, 3.0, 1550.0, rng);
    CHECK(field_energy(u) == doctest::Approx(e0).epsilon(0.01));

    // measured ASE variance matches (G-1) F h nu / 2 * B
    const double gain_db = 10.0, nf_db = 5.0;
    edfa_amplify(w, gain_db, nf_db, 1550.0, rng);
    const double g = std::pow(10.0, gain_db / 10.0);
    const double f = std::pow(10.0, nf_db / 10.0);
    const double nu = 299792.458e12 / 1550.0;
    const double expect_var = (g - 1.0) * f * 6.62607015e-34 * nu / 2.0 * w.sample_rate_hz;
    double vh = 0;
    for (auto& x : w.h) vh += std::norm(x);
    vh /= double(w.h.size());
    CHECK(vh == doctest::Approx(expect_var).epsilon(0.02));
}

TEST_CASE("transmit hits the requested launch power") {
    ScenarioConfig s = fast_scenario();
    s.launch_power_dbm = -10.0;
    s.fiber.alpha_db_per_km = 0.0;
    s.fiber.dispersion_ps_nm_km = 0.0;
    s.fiber.gamma_per_w_km = 0.0;
    s.amp_noise_figure_db.reset();
    s.transceiver_snr_db.reset();

    const auto constellation = signal::make_constellation(s.modulation);
    const auto bits = signal::prbs_generate(15, 1024 * 4, 5);
    DpSymbols sym;
    sym.h = signal::map_qam(bits, constellation);
    sym.v = sym.h;
    sym.symbol_rate_baud = s.symbol_rate_baud;

    Rng rng(1);
    Fft fft;
    const TransmitResult tr = transmit(s, sym, rng, fft);
    double p = 0;
    for (std::size_t i = 0; i < tr.unpadded_length; ++i)
        p += std::norm(tr.wave.h[i]) + std::norm(tr.wave.v[i]);
    p /= double(tr.unpadded_length);
    CHECK(p == doctest::Approx(1e-4).epsilon(0.005));  // -10 dBm = 0.1 mW
}

TEST_CASE("linear channel is CDC-recoverable") {
    ScenarioConfig s = fast_scenario();
    s.n_spans = 2;
    s.fiber.length_km = 50.0;
    s.fiber.gamma_per_w_km = 0.0;
    s.amp_noise_figure_db.reset();
    s.transceiver_snr_db.reset();
    s.sim.rrc_span = SimOptions{}.rrc_span;  // full-precision shaping
    const Dataset ds = generate_dataset(s, 2048, 9);
    double se = 0;
    for (std::size_t i = 0; i < ds.n_symbols(); ++i)
        se += std::norm(ds.rx.h[i] - ds.tx.h[i]) + std::norm(ds.rx.v[i] - ds.tx.v[i]);
    CHECK(std::sqrt(se / double(2 * ds.n_symbols())) < 1e-3);  // per-symbol rms
}

TEST_CASE("sample_scenario draws inside the ranges") {
    const ScenarioConfig base = preset_scenario("B");
    const ParameterRanges r = preset_ranges(FiberType::SSMF);
    Rng rng(77);
    double sum_d = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const ScenarioConfig s = sample_scenario(base, r, rng);
        CHECK(s.fiber.dispersion_ps_nm_km >= 16.5);
        CHECK(s.fiber.dispersion_ps_nm_km <= 17.5);
        CHECK(s.fiber.alpha_db_per_km >= 0.19);
        CHECK(s.fiber.alpha_db_per_km <= 0.22);
        CHECK(s.fiber.gamma_per_w_km >= 1.1);
        CHECK(s.fiber.gamma_per_w_km <= 1.5);
        sum_d += s.fiber.dispersion_ps_nm_km;
    }
    CHECK(sum_d / n == doctest::Approx(17.0).epsilon(0.02));

    ParameterRanges degenerate{0.2, 0.2, 17.0, 17.0, 1.3, 1.3};
    const ScenarioConfig s = sample_scenario(base, degenerate, rng);
    CHECK(s.fiber.alpha_db_per_km == 0.2);
    CHECK(s.fiber.dispersion_ps_nm_km == 17.0);
}

TEST_CASE("generate_dataset is deterministic and seed-separated") {
    const ScenarioConfig s = fast_scenario();
    const Dataset a = generate_dataset(s, 4096, 100);
    const Dataset b = generate_dataset(s, 4096, 100);
    CHECK(a.content_hash == b.content_hash);

    // per-polarization symbol power stays near the constellation
    // normalization through the whole chain
    for (const auto* pol : {&a.tx.h, &a.tx.v, &a.rx.h, &a.rx.v}) {
        double p = 0;
        for (const cplx& x : *pol) p += std::norm(x);
        p /= double(pol->size());
        CHECK(p == doctest::Approx(1.0).epsilon(0.1));
    }

    const Dataset c = generate_dataset(s, 4096, 101);
    CHECK(c.content_hash != a.content_hash);
    CHECK(rxdsp::cross_correlation(a.rx_concat(), c.rx_concat()) < 0.03);

    CHECK_THROWS(generate_dataset(s, 10, 1));
}

TEST_CASE("randomized library: distinct scenarios, parallel == serial") {
    const ScenarioConfig base = fast_scenario();
    const ParameterRanges r = preset_ranges(FiberType::SSMF);
    const auto lib1 = build_randomized_library(base, r, 3, 1024, 7, 1);
    const auto lib2 = build_randomized_library(base, r, 3, 1024, 7, 2);
    REQUIRE(lib1.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(lib1[i].content_hash == lib2[i].content_hash);
        for (std::size_t j = i + 1; j < 3; ++j) {
            CHECK(lib1[i].seed != lib1[j].seed);
            const bool differs = lib1[i].scenario.fiber.alpha_db_per_km != lib1[j].scenario.fiber.alpha_db_per_km ||
                                 lib1[i].scenario.fiber.dispersion_ps_nm_km != lib1[j].scenario.fiber.dispersion_ps_nm_km ||
                                 lib1[i].scenario.fiber.gamma_per_w_km != lib1[j].scenario.fiber.gamma_per_w_km;
            CHECK(differs);
        }
    }
}

TEST_CASE("dataset round trip and corruption detection") {
    const ScenarioConfig s = fast_scenario();
    const Dataset ds = generate_dataset(s, 512, 3);
    const auto dir = std::filesystem::temp_directory_path() / "genlab_test_ds";
    std::filesystem::create_directories(dir);
    const auto path = dir / "d.bin";
    write_dataset(ds, path);

    const Dataset back = load_dataset(path);
    CHECK(back.content_hash == ds.content_hash);
    CHECK(back.n_symbols() == ds.n_symbols());
    CHECK(back.tx.h == ds.tx.h);
    CHECK(back.rx.v == ds.rx.v);
    CHECK(back.scenario.fiber.length_km == s.fiber.length_km);

    // flip one byte in the payload
    auto bytes = read_file_bytes(path);
    bytes[bytes.size() / 2] ^= 0x01;
    write_file_atomic(path, bytes);
    CHECK_THROWS(load_dataset(path));
    std::filesystem::remove_all(dir);
}

TEST_CASE("link presets carry the published setups") {
    const ScenarioConfig a = preset_scenario("A");
    CHECK(a.modulation == signal::Modulation::QAM64);
    CHECK(a.symbol_rate_baud == 28e9);
    CHECK(a.launch_power_dbm == 7.0);
    CHECK(a.n_spans == 4);
    CHECK(a.fiber.length_km == 100.0);
    CHECK(a.fiber_type == FiberType::SSMF);

    const ScenarioConfig b = preset_scenario("B");
    CHECK(b.modulation == signal::Modulation::QAM16);
    CHECK(b.symbol_rate_baud == 34.4e9);
    CHECK(b.launch_power_dbm == 9.0);
    CHECK(b.n_spans == 5);
    CHECK(b.fiber.length_km == 50.0);
    CHECK(b.fiber_type == FiberType::SSMF);

    const ScenarioConfig c = preset_scenario("C");
    CHECK(c.modulation == signal::Modulation::QAM16);
    CHECK(c.symbol_rate_baud == 34.4e9);
    CHECK(c.launch_power_dbm == 3.0);
    CHECK(c.n_spans == 9);
    CHECK(c.fiber.length_km == 50.0);
    CHECK(c.fiber_type == FiberType::TWC);

    for (const char* name : {"A", "B", "C", "desk", "gap-desk"}) CHECK(preset_scenario(name).roll_off == 0.1);
    CHECK_THROWS(preset_scenario("D"));

    // randomization windows per fiber type
    const ParameterRanges ssmf = preset_ranges(FiberType::SSMF);
    CHECK(ssmf.alpha_min == 0.19);
    CHECK(ssmf.alpha_max == 0.22);
    CHECK(ssmf.dispersion_min == 16.5);
    CHECK(ssmf.dispersion_max == 17.5);
    CHECK(ssmf.gamma_min == 1.1);
    CHECK(ssmf.gamma_max == 1.5);
    const ParameterRanges twc = preset_ranges(FiberType::TWC);
    CHECK(twc.alpha_min == 0.2);
    CHECK(twc.alpha_max == 0.25);
    CHECK(twc.dispersion_min == 2.5);
    CHECK(twc.dispersion_max == 3.5);
    CHECK(twc.gamma_min == 2.0);
    CHECK(twc.gamma_max == 3.0);
}

TEST_CASE("optional brick-wall channel filter confines the spectrum") {
    ScenarioConfig s = fast_scenario();
    s.fiber.dispersion_ps_nm_km = 0.0;
    s.fiber.gamma_per_w_km = 0.0;
    s.fiber.alpha_db_per_km = 0.0;
    s.amp_noise_figure_db.reset();
    s.channel_bw_hz = 37.5e9;

    const auto constellation = signal::make_constellation(s.modulation);
    DpSymbols sym;
    sym.h = signal::map_qam(signal::prbs_generate(15, 2048 * 4, 3), constellation);
    sym.v = sym.h;
    sym.symbol_rate_baud = s.symbol_rate_baud;
    Rng rng(1);
    Fft fft;
    TransmitResult tr = transmit(s, sym, rng, fft);

    // identity link: the filtered waveform stays on its filter grid, so
    // the out-of-band bins are exactly zero
    auto spec = tr.wave.h;
    fft.forward(spec);
    const double fs = s.symbol_rate_baud * s.sim.sps;
    double out_band = 0, total = 0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double fk = (k < spec.size() / 2 ? double(k) : double(k) - double(spec.size())) * fs /
                          double(spec.size());
        const double e = std::norm(spec[k]);
        total += e;
        if (std::abs(fk) > 0.5 * 37.5e9 * 1.001) out_band += e;
    }
    CHECK(out_band / total < 1e-12);

    // default off: scenario json carries null
    ScenarioConfig plain = fast_scenario();
    CHECK_FALSE(plain.channel_bw_hz.has_value());
    const ScenarioConfig back = ScenarioConfig::from_json(s.to_json());
    CHECK(back.channel_bw_hz.has_value());
    CHECK(*back.channel_bw_hz == 37.5e9);
}

TEST_CASE("scenario json round trip") {
    ScenarioConfig s = preset_scenario("gap-desk");
    const std::string j = s.to_json();
    const ScenarioConfig back = ScenarioConfig::from_json(j);
    CHECK(back.fiber.gamma_per_w_km == s.fiber.gamma_per_w_km);
    CHECK(back.transceiver_snr_db.has_value());
    CHECK(*back.transceiver_snr_db == 26.0);
    CHECK(back.sim.step_km == s.sim.step_km);
    CHECK(signal::to_string(back.modulation) == std::string("QAM16"));
}
