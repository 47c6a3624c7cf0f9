#include "genlab/channel/dataset.hpp"

#include <json.hpp>

#include <atomic>
#include <cstring>
#include <stdexcept>
#include <thread>

#include "genlab/channel/transmit.hpp"
#include "genlab/rxdsp/rxdsp.hpp"
#include "genlab/signal/prbs.hpp"
#include "genlab/signal/pulse.hpp"
#include "genlab/util/binio.hpp"
#include "genlab/util/sha256.hpp"

namespace genlab::channel {

using nlohmann::json;

namespace {
constexpr char kDatasetMagic[8] = {'O', 'D', 'S', 'L', '0', '0', '0', '1'};
constexpr int kDatasetFormatVersion = 1;
constexpr int kPrbsOrder = 31;
}  // namespace

std::vector<cplx> Dataset::rx_concat() const {
    std::vector<cplx> out(rx.h);
    out.insert(out.end(), rx.v.begin(), rx.v.end());
    return out;
}

std::vector<cplx> Dataset::tx_concat() const {
    std::vector<cplx> out(tx.h);
    out.insert(out.end(), tx.v.begin(), tx.v.end());
    return out;
}

Dataset generate_dataset(const ScenarioConfig& scenario, std::size_t n_symbols, std::uint64_t seed) {
    scenario.validate();
    if (n_symbols < 25) throw std::invalid_argument("n_symbols must be >= 25 (one equalizer window)");

    const auto constellation = signal::make_constellation(scenario.modulation);
    const std::size_t bps = std::size_t(constellation.bits_per_symbol);

    Dataset ds;
    ds.scenario = scenario;
    ds.scenario.seed = seed;
    ds.seed = seed;

    // independent bit streams per polarization
    const auto bits_h = signal::prbs_generate(kPrbsOrder, n_symbols * bps, derive_seed(seed, 0));
    const auto bits_v = signal::prbs_generate(kPrbsOrder, n_symbols * bps, derive_seed(seed, 1));
    ds.tx.h = signal::map_qam(bits_h, constellation);
    ds.tx.v = signal::map_qam(bits_v, constellation);
    ds.tx.symbol_rate_baud = scenario.symbol_rate_baud;

    Rng channel_rng(derive_seed(seed, 2));
    Fft fft;
    TransmitResult tr = transmit(scenario, ds.tx, channel_rng, fft);

    // linear receiver: CDC on the padded grid, crop, matched filter
    const double total_disp = scenario.fiber.dispersion_ps_nm_km * scenario.fiber.length_km *
                              scenario.n_spans;
    rxdsp::cdc_compensate(tr.wave, total_disp, scenario.wavelength_nm, fft);
    tr.wave.h.resize(tr.unpadded_length);
    tr.wave.v.resize(tr.unpadded_length);

    const auto taps = signal::rrc_taps(scenario.roll_off, scenario.sim.rrc_span, scenario.sim.sps);
    DpSymbols raw;
    raw.h = signal::matched_filter_downsample(tr.wave.h, scenario.sim.sps, taps);
    raw.v = signal::matched_filter_downsample(tr.wave.v, scenario.sim.sps, taps);

    ds.rx.h = rxdsp::normalize_gain_phase(raw.h, ds.tx.h);
    ds.rx.v = rxdsp::normalize_gain_phase(raw.v, ds.tx.v);
    ds.rx.symbol_rate_baud = scenario.symbol_rate_baud;

    ds.content_hash = Sha256::hex(serialize_dataset(ds));
    return ds;
}

std::vector<std::uint8_t> serialize_dataset(const Dataset& ds) {
    const std::size_t n = ds.n_symbols();
    std::vector<std::uint8_t> out;
    out.reserve(16 + n * 64);
    for (char m : kDatasetMagic) out.push_back(std::uint8_t(m));
    put_u64(out, n);
    for (std::size_t i = 0; i < n; ++i) {
        put_f64(out, ds.tx.h[i].real());
        put_f64(out, ds.tx.h[i].imag());
        put_f64(out, ds.tx.v[i].real());
        put_f64(out, ds.tx.v[i].imag());
        put_f64(out, ds.rx.h[i].real());
        put_f64(out, ds.rx.h[i].imag());
        put_f64(out, ds.rx.v[i].real());
        put_f64(out, ds.rx.v[i].imag());
    }
    return out;
}

Dataset deserialize_dataset(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kDatasetMagic, 8) != 0)
        throw std::runtime_error("bad dataset magic");
    const std::uint64_t n = get_u64(bytes.data() + 8);
    if (bytes.size() != 16 + n * 64) throw std::runtime_error("dataset payload size mismatch");
    Dataset ds;
    ds.tx.h.resize(n);
    ds.tx.v.resize(n);
    ds.rx.h.resize(n);
    ds.rx.v.resize(n);
    const std::uint8_t* p = bytes.data() + 16;
    for (std::uint64_t i = 0; i < n; ++i, p += 64) {
        ds.tx.h[i] = cplx(get_f64(p), get_f64(p + 8));
        ds.tx.v[i] = cplx(get_f64(p + 16), get_f64(p + 24));
        ds.rx.h[i] = cplx(get_f64(p + 32), get_f64(p + 40));
        ds.rx.v[i] = cplx(get_f64(p + 48), get_f64(p + 56));
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    const auto payload = serialize_dataset(ds);
    write_file_atomic(path, payload);

    json meta;
    meta["format_version"] = kDatasetFormatVersion;
    meta["magic"] = "ODSL0001";
    meta["n_symbols"] = ds.n_symbols();
    meta["seed"] = ds.seed;
    meta["content_hash_sha256"] = ds.content_hash.empty() ? Sha256::hex(payload) : ds.content_hash;
    meta["scenario"] = json::parse(ds.scenario.to_json());
    std::filesystem::path side = path;
    side += ".meta.json";
    write_file_atomic(side, meta.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& path, bool verify_hash) {
    const auto bytes = read_file_bytes(path);
    Dataset ds = deserialize_dataset(bytes);

    std::filesystem::path side = path;
    side += ".meta.json";
    const auto meta_bytes = read_file_bytes(side);
    const json meta = json::parse(std::string(meta_bytes.begin(), meta_bytes.end()));
    ds.seed = meta.at("seed").get<std::uint64_t>();
    ds.scenario = ScenarioConfig::from_json(meta.at("scenario").dump());
    ds.content_hash = meta.at("content_hash_sha256").get<std::string>();
    ds.tx.symbol_rate_baud = ds.scenario.symbol_rate_baud;
    ds.rx.symbol_rate_baud = ds.scenario.symbol_rate_baud;

    if (verify_hash) {
        const std::string actual = Sha256::hex(bytes);
        if (actual != ds.content_hash)
            throw std::runtime_error("dataset corruption: hash mismatch for " + path.string());
    }
    return ds;
}

ScenarioConfig sample_scenario(const ScenarioConfig& base, const ParameterRanges& ranges, Rng& rng) {
    ranges.validate();
    ScenarioConfig s = base;
    s.fiber.alpha_db_per_km = rng.uniform(ranges.alpha_min, ranges.alpha_max);
    s.fiber.dispersion_ps_nm_km = rng.uniform(ranges.dispersion_min, ranges.dispersion_max);
    s.fiber.gamma_per_w_km = rng.uniform(ranges.gamma_min, ranges.gamma_max);
    return s;
}

std::vector<Dataset> build_randomized_library(const ScenarioConfig& base, const ParameterRanges& ranges,
                                              int n_datasets, std::size_t n_symbols, std::uint64_t seed,
                                              int jobs) {
    if (n_datasets < 1) throw std::invalid_argument("n_datasets must be >= 1");
    std::vector<Dataset> out;
    out.resize(std::size_t(n_datasets));

    auto make_one = [&](int i) {
        const std::uint64_t ds_seed = derive_seed(seed, 100 + std::uint64_t(i));
        Rng param_rng(derive_seed(seed, 200 + std::uint64_t(i)));
        const ScenarioConfig sc = sample_scenario(base, ranges, param_rng);
        out[std::size_t(i)] = generate_dataset(sc, n_symbols, ds_seed);
    };

    if (jobs <= 1 || n_datasets == 1) {
        for (int i = 0; i < n_datasets; ++i) make_one(i);
        return out;
    }
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors;
    errors.resize(std::size_t(jobs));
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < n_datasets; i = next.fetch_add(1)) make_one(i);
            } catch (...) {
                errors[std::size_t(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace genlab::channel
