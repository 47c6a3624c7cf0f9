#ifndef GENLAB_CHANNEL_DATASET_HPP
#define GENLAB_CHANNEL_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "genlab/channel/scenario.hpp"
#include "genlab/types.hpp"
#include "genlab/util/rng.hpp"

namespace genlab::channel {

// Aligned transmitted/received symbol pairs after the linear receiver
// chain (CDC, matched filter, per-polarization LS gain normalization).
struct Dataset {
    ScenarioConfig scenario;
    DpSymbols tx;
    DpSymbols rx;
    std::uint64_t seed = 0;
    std::string content_hash;  // SHA-256 hex of the serialized payload

    std::size_t n_symbols() const { return tx.h.size(); }
    std::vector<cplx> rx_concat() const;  // h then v, for leakage checks
    std::vector<cplx> tx_concat() const;
};

// PRBS -> QAM -> transmit -> CDC -> matched filter -> gain normalization.
// Fully determined by (scenario, n_symbols, seed); scenario.seed is ignored
// in favor of the explicit argument.
Dataset generate_dataset(const ScenarioConfig& scenario, std::size_t n_symbols, std::uint64_t seed);

// Binary container: magic "ODSL0001", u64 n_symbols, then per symbol
// 8 little-endian f64: txH.re, txH.im, txV.re, txV.im, rxH.re, rxH.im,
// rxV.re, rxV.im.
std::vector<std::uint8_t> serialize_dataset(const Dataset& ds);
Dataset deserialize_dataset(const std::vector<std::uint8_t>& bytes);

// Writes <path> plus sidecar <path>.meta.json (scenario, seed, hash,
// format version). Load verifies the payload hash against the sidecar and
// throws on mismatch.
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, bool verify_hash = true);

// Uniform independent draws of (alpha, D, gamma) within the ranges; all
// other fields copied from base.
ScenarioConfig sample_scenario(const ScenarioConfig& base, const ParameterRanges& ranges, Rng& rng);

// n_datasets independent (sample_scenario, generate_dataset) products with
// seeds derived from the base seed. jobs > 1 generates in parallel;
// results are identical either way.
std::vector<Dataset> build_randomized_library(const ScenarioConfig& base, const ParameterRanges& ranges,
                                              int n_datasets, std::size_t n_symbols, std::uint64_t seed,
                                              int jobs = 1);

}  // namespace genlab::channel

#endif
