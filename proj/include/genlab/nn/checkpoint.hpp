#ifndef GENLAB_NN_CHECKPOINT_HPP
#define GENLAB_NN_CHECKPOINT_HPP

#include <filesystem>
#include <string>

#include "genlab/nn/model.hpp"

namespace genlab::nn {

// Checkpoint container, little-endian:
//   magic "OEQM0001" | u64 header_len | header JSON | u64 n_doubles |
//   weight payload (f64, order documented in model.hpp) | sha256 of all
//   preceding bytes.
// The header carries hyper, trainable_mask and training provenance
// (seed, config, dataset hashes, epoch). Any single-byte corruption is
// caught by the trailing digest.

struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::string config_json;                  // optimizer settings used
    std::vector<std::string> dataset_hashes;  // training data provenance
    int epoch = 0;                            // epoch of the stored weights
    std::string note;
};

void save_checkpoint(const EqualizerModel& model, const CheckpointMeta& meta,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
    EqualizerModel model;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace genlab::nn

#endif
