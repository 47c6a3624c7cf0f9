#ifndef GENLAB_PIPELINE_LIBRARY_HPP
#define GENLAB_PIPELINE_LIBRARY_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genlab/channel/dataset.hpp"
#include "genlab/nn/checkpoint.hpp"
#include "genlab/nn/model.hpp"

namespace genlab::pipeline {

// On-disk layout:
//   <root>/index.json                      (derived; rebuilt on store)
//   <root>/entries/<id>/meta.json
//   <root>/entries/<id>/dataset_<k>.bin    (+ .meta.json sidecars)
//   <root>/entries/<id>/model.bin          (optional checkpoint)
// Entries are written to a temp directory and renamed into place, so
// concurrent stores of distinct entries never observe partial state.
// Loading scans entries/; index.json is informational.

struct LibraryEntry {
    std::string id;
    channel::ScenarioConfig base_scenario;  // library domain (no transceiver noise)
    channel::ParameterRanges ranges;
    nn::EqualizerHyper hyper;
    std::vector<std::string> dataset_files;  // relative to the entry dir
    std::optional<std::string> model_file;
    std::string created_at;
    std::map<std::string, std::string> file_hashes;  // relative path -> sha256
};

struct Library {
    std::filesystem::path root;

    explicit Library(std::filesystem::path r) : root(std::move(r)) {}

    std::filesystem::path entry_dir(const std::string& id) const {
        return root / "entries" / id;
    }

    // Scans entries/ and returns all readable entries (corrupted meta files
    // are skipped with a warning on stderr).
    std::vector<LibraryEntry> list() const;

    // Atomic store: datasets plus optional pre-trained model checkpoint
    // (with its training provenance). Returns the stored entry.
    LibraryEntry store(const std::string& id, const channel::ScenarioConfig& base,
                       const channel::ParameterRanges& ranges, const nn::EqualizerHyper& hyper,
                       const std::vector<channel::Dataset>& datasets,
                       const nn::EqualizerModel* model,
                       const nn::CheckpointMeta& model_meta = {}) const;

    // Loads an entry's datasets, verifying every file hash.
    std::vector<channel::Dataset> load_datasets(const LibraryEntry& e) const;

    // Loads the entry's checkpoint, verifying the file hash.
    nn::EqualizerModel load_model(const LibraryEntry& e) const;

    void rebuild_index() const;
};

enum class MatchKind { Exact, Near, None };

struct LookupResult {
    MatchKind kind = MatchKind::None;
    double distance = 0.0;  // max normalized deviation of (alpha, D, gamma)
    std::optional<LibraryEntry> entry;
};

// Modulation, fiber type, span count, span length, symbol rate and NN
// profile must match exactly. distance = max over (alpha, D, gamma) of
// |q - range_center| / range_halfwidth; Exact when every parameter lies
// inside the entry's ranges, Near when distance <= 1.5. Entries whose
// files fail their hash check are skipped with a warning.
LookupResult library_lookup(const Library& lib, const channel::ScenarioConfig& query,
                            const nn::EqualizerHyper& hyper);

}  // namespace genlab::pipeline

#endif
