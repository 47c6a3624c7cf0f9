#include "genlab/pipeline/library.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <iostream>
#include <limits>

#include "genlab/nn/checkpoint.hpp"
#include "genlab/util/binio.hpp"
#include "genlab/util/sha256.hpp"

namespace genlab::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json hyper_to_json(const nn::EqualizerHyper& h) {
    return {{"n_taps", h.n_taps},
            {"n_filters", h.n_filters},
            {"kernel_size", h.kernel_size},
            {"hidden_units", h.hidden_units},
            {"in_features", h.in_features},
            {"out_features", h.out_features},
            {"leaky_slope", h.leaky_slope},
            {"readout", h.readout == nn::Readout::FinalConcat ? "final_concat" : "mean_concat"}};
}

nn::EqualizerHyper hyper_from_json(const json& j) {
    nn::EqualizerHyper h;
    h.n_taps = j.at("n_taps").get<int>();
    h.n_filters = j.at("n_filters").get<int>();
    h.kernel_size = j.at("kernel_size").get<int>();
    h.hidden_units = j.at("hidden_units").get<int>();
    h.in_features = j.at("in_features").get<int>();
    h.out_features = j.at("out_features").get<int>();
    h.leaky_slope = j.at("leaky_slope").get<double>();
    h.readout = j.at("readout").get<std::string>() == "mean_concat" ? nn::Readout::MeanConcat
                                                                    : nn::Readout::FinalConcat;
    return h;
}

LibraryEntry entry_from_meta(const fs::path& dir, const json& meta) {
    LibraryEntry e;
    e.id = meta.at("id").get<std::string>();
    e.base_scenario = channel::ScenarioConfig::from_json(meta.at("base_scenario").dump());
    e.ranges = channel::ParameterRanges::from_json(meta.at("ranges").dump());
    e.hyper = hyper_from_json(meta.at("hyper"));
    e.dataset_files = meta.at("dataset_files").get<std::vector<std::string>>();
    if (meta.contains("model_file") && !meta.at("model_file").is_null())
        e.model_file = meta.at("model_file").get<std::string>();
    e.created_at = meta.value("created_at", "");
    for (const auto& [k, v] : meta.at("file_hashes").items()) e.file_hashes[k] = v.get<std::string>();
    (void)dir;
    return e;
}

bool verify_entry_files(const fs::path& dir, const LibraryEntry& e, std::string* why) {
    for (const auto& [rel, expected] : e.file_hashes) {
        const fs::path p = dir / rel;
        if (!fs::exists(p)) {
            *why = "missing file " + rel;
            return false;
        }
        const auto bytes = read_file_bytes(p);
        if (Sha256::hex(bytes) != expected) {
            *why = "hash mismatch for " + rel;
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<LibraryEntry> Library::list() const {
    std::vector<LibraryEntry> out;
    const fs::path dir = root / "entries";
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> subdirs;
    for (const auto& de : fs::directory_iterator(dir)) {
        if (de.is_directory() && de.path().filename().string().rfind(".tmp", 0) != 0)
            subdirs.push_back(de.path());
    }
    std::sort(subdirs.begin(), subdirs.end());
    for (const fs::path& sd : subdirs) {
        const fs::path meta_path = sd / "meta.json";
        try {
            const auto bytes = read_file_bytes(meta_path);
            const json meta = json::parse(std::string(bytes.begin(), bytes.end()));
            out.push_back(entry_from_meta(sd, meta));
        } catch (const std::exception& ex) {
            std::cerr << "warning: skipping unreadable library entry " << sd << ": " << ex.what()
                      << "\n";
        }
    }
    return out;
}

LibraryEntry Library::store(const std::string& id, const channel::ScenarioConfig& base,
                            const channel::ParameterRanges& ranges, const nn::EqualizerHyper& hyper,
                            const std::vector<channel::Dataset>& datasets,
                            const nn::EqualizerModel* model,
                            const nn::CheckpointMeta& model_meta) const {
    LibraryEntry e;
    e.id = id;
    e.base_scenario = base;
    e.ranges = ranges;
    e.hyper = hyper;
    e.created_at = now_iso8601();

    const fs::path final_dir = entry_dir(id);
    fs::path tmp_dir = root / "entries";
    fs::create_directories(tmp_dir);
    tmp_dir /= ".tmp-" + id + "-" + std::to_string(static_cast<unsigned long>(::getpid()));
    fs::create_directories(tmp_dir);

    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const std::string name = "dataset_" + std::to_string(k) + ".bin";
        channel::write_dataset(datasets[k], tmp_dir / name);
        e.dataset_files.push_back(name);
        e.file_hashes[name] = Sha256::hex(channel::serialize_dataset(datasets[k]));
    }
    if (model) {
        nn::CheckpointMeta meta = model_meta;
        if (meta.dataset_hashes.empty())
            for (const auto& ds : datasets) meta.dataset_hashes.push_back(ds.content_hash);
        nn::save_checkpoint(*model, meta, tmp_dir / "model.bin");
        e.model_file = "model.bin";
        e.file_hashes["model.bin"] = Sha256::hex(read_file_bytes(tmp_dir / "model.bin"));
    }

    json meta;
    meta["id"] = e.id;
    meta["base_scenario"] = json::parse(e.base_scenario.to_json());
    meta["ranges"] = json::parse(e.ranges.to_json());
    meta["hyper"] = hyper_to_json(e.hyper);
    meta["dataset_files"] = e.dataset_files;
    meta["model_file"] = e.model_file ? json(*e.model_file) : json(nullptr);
    meta["created_at"] = e.created_at;
    meta["file_hashes"] = e.file_hashes;
    write_file_atomic(tmp_dir / "meta.json", meta.dump(2) + "\n");

    if (fs::exists(final_dir)) fs::remove_all(final_dir);
    fs::rename(tmp_dir, final_dir);
    rebuild_index();
    return e;
}

std::vector<channel::Dataset> Library::load_datasets(const LibraryEntry& e) const {
    const fs::path dir = entry_dir(e.id);
    std::string why;
    if (!verify_entry_files(dir, e, &why))
        throw std::runtime_error("library entry " + e.id + " corrupted: " + why);
    std::vector<channel::Dataset> out;
    out.reserve(e.dataset_files.size());
    for (const std::string& f : e.dataset_files) out.push_back(channel::load_dataset(dir / f));
    return out;
}

nn::EqualizerModel Library::load_model(const LibraryEntry& e) const {
    if (!e.model_file) throw std::runtime_error("library entry " + e.id + " has no model");
    const fs::path p = entry_dir(e.id) / *e.model_file;
    const auto bytes = read_file_bytes(p);
    const auto it = e.file_hashes.find(*e.model_file);
    if (it != e.file_hashes.end() && Sha256::hex(bytes) != it->second)
        throw std::runtime_error("library entry " + e.id + " corrupted: hash mismatch for model");
    return nn::load_checkpoint(p).model;
}

void Library::rebuild_index() const {
    json idx;
    idx["entries"] = json::array();
    for (const LibraryEntry& e : list()) {
        idx["entries"].push_back({{"id", e.id},
                                  {"modulation", signal::to_string(e.base_scenario.modulation)},
                                  {"fiber_type", channel::to_string(e.base_scenario.fiber_type)},
                                  {"n_spans", e.base_scenario.n_spans},
                                  {"span_km", e.base_scenario.fiber.length_km},
                                  {"symbol_rate_baud", e.base_scenario.symbol_rate_baud},
                                  {"has_model", e.model_file.has_value()},
                                  {"created_at", e.created_at}});
    }
    write_file_atomic(root / "index.json", idx.dump(2) + "\n");
}

LookupResult library_lookup(const Library& lib, const channel::ScenarioConfig& query,
                            const nn::EqualizerHyper& hyper) {
    LookupResult best;
    best.distance = std::numeric_limits<double>::infinity();

    auto axis_dev = [](double q, double lo, double hi) {
        const double center = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        if (half <= 0.0) return std::abs(q - center) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
        return std::abs(q - center) / half;
    };

    for (const LibraryEntry& e : lib.list()) {
        const channel::ScenarioConfig& b = e.base_scenario;
        if (b.modulation != query.modulation || b.fiber_type != query.fiber_type ||
            b.n_spans != query.n_spans || b.fiber.length_km != query.fiber.length_km ||
            b.symbol_rate_baud != query.symbol_rate_baud)
            continue;
        if (!(e.hyper == hyper)) continue;

        std::string why;
        if (!verify_entry_files(lib.entry_dir(e.id), e, &why)) {
            std::cerr << "warning: skipping corrupted library entry " << e.id << " (" << why << ")\n";
            continue;
        }

        const double d = std::max({axis_dev(query.fiber.alpha_db_per_km, e.ranges.alpha_min, e.ranges.alpha_max),
                                   axis_dev(query.fiber.dispersion_ps_nm_km, e.ranges.dispersion_min,
                                            e.ranges.dispersion_max),
                                   axis_dev(query.fiber.gamma_per_w_km, e.ranges.gamma_min, e.ranges.gamma_max)});
        if (d < best.distance) {
            best.distance = d;
            best.entry = e;
        }
    }
    if (!best.entry) {
        best.kind = MatchKind::None;
        return best;
    }
    if (best.distance <= 1.0)
        best.kind = MatchKind::Exact;
    else if (best.distance <= 1.5)
        best.kind = MatchKind::Near;
    else {
        best.kind = MatchKind::None;
        best.entry.reset();
    }
    return best;
}

}  // namespace genlab::pipeline
