#include "genlab/nn/checkpoint.hpp"

#include <json.hpp>

#include <cstring>
#include <stdexcept>

#include "genlab/util/binio.hpp"
#include "genlab/util/sha256.hpp"

namespace genlab::nn {

using nlohmann::json;

namespace {
constexpr char kMagic[8] = {'O', 'E', 'Q', 'M', '0', '0', '0', '1'};

const char* readout_name(Readout r) { return r == Readout::FinalConcat ? "final_concat" : "mean_concat"; }

Readout readout_from(const std::string& s) {
    if (s == "final_concat") return Readout::FinalConcat;
    if (s == "mean_concat") return Readout::MeanConcat;
    throw std::runtime_error("unknown readout: " + s);
}
}  // namespace

void save_checkpoint(const EqualizerModel& model, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
    json header;
    header["format_version"] = 1;
    header["hyper"] = {{"n_taps", model.hyper.n_taps},
                       {"n_filters", model.hyper.n_filters},
                       {"kernel_size", model.hyper.kernel_size},
                       {"hidden_units", model.hyper.hidden_units},
                       {"in_features", model.hyper.in_features},
                       {"out_features", model.hyper.out_features},
                       {"leaky_slope", model.hyper.leaky_slope},
                       {"readout", readout_name(model.hyper.readout)}};
    header["trainable_mask"] = {{"conv", model.mask.conv},
                                {"lstm", model.mask.lstm},
                                {"dense", model.mask.dense}};
    header["provenance"] = {{"seed", meta.seed},
                            {"config", meta.config_json.empty() ? json(nullptr) : json::parse(meta.config_json)},
                            {"dataset_hashes", meta.dataset_hashes},
                            {"epoch", meta.epoch},
                            {"note", meta.note}};
    const std::string header_text = header.dump();
    const auto payload = serialize_weights(model);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(32 + header_text.size() + payload.size() + 32);
    bytes.insert(bytes.end(), kMagic, kMagic + 8);
    put_u64(bytes, header_text.size());
    bytes.insert(bytes.end(), header_text.begin(), header_text.end());
    put_u64(bytes, payload.size() / 8);
    bytes.insert(bytes.end(), payload.begin(), payload.end());

    Sha256 h;
    h.update(bytes.data(), bytes.size());
    const auto digest = h.digest();
    bytes.insert(bytes.end(), digest.begin(), digest.end());

    write_file_atomic(path, bytes);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    if (bytes.size() < 56 || std::memcmp(bytes.data(), kMagic, 8) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path.string());

    Sha256 h;
    h.update(bytes.data(), bytes.size() - 32);
    const auto digest = h.digest();
    if (std::memcmp(digest.data(), bytes.data() + bytes.size() - 32, 32) != 0)
        throw std::runtime_error("checkpoint corruption: digest mismatch for " + path.string());

    const std::uint64_t header_len = get_u64(bytes.data() + 8);
    if (16 + header_len + 8 + 32 > bytes.size())
        throw std::runtime_error("checkpoint corruption: truncated header");
    const std::string header_text(bytes.begin() + 16, bytes.begin() + 16 + long(header_len));
    const json header = json::parse(header_text);

    LoadedCheckpoint lc;
    const json& hy = header.at("hyper");
    lc.model.hyper.n_taps = hy.at("n_taps").get<int>();
    lc.model.hyper.n_filters = hy.at("n_filters").get<int>();
    lc.model.hyper.kernel_size = hy.at("kernel_size").get<int>();
    lc.model.hyper.hidden_units = hy.at("hidden_units").get<int>();
    lc.model.hyper.in_features = hy.at("in_features").get<int>();
    lc.model.hyper.out_features = hy.at("out_features").get<int>();
    lc.model.hyper.leaky_slope = hy.at("leaky_slope").get<double>();
    lc.model.hyper.readout = readout_from(hy.at("readout").get<std::string>());
    const json& mk = header.at("trainable_mask");
    lc.model.mask = {mk.at("conv").get<bool>(), mk.at("lstm").get<bool>(), mk.at("dense").get<bool>()};

    const std::size_t payload_off = 16 + header_len;
    const std::uint64_t n_doubles = get_u64(bytes.data() + payload_off);
    const std::size_t payload_bytes = n_doubles * 8;
    if (payload_off + 8 + payload_bytes + 32 != bytes.size())
        throw std::runtime_error("checkpoint corruption: payload size mismatch");
    std::vector<std::uint8_t> payload(bytes.begin() + long(payload_off + 8),
                                      bytes.begin() + long(payload_off + 8 + payload_bytes));
    deserialize_weights(lc.model, payload);

    const json& pv = header.at("provenance");
    lc.meta.seed = pv.at("seed").get<std::uint64_t>();
    lc.meta.config_json = pv.at("config").is_null() ? "" : pv.at("config").dump();
    lc.meta.dataset_hashes = pv.at("dataset_hashes").get<std::vector<std::string>>();
    lc.meta.epoch = pv.at("epoch").get<int>();
    lc.meta.note = pv.at("note").get<std::string>();
    return lc;
}

}  // namespace genlab::nn
