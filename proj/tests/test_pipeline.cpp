#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "genlab/pipeline/calibrate.hpp"
#include "genlab/pipeline/library.hpp"
#include "genlab/util/binio.hpp"

using namespace genlab;
using namespace genlab::pipeline;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("genlab_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

channel::ScenarioConfig tiny_base() {
    channel::ScenarioConfig s = channel::preset_scenario("desk");
    s.n_spans = 1;
    s.fiber.length_km = 20.0;
    s.sim.step_km = 0.5;
    s.sim.sps = 4;
    s.sim.rrc_span = 16;
    s.transceiver_snr_db.reset();
    return s;
}

std::vector<channel::Dataset> tiny_library_data(const channel::ScenarioConfig& base, int count) {
    return channel::build_randomized_library(base, channel::preset_ranges(base.fiber_type), count,
                                             1024, 99, 1);
}

}  // namespace

TEST_CASE("library store/load round trip with hashes") {
    TempDir tmp("lib1");
    Library lib{tmp.path};
    const auto base = tiny_base();
    const auto data = tiny_library_data(base, 2);
    const nn::EqualizerHyper hyper = nn::hyper_profile("desk");
    const nn::EqualizerModel model = nn::init_model(hyper, 5);

    const LibraryEntry e =
        lib.store("e1", base, channel::preset_ranges(base.fiber_type), hyper, data, &model);
    CHECK(fs::exists(tmp.path / "entries" / "e1" / "meta.json"));
    CHECK(fs::exists(tmp.path / "index.json"));

    const auto entries = lib.list();
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].id == "e1");
    CHECK(entries[0].dataset_files.size() == 2);
    REQUIRE(entries[0].model_file.has_value());

    const auto loaded = lib.load_datasets(entries[0]);
    CHECK(loaded[0].content_hash == data[0].content_hash);
    CHECK(loaded[1].content_hash == data[1].content_hash);

    const nn::EqualizerModel m2 = lib.load_model(entries[0]);
    CHECK(nn::model_hash(m2) == nn::model_hash(model));
    (void)e;
}

TEST_CASE("tampered entry fails to load and is skipped by lookup") {
    TempDir tmp("lib2");
    Library lib{tmp.path};
    const auto base = tiny_base();
    const auto data = tiny_library_data(base, 1);
    const nn::EqualizerHyper hyper = nn::hyper_profile("desk");
    const nn::EqualizerModel model = nn::init_model(hyper, 6);
    lib.store("e1", base, channel::preset_ranges(base.fiber_type), hyper, data, &model);

    // corrupt one dataset byte
    const fs::path victim = tmp.path / "entries" / "e1" / "dataset_0.bin";
    auto bytes = read_file_bytes(victim);
    bytes[100] ^= 0x80;
    write_file_atomic(victim, bytes);

    const auto entries = lib.list();
    REQUIRE(entries.size() == 1);
    CHECK_THROWS(lib.load_datasets(entries[0]));

    const LookupResult r = library_lookup(lib, base, hyper);
    CHECK(r.kind == MatchKind::None);
}

TEST_CASE("concurrent stores of distinct entries both land") {
    TempDir tmp("lib3");
    Library lib{tmp.path};
    const auto base = tiny_base();
    const auto data = tiny_library_data(base, 1);
    const nn::EqualizerHyper hyper = nn::hyper_profile("desk");

    std::thread a([&] { lib.store("ea", base, channel::preset_ranges(base.fiber_type), hyper, data, nullptr); });
    std::thread b([&] { lib.store("eb", base, channel::preset_ranges(base.fiber_type), hyper, data, nullptr); });
    a.join();
    b.join();
    const auto entries = lib.list();
    CHECK(entries.size() == 2);
}

TEST_CASE("lookup matching and the normalized distance") {
    TempDir tmp("lib4");
    Library lib{tmp.path};
    const auto base = tiny_base();  // SSMF ranges alpha [.19,.22], D [16.5,17.5], gamma [1.1,1.5]
    const auto data = tiny_library_data(base, 1);
    const nn::EqualizerHyper hyper = nn::hyper_profile("desk");
    const nn::EqualizerModel model = nn::init_model(hyper, 7);

    CHECK(library_lookup(lib, base, hyper).kind == MatchKind::None);  // empty library

    lib.store("e1", base, channel::preset_ranges(base.fiber_type), hyper, data, &model);

    // inside the ranges -> Exact
    channel::ScenarioConfig q = base;
    q.fiber.alpha_db_per_km = 0.20;
    q.fiber.dispersion_ps_nm_km = 17.2;
    q.fiber.gamma_per_w_km = 1.2;
    CHECK(library_lookup(lib, q, hyper).kind == MatchKind::Exact);

    // D = 18.0 vs range [16.5, 17.5]: distance (18-17)/0.5 = 2.0 -> None
    q.fiber.dispersion_ps_nm_km = 18.0;
    const LookupResult far = library_lookup(lib, q, hyper);
    CHECK(far.kind == MatchKind::None);

    // D = 17.6: distance 1.2 -> Near
    q.fiber.dispersion_ps_nm_km = 17.6;
    const LookupResult near = library_lookup(lib, q, hyper);
    CHECK(near.kind == MatchKind::Near);
    CHECK(near.distance == doctest::Approx(1.2));

    // link topology must match exactly
    q.fiber.dispersion_ps_nm_km = 17.0;
    q.n_spans = 2;
    CHECK(library_lookup(lib, q, hyper).kind == MatchKind::None);

    // profile must match
    q = base;
    CHECK(library_lookup(lib, q, nn::hyper_profile("paper")).kind == MatchKind::None);
}

TEST_CASE("calibrate end to end at micro scale") {
    TempDir tmp("cal1");
    TempDir out1("calout1");
    TempDir out2("calout2");
    Library lib{tmp.path};

    channel::ScenarioConfig target = tiny_base();
    target.fiber.alpha_db_per_km = 0.225;   // outside ranges, within Near band
    target.fiber.dispersion_ps_nm_km = 16.4;
    target.fiber.gamma_per_w_km = 1.55;
    target.transceiver_snr_db = 22.0;

    const channel::Dataset train = channel::generate_dataset(target, 8192, 501);
    const channel::Dataset test = channel::generate_dataset(target, 8192, 502);

    CalibrateConfig cfg;
    cfg.hyper = nn::EqualizerHyper{};
    cfg.hyper.n_filters = 8;
    cfg.hyper.hidden_units = 8;
    cfg.adapt_epochs = 3;
    cfg.pretrain_epochs = 3;
    cfg.per_epoch_draw = 512;
    cfg.n_library_datasets = 2;
    cfg.library_symbols = 1024;
    cfg.train.batch_size = 512;
    cfg.train.eval_max_windows = 512;
    cfg.seed = 7;

    const ExperimentReport r1 = calibrate(lib, train, test, cfg);
    CHECK(r1.pretrain_source == "fresh");
    REQUIRE(r1.arms.size() == 6);
    CHECK(r1.arms[0].name == "w/o NN");
    CHECK(r1.arms[1].name == "SNN");
    CHECK(r1.arms[2].name == "TNN w/o TL");
    CHECK(r1.arms[3].name == "TNN TL 100%");
    CHECK(r1.arms[4].name == "TNN TL 10%");
    CHECK(r1.arms[5].name == "TNN TL 1%");
    CHECK(r1.test_hash == test.content_hash);

    write_report(r1, out1.path);
    CHECK(fs::exists(out1.path / "report.json"));
    CHECK(fs::exists(out1.path / "w_o_nn.csv"));
    CHECK(fs::exists(out1.path / "tnn_tl_100.csv"));

    // library idempotence: second run reuses the stored model
    const ExperimentReport r2 = calibrate(lib, train, test, cfg);
    CHECK(r2.pretrain_source == "library");
    CHECK(r2.library_entry_id == r1.library_entry_id);

    // determinism: identical CSV bytes across runs
    write_report(r2, out2.path);
    for (const char* f : {"tnn_w_o_tl.csv", "tnn_tl_100.csv", "tnn_tl_10.csv", "tnn_tl_1.csv"}) {
        const auto a = read_file_bytes(out1.path / f);
        const auto b = read_file_bytes(out2.path / f);
        CHECK(a == b);
    }
}

TEST_CASE("calibrate refuses leaking train/test pairs") {
    TempDir tmp("cal2");
    Library lib{tmp.path};
    channel::ScenarioConfig target = tiny_base();
    const channel::Dataset train = channel::generate_dataset(target, 2048, 600);
    CalibrateConfig cfg;
    CHECK_THROWS(calibrate(lib, train, train, cfg));
}
