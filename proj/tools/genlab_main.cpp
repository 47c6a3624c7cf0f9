// genlab: synthetic coherent-link data generation, equalizer pre-training
// and transfer-learning calibration from the command line.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "genlab/channel/dataset.hpp"
#include "genlab/nn/checkpoint.hpp"
#include "genlab/nn/train.hpp"
#include "genlab/pipeline/calibrate.hpp"
#include "genlab/rxdsp/rxdsp.hpp"
#include "genlab/util/binio.hpp"

namespace fs = std::filesystem;
using namespace genlab;

namespace {

channel::ScenarioConfig resolve_scenario(const std::string& preset, const std::string& file) {
    if (!preset.empty() && !file.empty())
        throw CLI::ValidationError("--preset and --scenario are mutually exclusive");
    if (!preset.empty()) return channel::preset_scenario(preset);
    if (!file.empty()) {
        const auto bytes = read_file_bytes(file);
        return channel::ScenarioConfig::from_json(std::string(bytes.begin(), bytes.end()));
    }
    throw CLI::ValidationError("one of --preset or --scenario is required");
}

int cmd_generate(const std::string& preset, const std::string& scenario_file,
                 const std::string& ranges_file, int count, std::size_t symbols,
                 std::uint64_t seed, const std::string& out_dir, int jobs, bool no_randomize) {
    channel::ScenarioConfig base = resolve_scenario(preset, scenario_file);
    fs::create_directories(out_dir);

    std::vector<channel::Dataset> datasets;
    if (count > 1 && !no_randomize) {
        channel::ParameterRanges ranges = channel::preset_ranges(base.fiber_type);
        if (!ranges_file.empty()) {
            const auto bytes = read_file_bytes(ranges_file);
            ranges = channel::ParameterRanges::from_json(std::string(bytes.begin(), bytes.end()));
        }
        datasets = channel::build_randomized_library(base, ranges, count, symbols, seed, jobs);
    } else {
        for (int i = 0; i < count; ++i)
            datasets.push_back(channel::generate_dataset(base, symbols, derive_seed(seed, std::uint64_t(i))));
    }
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const fs::path p = fs::path(out_dir) / ("dataset_" + std::to_string(i) + ".bin");
        channel::write_dataset(datasets[i], p);
        std::cout << p.string() << " hash=" << datasets[i].content_hash << "\n";
    }
    return 0;
}

nn::EqualizerHyper profile_hyper(const std::string& profile) { return nn::hyper_profile(profile); }

int cmd_pretrain(const std::string& library_root, const std::string& data_dir,
                 const std::string& profile, int epochs, double lr, std::size_t per_epoch_draw,
                 std::uint64_t seed, std::size_t eval_cap) {
    // gather datasets from the directory
    std::vector<channel::Dataset> library_data;
    std::vector<fs::path> files;
    for (const auto& de : fs::directory_iterator(data_dir))
        if (de.path().extension() == ".bin") files.push_back(de.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .bin datasets in " + data_dir);
    for (const auto& f : files) library_data.push_back(channel::load_dataset(f));

    // hold the last dataset out as the validation set when there is more
    // than one
    const channel::Dataset* validation = nullptr;
    std::vector<channel::Dataset> train_data;
    if (library_data.size() > 1) {
        validation = &library_data.back();
        train_data.assign(library_data.begin(), library_data.end() - 1);
    } else {
        train_data = library_data;
    }

    const nn::EqualizerHyper hyper = profile_hyper(profile);
    nn::EqualizerModel model = nn::init_model(hyper, derive_seed(seed, 0x111));
    nn::TrainConfig cfg;
    cfg.max_epochs = epochs;
    cfg.learning_rate = lr;
    cfg.seed = derive_seed(seed, 0x917);
    cfg.eval_max_windows = eval_cap;
    const nn::TrainResult result = nn::pretrain(model, train_data, cfg, per_epoch_draw, validation);

    channel::ScenarioConfig base = train_data.front().scenario;
    const pipeline::Library lib{library_root};
    const std::string id = "entry-" + train_data.front().content_hash.substr(0, 12);
    nn::CheckpointMeta ckmeta;
    ckmeta.seed = cfg.seed;
    ckmeta.epoch = result.best_epoch;
    ckmeta.note = "pretrain best-MI snapshot";
    for (const auto& ds : train_data) ckmeta.dataset_hashes.push_back(ds.content_hash);
    lib.store(id, base, channel::preset_ranges(base.fiber_type), hyper, train_data,
              &result.best_model, ckmeta);
    std::cout << "entry=" << id << " best_epoch=" << result.best_epoch << " best_mi=" << result.best_mi
              << "\n";
    return 0;
}

int cmd_calibrate(const std::string& library_root, const std::string& train_file,
                  const std::string& test_file, const std::string& fractions_csv, int epochs,
                  int pretrain_epochs, double pretrain_lr, const std::string& profile,
                  std::uint64_t seed, const std::string& out_dir, int jobs, std::size_t eval_cap,
                  int n_library_datasets, std::size_t library_symbols, std::size_t per_epoch_draw,
                  bool verbose) {
    const channel::Dataset train = channel::load_dataset(train_file);
    const channel::Dataset test = channel::load_dataset(test_file);

    pipeline::CalibrateConfig cfg;
    cfg.fractions.clear();
    std::stringstream ss(fractions_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.fractions.push_back(std::stod(tok));
    cfg.adapt_epochs = epochs;
    cfg.pretrain_epochs = pretrain_epochs;
    cfg.pretrain_lr = pretrain_lr;
    cfg.hyper = profile_hyper(profile);
    cfg.seed = seed;
    cfg.jobs = jobs;
    cfg.train.eval_max_windows = eval_cap;
    cfg.n_library_datasets = n_library_datasets;
    cfg.library_symbols = library_symbols;
    cfg.per_epoch_draw = per_epoch_draw;
    cfg.verbose = verbose;

    const pipeline::Library lib{library_root};
    fs::create_directories(library_root);
    const pipeline::ExperimentReport report = pipeline::calibrate(lib, train, test, cfg);
    pipeline::write_report(report, out_dir);
    for (const auto& arm : report.arms)
        std::cout << arm.name << " mi=" << arm.mi
                  << (arm.is_curve ? " best_epoch=" + std::to_string(arm.best_epoch) : "") << "\n";
    std::cout << "report=" << (fs::path(out_dir) / "report.json").string() << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_file, const std::string& dataset_file,
                 const std::string& pol_name, std::size_t eval_cap) {
    const auto loaded = nn::load_checkpoint(model_file);
    const channel::Dataset ds = channel::load_dataset(dataset_file);
    const Polarization pol = (pol_name == "V") ? Polarization::V : Polarization::H;
    const nn::EvalResult r = nn::evaluate(loaded.model, ds, pol, eval_cap);
    std::printf("mse=%.10g mi=%.10g\n", r.mse, r.mi);
    return 0;
}

int cmd_pdf(const std::string& dataset_file, const std::string& domain, const std::string& pol_name,
            int bins, double lo, double hi, const std::string& out_file) {
    const channel::Dataset ds = channel::load_dataset(dataset_file);
    const DpSymbols& sel = (domain == "tx") ? ds.tx : ds.rx;
    const std::vector<cplx>& symbols = (pol_name == "V") ? sel.v : sel.h;
    const rxdsp::IqHistogram h = rxdsp::empirical_pdf(symbols, lo, hi, bins);
    write_file_atomic(out_file, rxdsp::histogram_csv(h));
    std::cout << out_file << " clamped=" << h.clamped_samples << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"genlab: fiber-channel dataset synthesis and NN equalizer calibration"};
    app.require_subcommand(1);

    std::string preset, scenario_file, ranges_file, out_dir, library_root;
    std::string train_file, test_file, model_file, dataset_file;
    std::string profile = "desk", fractions = "1.0,0.1,0.01", pol = "H", domain = "rx";
    int count = 1, jobs = 1, epochs = 200, pretrain_epochs = 100, bins = 100;
    int n_library_datasets = 5;
    std::size_t symbols = 1 << 14, per_epoch_draw = 1 << 12, eval_cap = 4096;
    std::size_t library_symbols = 1 << 13;
    std::uint64_t seed = 1;
    double grid_lo = -2.0, grid_hi = 2.0, pretrain_lr = 0.005;
    bool no_randomize = false, verbose = false;

    auto* gen = app.add_subcommand("generate", "synthesize channel datasets");
    gen->add_option("--preset", preset, "link preset: A, B, C, desk, gap-desk");
    gen->add_option("--scenario", scenario_file, "scenario JSON file");
    gen->add_option("--ranges", ranges_file, "randomization ranges JSON file");
    gen->add_option("--count", count, "number of datasets")->default_val(1);
    gen->add_option("--symbols", symbols, "symbols per dataset")->default_val(std::size_t(1) << 14);
    gen->add_option("--seed", seed, "base seed")->default_val(std::uint64_t(1));
    gen->add_option("--out", out_dir, "output directory")->required();
    gen->add_option("--jobs", jobs, "parallel generation workers")->default_val(1);
    gen->add_flag("--no-randomize", no_randomize, "multi-seed copies of the exact scenario");

    auto* pre = app.add_subcommand("pretrain", "pre-train on a dataset directory, store in library");
    pre->add_option("--library", library_root, "library root")->envname("GENLAB_LIBRARY")->required();
    pre->add_option("--data", out_dir, "directory of .bin datasets")->required();
    pre->add_option("--profile", profile, "hyperparameter profile: paper or desk")->default_val("desk");
    pre->add_option("--epochs", pretrain_epochs, "pre-training epochs")->default_val(200);
    pre->add_option("--lr", pretrain_lr, "learning rate")->default_val(0.005);
    pre->add_option("--draw", per_epoch_draw, "windows drawn per epoch")->default_val(std::size_t(1) << 12);
    pre->add_option("--seed", seed, "seed")->default_val(std::uint64_t(1));
    pre->add_option("--eval-cap", eval_cap, "max eval windows (0 = all)")->default_val(std::size_t(4096));

    auto* cal = app.add_subcommand("calibrate", "run the full calibration comparison");
    cal->add_option("--library", library_root, "library root")->envname("GENLAB_LIBRARY")->required();
    cal->add_option("--target-train", train_file, "target training dataset (.bin)")->required();
    cal->add_option("--target-test", test_file, "target test dataset (.bin)")->required();
    cal->add_option("--fractions", fractions, "comma-separated data fractions")->default_val("1.0,0.1,0.01");
    cal->add_option("--epochs", epochs, "adaptation epochs")->default_val(200);
    cal->add_option("--pretrain-epochs", pretrain_epochs, "pre-training epochs when building")->default_val(200);
    cal->add_option("--pretrain-lr", pretrain_lr, "pre-training learning rate")->default_val(0.005);
    cal->add_option("--profile", profile, "hyperparameter profile")->default_val("desk");
    cal->add_option("--seed", seed, "seed")->default_val(std::uint64_t(1));
    cal->add_option("--out", out_dir, "report output directory")->required();
    cal->add_option("--jobs", jobs, "parallel dataset generation workers")->default_val(1);
    cal->add_option("--eval-cap", eval_cap, "max eval windows (0 = all)")->default_val(std::size_t(4096));
    cal->add_option("--library-count", n_library_datasets, "datasets when building a library")->default_val(5);
    cal->add_option("--library-symbols", library_symbols, "symbols per library dataset")
        ->default_val(std::size_t(1) << 13);
    cal->add_option("--draw", per_epoch_draw, "windows drawn per pre-training epoch")
        ->default_val(std::size_t(1) << 12);
    cal->add_flag("--verbose", verbose, "progress to stderr");

    auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset");
    ev->add_option("--model", model_file, "checkpoint (.bin)")->required();
    ev->add_option("--dataset", dataset_file, "dataset (.bin)")->required();
    ev->add_option("--pol", pol, "polarization: H or V")->default_val("H");
    ev->add_option("--eval-cap", eval_cap, "max eval windows (0 = all)")->default_val(std::size_t(0));

    auto* pdf = app.add_subcommand("pdf", "export an I/Q histogram CSV");
    pdf->add_option("--dataset", dataset_file, "dataset (.bin)")->required();
    pdf->add_option("--domain", domain, "rx or tx")->default_val("rx");
    pdf->add_option("--pol", pol, "polarization: H or V")->default_val("H");
    pdf->add_option("--bins", bins, "bins per axis")->default_val(100);
    pdf->add_option("--min", grid_lo, "grid minimum")->default_val(-2.0);
    pdf->add_option("--max", grid_hi, "grid maximum")->default_val(2.0);
    pdf->add_option("--out", out_dir, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_generate(preset, scenario_file, ranges_file, count, symbols, seed, out_dir,
                                jobs, no_randomize);
        if (pre->parsed())
            return cmd_pretrain(library_root, out_dir, profile, pretrain_epochs, pretrain_lr,
                                per_epoch_draw, seed, eval_cap);
        if (cal->parsed())
            return cmd_calibrate(library_root, train_file, test_file, fractions, epochs,
                                 pretrain_epochs, pretrain_lr, profile, seed, out_dir, jobs,
                                 eval_cap, n_library_datasets, library_symbols, per_epoch_draw,
                                 verbose);
        if (ev->parsed()) return cmd_evaluate(model_file, dataset_file, pol, eval_cap);
        if (pdf->parsed()) return cmd_pdf(dataset_file, domain, pol, bins, grid_lo, grid_hi, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
