#include "genlab/pipeline/calibrate.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <iostream>

#include "genlab/nn/window.hpp"
#include "genlab/rxdsp/rxdsp.hpp"
#include "genlab/util/binio.hpp"

namespace genlab::pipeline {

using nlohmann::json;

namespace {

// MI of the linearly equalized symbols themselves, on the same central
// symbols the NN arms predict.
double without_nn_mi(const channel::Dataset& test, const nn::TrainConfig& tc, int n_taps) {
    const auto starts = nn::eval_window_starts(test, n_taps, tc.eval_max_windows);
    const int center = (n_taps - 1) / 2;
    const std::vector<cplx>& rx = (tc.pol == Polarization::H) ? test.rx.h : test.rx.v;
    const std::vector<cplx>& tx = (tc.pol == Polarization::H) ? test.tx.h : test.tx.v;
    std::vector<cplx> r, t;
    r.reserve(starts.size());
    t.reserve(starts.size());
    for (std::size_t k : starts) {
        r.push_back(rx[k + std::size_t(center)]);
        t.push_back(tx[k + std::size_t(center)]);
    }
    const auto constellation = signal::make_constellation(test.scenario.modulation);
    return rxdsp::mi_lower_bound(r, t, constellation);
}

std::string fraction_label(double f) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g%%", f * 100.0);
    return buf;
}

}  // namespace

std::string arm_file_stem(const std::string& arm_name) {
    std::string s;
    for (char c : arm_name) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            s.push_back(char(std::tolower(static_cast<unsigned char>(c))));
        else if (!s.empty() && s.back() != '_')
            s.push_back('_');
    }
    while (!s.empty() && s.back() == '_') s.pop_back();
    return s;
}

ExperimentReport calibrate(const Library& lib, const channel::Dataset& target_train,
                           const channel::Dataset& target_test, const CalibrateConfig& cfg) {
    // leakage guarantee between train and test
    const double leak = rxdsp::cross_correlation(target_train.rx_concat(), target_test.rx_concat());
    if (leak >= 0.03)
        throw std::runtime_error("train/test leakage: cross-correlation " + std::to_string(leak) +
                                 " >= 0.03");

    ExperimentReport report;
    report.target_scenario = target_train.scenario;
    report.test_hash = target_test.content_hash;
    report.train_hash = target_train.content_hash;

    auto log = [&](const std::string& msg) {
        if (cfg.verbose) std::cerr << "[calibrate] " << msg << "\n";
    };

    // library lookup -> pre-trained source model
    nn::EqualizerModel source;
    LookupResult found = library_lookup(lib, target_train.scenario, cfg.hyper);
    if (found.kind == MatchKind::None) {
        log("no usable library entry; generating randomized library + pre-training");
        channel::ScenarioConfig base = target_train.scenario;
        base.transceiver_snr_db.reset();  // library lives in the idealized domain
        base.seed = cfg.seed;
        const channel::ParameterRanges ranges = channel::preset_ranges(base.fiber_type);
        const auto library_data = channel::build_randomized_library(
            base, ranges, cfg.n_library_datasets, cfg.library_symbols, derive_seed(cfg.seed, 0x11b),
            cfg.jobs);
        const channel::Dataset validation =
            channel::generate_dataset(base, cfg.library_symbols, derive_seed(cfg.seed, 0x7a1));

        nn::EqualizerModel model = nn::init_model(cfg.hyper, derive_seed(cfg.seed, 0x111));
        nn::TrainConfig ptc = cfg.train;
        ptc.max_epochs = cfg.pretrain_epochs;
        ptc.learning_rate = cfg.pretrain_lr;
        ptc.seed = derive_seed(cfg.seed, 0x917);
        const nn::TrainResult pt = nn::pretrain(model, library_data, ptc, cfg.per_epoch_draw, &validation);
        log("pre-training done: best MI " + std::to_string(pt.best_mi) + " at epoch " +
            std::to_string(pt.best_epoch));

        const std::string id = "entry-" + target_train.content_hash.substr(0, 12);
        nn::CheckpointMeta ckmeta;
        ckmeta.seed = ptc.seed;
        ckmeta.epoch = pt.best_epoch;
        ckmeta.note = "pretrain best-MI snapshot";
        ckmeta.config_json = json({{"learning_rate", ptc.learning_rate},
                                   {"batch_size", ptc.batch_size},
                                   {"max_epochs", ptc.max_epochs},
                                   {"per_epoch_draw", cfg.per_epoch_draw}})
                                 .dump();
        for (const auto& ds : library_data) ckmeta.dataset_hashes.push_back(ds.content_hash);
        lib.store(id, base, ranges, cfg.hyper, library_data, &pt.best_model, ckmeta);
        source = pt.best_model;
        report.pretrain_source = "fresh";
        report.library_entry_id = id;
    } else {
        log(std::string("library ") + (found.kind == MatchKind::Exact ? "Exact" : "Near") +
            " match, distance " + std::to_string(found.distance));
        source = lib.load_model(*found.entry);
        report.pretrain_source = "library";
        report.library_entry_id = found.entry->id;
    }

    // --- arms ---
    // "w/o NN": linear equalization only
    {
        ArmResult arm;
        arm.name = "w/o NN";
        arm.mi = without_nn_mi(target_test, cfg.train, cfg.hyper.n_taps);
        report.arms.push_back(std::move(arm));
        log("w/o NN MI " + std::to_string(report.arms.back().mi));
    }
    // "SNN": synthetic-only model, no retraining
    {
        ArmResult arm;
        arm.name = "SNN";
        arm.mi = nn::evaluate(source, target_test, cfg.train.pol, cfg.train.eval_max_windows).mi;
        report.arms.push_back(std::move(arm));
        log("SNN MI " + std::to_string(report.arms.back().mi));
    }
    // "TNN w/o TL": from-scratch baseline on target data only
    {
        nn::TrainConfig tc = cfg.train;
        tc.max_epochs = cfg.adapt_epochs;
        tc.data_fraction = 1.0;
        tc.seed = derive_seed(cfg.seed, 0x5ccc);
        nn::EqualizerModel fresh = nn::init_model(cfg.hyper, derive_seed(tc.seed, 0x1917));
        const nn::TrainResult r = nn::train_scratch(fresh, target_train, target_test, tc);
        ArmResult arm;
        arm.name = "TNN w/o TL";
        arm.is_curve = true;
        arm.curve = r.curve;
        arm.mi = r.best_mi;
        arm.best_epoch = r.best_epoch;
        report.arms.push_back(std::move(arm));
        log("TNN w/o TL best MI " + std::to_string(r.best_mi) + " at epoch " +
            std::to_string(r.best_epoch));
    }
    // "TNN TL x%"
    for (double fraction : cfg.fractions) {
        nn::EqualizerModel model = source;
        nn::TrainConfig tc = cfg.train;
        tc.max_epochs = cfg.adapt_epochs;
        if (auto it = cfg.fraction_epochs.find(fraction); it != cfg.fraction_epochs.end())
            tc.max_epochs = it->second;
        tc.data_fraction = fraction;
        tc.seed = derive_seed(cfg.seed, 0x71 + std::uint64_t(fraction * 1e6));
        const nn::TrainResult r = nn::finetune(model, target_train, target_test, tc);
        ArmResult arm;
        arm.name = "TNN TL " + fraction_label(fraction);
        arm.is_curve = true;
        arm.curve = r.curve;
        arm.mi = r.best_mi;
        arm.best_epoch = r.best_epoch;
        report.arms.push_back(std::move(arm));
        log(report.arms.back().name + " best MI " + std::to_string(r.best_mi) + " at epoch " +
            std::to_string(r.best_epoch));
    }

    json cfg_json;
    cfg_json["fractions"] = cfg.fractions;
    cfg_json["adapt_epochs"] = cfg.adapt_epochs;
    cfg_json["pretrain_epochs"] = cfg.pretrain_epochs;
    cfg_json["per_epoch_draw"] = cfg.per_epoch_draw;
    cfg_json["n_library_datasets"] = cfg.n_library_datasets;
    cfg_json["library_symbols"] = cfg.library_symbols;
    cfg_json["seed"] = cfg.seed;
    cfg_json["learning_rate"] = cfg.train.learning_rate;
    cfg_json["batch_size"] = cfg.train.batch_size;
    cfg_json["eval_max_windows"] = cfg.train.eval_max_windows;
    report.config_json = cfg_json.dump();
    return report;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    json j;
    j["target_scenario"] = json::parse(report.target_scenario.to_json());
    j["test_dataset_hash"] = report.test_hash;
    j["train_dataset_hash"] = report.train_hash;
    j["pretrain_source"] = report.pretrain_source;
    j["library_entry_id"] = report.library_entry_id;
    j["config"] = json::parse(report.config_json);
    j["arms"] = json::array();

    for (const ArmResult& arm : report.arms) {
        json a;
        a["name"] = arm.name;
        a["mi"] = arm.mi;
        a["test_dataset_hash"] = report.test_hash;
        if (arm.is_curve) {
            a["best_epoch"] = arm.best_epoch;
            a["curve_csv"] = arm_file_stem(arm.name) + ".csv";
            write_file_atomic(out_dir / (arm_file_stem(arm.name) + ".csv"), arm.curve.to_csv());
        } else {
            // scalar arms exported as flat curves for uniform plotting
            char buf[96];
            std::string csv = "epoch,train_mse,test_mi\n";
            std::snprintf(buf, sizeof(buf), "1,nan,%.10g\n", arm.mi);
            csv += buf;
            a["curve_csv"] = arm_file_stem(arm.name) + ".csv";
            write_file_atomic(out_dir / (arm_file_stem(arm.name) + ".csv"), csv);
        }
        j["arms"].push_back(a);
    }
    write_file_atomic(out_dir / "report.json", j.dump(2) + "\n");
}

}  // namespace genlab::pipeline
