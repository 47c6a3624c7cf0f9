#ifndef GENLAB_PIPELINE_CALIBRATE_HPP
#define GENLAB_PIPELINE_CALIBRATE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genlab/nn/train.hpp"
#include "genlab/pipeline/library.hpp"

namespace genlab::pipeline {

struct CalibrateConfig {
    std::vector<double> fractions = {1.0, 0.1, 0.01};
    int adapt_epochs = 200;   // scratch and TL arms
    int pretrain_epochs = 200;
    // Pre-training runs hotter than the adaptation arms: with desk-scale
    // epoch budgets the source model does not converge at the adaptation
    // rate of 0.001
    double pretrain_lr = 0.005;
    std::size_t per_epoch_draw = 1 << 12;  // windows per pre-training epoch
    int n_library_datasets = 5;
    std::size_t library_symbols = 1 << 13;
    nn::EqualizerHyper hyper;
    nn::TrainConfig train;          // optimizer settings shared by all arms
    std::uint64_t seed = 1;
    int jobs = 1;
    // optional per-fraction epoch override, e.g. a short TL 100% run
    std::map<double, int> fraction_epochs;
    bool verbose = false;
};

struct ArmResult {
    std::string name;
    bool is_curve = false;
    double mi = 0.0;  // scalar arms; best MI for curve arms
    int best_epoch = 0;
    nn::LearningCurve curve;
};

struct ExperimentReport {
    channel::ScenarioConfig target_scenario;
    std::string test_hash;
    std::string train_hash;
    std::vector<ArmResult> arms;
    std::string pretrain_source;  // "library" or "fresh"
    std::string library_entry_id;
    std::string config_json;
};

// The end-to-end calibration workflow:
//   1. abort unless cross_correlation(train.rx, test.rx) < 0.03
//   2. library lookup for the target scenario; on None, build a randomized
//      dataset library (transceiver noise off, fiber parameters drawn from
//      the preset ranges of the target's fiber type), pre-train and store
//   3. run all arms: "w/o NN", "SNN", "TNN w/o TL", "TNN TL x%"
// Every arm is evaluated on the same test dataset and window subset.
ExperimentReport calibrate(const Library& lib, const channel::Dataset& target_train,
                           const channel::Dataset& target_test, const CalibrateConfig& cfg);

// One CSV per arm (epoch,train_mse,test_mi; scalar arms as flat two-row
// curves) plus report.json.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

std::string arm_file_stem(const std::string& arm_name);

}  // namespace genlab::pipeline

#endif
