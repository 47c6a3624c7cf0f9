#ifndef GENLAB_NN_TRAIN_HPP
#define GENLAB_NN_TRAIN_HPP

#include <optional>
#include <string>
#include <vector>

#include "genlab/channel/dataset.hpp"
#include "genlab/nn/model.hpp"
#include "genlab/nn/net.hpp"
#include "genlab/types.hpp"

namespace genlab::nn {

struct TrainConfig {
    double learning_rate = 0.001;
    int batch_size = 1000;
    int max_epochs = 200;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double data_fraction = 1.0;  // in (0, 1]
    std::uint64_t seed = 1;
    bool eval_each_epoch = true;
    std::size_t eval_max_windows = 0;  // 0 = all test windows
    Polarization pol = Polarization::H;

    void validate() const;
};

// Adam with bias correction. Layers masked off in the model keep both
// their parameters and their moments untouched.
struct AdamState {
    ModelTensors m;
    ModelTensors v;
    long t = 0;
};

AdamState make_adam_state(const EqualizerHyper& h);
void adam_step(AdamState& state, EqualizerModel& model, const ModelTensors& grads,
               const TrainConfig& cfg);

struct CurvePoint {
    int epoch = 0;  // 1-based
    double train_mse = 0.0;
    double test_mi = 0.0;
    double test_mse = 0.0;
};

struct LearningCurve {
    std::vector<CurvePoint> points;
    std::string model_hash;                  // final weights
    std::vector<std::string> dataset_hashes;
    std::string config_json;

    std::string to_csv() const;  // epoch,train_mse,test_mi
};

struct EvalResult {
    double mse = 0.0;
    double mi = 0.0;
};

// Forward over (a deterministic subset of) all test windows; MI of the
// complex predictions against the transmitted symbols under the scenario
// constellation.
EvalResult evaluate(const EqualizerModel& model, const channel::Dataset& test,
                    Polarization pol = Polarization::H, std::size_t max_windows = 0);

struct TrainResult {
    LearningCurve curve;
    EqualizerModel best_model;  // snapshot at best test MI (final model if never evaluated)
    int best_epoch = 0;
    double best_mi = 0.0;
};

// Domain-randomized pre-training: each epoch picks one library dataset
// uniformly, draws per_epoch_draw window starts without replacement and
// runs minibatch Adam over the draw. eval_ds, when given, supplies the
// per-epoch test MI and best-snapshot selection.
TrainResult pretrain(EqualizerModel& model, const std::vector<channel::Dataset>& library,
                     const TrainConfig& cfg, std::size_t per_epoch_draw,
                     const channel::Dataset* eval_ds);

// Freeze the conv front end and retrain LSTM+dense on the first
// ceil(data_fraction * N') training windows. When the fraction yields less
// than one full batch, the minibatch shrinks to what is available.
TrainResult finetune(EqualizerModel& model, const channel::Dataset& train,
                     const channel::Dataset& test, const TrainConfig& cfg);

// Baseline: the freshly initialized model passed in is trained on the
// target only, all layers trainable.
TrainResult train_scratch(EqualizerModel& model_init, const channel::Dataset& train,
                          const channel::Dataset& test, const TrainConfig& cfg);

}  // namespace genlab::nn

#endif
