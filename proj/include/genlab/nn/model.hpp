#ifndef GENLAB_NN_MODEL_HPP
#define GENLAB_NN_MODEL_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace genlab::nn {

using Eigen::MatrixXd;

enum class Readout : std::uint8_t {
    FinalConcat,  // concat of last forward and last backward hidden states
    MeanConcat,   // time-mean of both directions' hidden states
};

struct EqualizerHyper {
    int n_taps = 25;
    int n_filters = 224;
    int kernel_size = 10;
    int hidden_units = 226;
    int in_features = 4;   // rx re/im of both polarizations
    int out_features = 2;  // recovered I/Q of the central symbol
    double leaky_slope = 0.2;
    Readout readout = Readout::FinalConcat;

    int reduced_steps() const { return n_taps - kernel_size + 1; }
    void validate() const;
    bool operator==(const EqualizerHyper&) const = default;
};

// named size profiles: "paper" (224/10/226) and "desk" (32/10/48)
EqualizerHyper hyper_profile(const std::string& name);

struct TrainableMask {
    bool conv = true;
    bool lstm = true;
    bool dense = true;

    bool operator==(const TrainableMask&) const = default;
};

// One LSTM direction; gate rows stacked i|f|g|o.
struct LstmTensors {
    MatrixXd w_in;   // [4H x F]
    MatrixXd w_rec;  // [4H x H]
    MatrixXd bias;   // [4H x 1]
};

// Weight container, reused for gradients and Adam moments.
struct ModelTensors {
    MatrixXd conv_w;  // [F x K*C], column index k*C + c
    MatrixXd conv_b;  // [F x 1]
    LstmTensors fwd;
    LstmTensors bwd;
    MatrixXd dense_w;  // [out x 2H]
    MatrixXd dense_b;  // [out x 1]
};

// Applies fn to every tensor; layer_id is 0=conv, 1=lstm, 2=dense so mask
// decisions can be made per layer.
void for_each_tensor(ModelTensors& t, const std::function<void(int layer_id, MatrixXd&)>& fn);
void for_each_tensor(const ModelTensors& t, const std::function<void(int, const MatrixXd&)>& fn);

ModelTensors zeros_like(const EqualizerHyper& h);

struct EqualizerModel {
    EqualizerHyper hyper;
    ModelTensors w;
    TrainableMask mask;
};

// Deterministic Glorot-uniform initialization (per-gate fan for the LSTM
// blocks), zero biases except the forget gates at 1.0.
EqualizerModel init_model(const EqualizerHyper& hyper, std::uint64_t seed);

// Weight payload in checkpoint order: conv W [F][C][K], conv b, per
// direction (fwd then bwd) gates i|f|g|o input-weights / recurrent-weights
// / biases, dense W row-major, dense b. Little-endian f64.
std::vector<std::uint8_t> serialize_weights(const EqualizerModel& m);
void deserialize_weights(EqualizerModel& m, const std::vector<std::uint8_t>& payload);

// SHA-256 of the serialized payload.
std::string model_hash(const EqualizerModel& m);

}  // namespace genlab::nn

#endif
