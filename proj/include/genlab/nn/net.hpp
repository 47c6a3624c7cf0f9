#ifndef GENLAB_NN_NET_HPP
#define GENLAB_NN_NET_HPP

#include <vector>

#include "genlab/nn/model.hpp"

namespace genlab::nn {

// Batch input layout: X is [n_taps*in_features x B]; row t*C + c holds
// feature c of window position t. Targets are [out_features x B].

// Intermediate activations kept for backpropagation. Buffers are reused
// across calls of the same shape; reuse one cache per training loop.
struct ForwardCache {
    struct Direction {
        std::vector<MatrixXd> gates;   // post-activation, gate rows i|f|g|o, [4H x B]
        std::vector<MatrixXd> c;       // cell state after each processed step
        std::vector<MatrixXd> tanh_c;
        std::vector<MatrixXd> h;       // hidden state after each processed step
    };
    std::vector<MatrixXd> z;  // post-LeakyReLU conv output per reduced step, [F x B]
    Direction fwd, bwd;
    MatrixXd readout;  // [2H x B]
    MatrixXd pred;     // [out x B]

    void ensure(const EqualizerHyper& h, Eigen::Index batch);

  private:
    int tr_ = 0, f_ = 0, h_ = 0, out_ = 0;
    Eigen::Index b_ = -1;
};

// Forward pass retaining everything backward() needs.
void forward_cached(const EqualizerModel& m, const MatrixXd& x, ForwardCache& cache);

// Inference-only pass; keeps just the rolling LSTM state.
MatrixXd forward(const EqualizerModel& m, const MatrixXd& x);

// Batch-mean MSE: mean over batch and output dims of (pred - target)^2.
double mse_loss(const MatrixXd& pred, const MatrixXd& target);

// Exact gradients of mse_loss(forward(m, x), target) w.r.t. every weight.
// Gradients are produced for frozen layers too; the optimizer decides what
// to apply. `grads` is overwritten (reused when already shaped).
void backward(const EqualizerModel& m, const MatrixXd& x, const MatrixXd& target,
              const ForwardCache& cache, ModelTensors& grads);

// Convenience allocating wrapper.
ModelTensors backward(const EqualizerModel& m, const MatrixXd& x, const MatrixXd& target,
                      const ForwardCache& cache);

}  // namespace genlab::nn

#endif
