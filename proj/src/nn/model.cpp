#include "genlab/nn/model.hpp"

#include <cmath>
#include <stdexcept>

#include "genlab/util/binio.hpp"
#include "genlab/util/rng.hpp"
#include "genlab/util/sha256.hpp"

namespace genlab::nn {

void EqualizerHyper::validate() const {
    if (n_taps < 1 || n_taps % 2 == 0) throw std::invalid_argument("n_taps must be odd and >= 1");
    if (kernel_size < 1 || kernel_size > n_taps) throw std::invalid_argument("kernel_size must be in [1, n_taps]");
    if (n_filters < 1 || hidden_units < 1) throw std::invalid_argument("layer sizes must be >= 1");
    if (in_features < 1 || out_features < 1) throw std::invalid_argument("feature dims must be >= 1");
}

EqualizerHyper hyper_profile(const std::string& name) {
    EqualizerHyper h;
    if (name == "paper") {
        h.n_filters = 224;
        h.hidden_units = 226;
    } else if (name == "desk") {
        h.n_filters = 32;
        h.hidden_units = 48;
    } else {
        throw std::invalid_argument("unknown profile: " + name + " (use paper or desk)");
    }
    return h;
}

void for_each_tensor(ModelTensors& t, const std::function<void(int, MatrixXd&)>& fn) {
    fn(0, t.conv_w);
    fn(0, t.conv_b);
    for (LstmTensors* d : {&t.fwd, &t.bwd}) {
        fn(1, d->w_in);
        fn(1, d->w_rec);
        fn(1, d->bias);
    }
    fn(2, t.dense_w);
    fn(2, t.dense_b);
}

void for_each_tensor(const ModelTensors& t, const std::function<void(int, const MatrixXd&)>& fn) {
    for_each_tensor(const_cast<ModelTensors&>(t),
                    [&](int layer, MatrixXd& m) { fn(layer, m); });
}

ModelTensors zeros_like(const EqualizerHyper& h) {
    ModelTensors t;
    const int F = h.n_filters, H = h.hidden_units, C = h.in_features, K = h.kernel_size;
    t.conv_w = MatrixXd::Zero(F, K * C);
    t.conv_b = MatrixXd::Zero(F, 1);
    for (LstmTensors* d : {&t.fwd, &t.bwd}) {
        d->w_in = MatrixXd::Zero(4 * H, F);
        d->w_rec = MatrixXd::Zero(4 * H, H);
        d->bias = MatrixXd::Zero(4 * H, 1);
    }
    t.dense_w = MatrixXd::Zero(h.out_features, 2 * H);
    t.dense_b = MatrixXd::Zero(h.out_features, 1);
    return t;
}

namespace {

void fill_uniform(MatrixXd& m, double limit, Rng& rng) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
}

}  // namespace

EqualizerModel init_model(const EqualizerHyper& hyper, std::uint64_t seed) {
    hyper.validate();
    EqualizerModel m;
    m.hyper = hyper;
    m.w = zeros_like(hyper);
    Rng rng(seed);

    const int F = hyper.n_filters, H = hyper.hidden_units;
    const int C = hyper.in_features, K = hyper.kernel_size;

    fill_uniform(m.w.conv_w, std::sqrt(6.0 / double(C * K + F)), rng);
    for (LstmTensors* d : {&m.w.fwd, &m.w.bwd}) {
        const double lim_in = std::sqrt(6.0 / double(F + H));
        const double lim_rec = std::sqrt(6.0 / double(H + H));
        fill_uniform(d->w_in, lim_in, rng);
        fill_uniform(d->w_rec, lim_rec, rng);
        d->bias.setZero();
        d->bias.block(H, 0, H, 1).setOnes();  // forget gate bias
    }
    fill_uniform(m.w.dense_w, std::sqrt(6.0 / double(2 * H + hyper.out_features)), rng);
    return m;
}

std::vector<std::uint8_t> serialize_weights(const EqualizerModel& m) {
    const int F = m.hyper.n_filters, H = m.hyper.hidden_units;
    const int C = m.hyper.in_features, K = m.hyper.kernel_size;
    std::vector<std::uint8_t> out;

    // conv W in [F][C][K] order (storage column is k*C + c)
    for (int f = 0; f < F; ++f)
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < K; ++k) put_f64(out, m.w.conv_w(f, k * C + c));
    for (int f = 0; f < F; ++f) put_f64(out, m.w.conv_b(f, 0));

    for (const LstmTensors* d : {&m.w.fwd, &m.w.bwd}) {
        for (int r = 0; r < 4 * H; ++r)
            for (int c = 0; c < F; ++c) put_f64(out, d->w_in(r, c));
        for (int r = 0; r < 4 * H; ++r)
            for (int c = 0; c < H; ++c) put_f64(out, d->w_rec(r, c));
        for (int r = 0; r < 4 * H; ++r) put_f64(out, d->bias(r, 0));
    }
    for (int r = 0; r < m.hyper.out_features; ++r)
        for (int c = 0; c < 2 * H; ++c) put_f64(out, m.w.dense_w(r, c));
    for (int r = 0; r < m.hyper.out_features; ++r) put_f64(out, m.w.dense_b(r, 0));
    return out;
}

void deserialize_weights(EqualizerModel& m, const std::vector<std::uint8_t>& payload) {
    const int F = m.hyper.n_filters, H = m.hyper.hidden_units;
    const int C = m.hyper.in_features, K = m.hyper.kernel_size;
    const std::size_t expected =
        std::size_t(F) * C * K + F +
        2 * (std::size_t(4 * H) * F + std::size_t(4 * H) * H + 4 * H) +
        std::size_t(m.hyper.out_features) * 2 * H + m.hyper.out_features;
    if (payload.size() != expected * 8)
        throw std::runtime_error("checkpoint payload size mismatch");

    m.w = zeros_like(m.hyper);
    const std::uint8_t* p = payload.data();
    auto next = [&p]() {
        const double v = get_f64(p);
        p += 8;
        return v;
    };
    for (int f = 0; f < F; ++f)
        for (int c = 0; c < C; ++c)
            for (int k = 0; k < K; ++k) m.w.conv_w(f, k * C + c) = next();
    for (int f = 0; f < F; ++f) m.w.conv_b(f, 0) = next();
    for (LstmTensors* d : {&m.w.fwd, &m.w.bwd}) {
        for (int r = 0; r < 4 * H; ++r)
            for (int c = 0; c < F; ++c) d->w_in(r, c) = next();
        for (int r = 0; r < 4 * H; ++r)
            for (int c = 0; c < H; ++c) d->w_rec(r, c) = next();
        for (int r = 0; r < 4 * H; ++r) d->bias(r, 0) = next();
    }
    for (int r = 0; r < m.hyper.out_features; ++r)
        for (int c = 0; c < 2 * H; ++c) m.w.dense_w(r, c) = next();
    for (int r = 0; r < m.hyper.out_features; ++r) m.w.dense_b(r, 0) = next();
}

std::string model_hash(const EqualizerModel& m) {
    const auto payload = serialize_weights(m);
    return Sha256::hex(payload);
}

}  // namespace genlab::nn
