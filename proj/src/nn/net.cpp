#include "genlab/nn/net.hpp"

#include <stdexcept>

namespace genlab::nn {

namespace {

inline void sigmoid_inplace(Eigen::Ref<MatrixXd> x) {
    x = (1.0 / (1.0 + (-x.array()).exp())).matrix();
}

inline void tanh_inplace(Eigen::Ref<MatrixXd> x) { x = x.array().tanh().matrix(); }

// one LSTM step: writes gates/c/tanh_c/h for slot s
void lstm_step(const LstmTensors& w, const MatrixXd& z, const MatrixXd* h_prev,
               const MatrixXd* c_prev, ForwardCache::Direction& dir, std::size_t s, int H) {
    MatrixXd& g = dir.gates[s];
    g.noalias() = w.w_in * z;
    if (h_prev) g.noalias() += w.w_rec * *h_prev;
    g.colwise() += w.bias.col(0);
    sigmoid_inplace(g.topRows(H));
    sigmoid_inplace(g.middleRows(H, H));
    tanh_inplace(g.middleRows(2 * H, H));
    sigmoid_inplace(g.bottomRows(H));

    const auto gi = g.topRows(H).array();
    const auto gf = g.middleRows(H, H).array();
    const auto gg = g.middleRows(2 * H, H).array();
    const auto go = g.bottomRows(H).array();
    if (c_prev)
        dir.c[s] = (gf * c_prev->array() + gi * gg).matrix();
    else
        dir.c[s] = (gi * gg).matrix();
    dir.tanh_c[s] = dir.c[s].array().tanh().matrix();
    dir.h[s] = (go * dir.tanh_c[s].array()).matrix();
}

}  // namespace

void ForwardCache::ensure(const EqualizerHyper& hp, Eigen::Index batch) {
    const int tr = hp.reduced_steps();
    if (tr == tr_ && hp.n_filters == f_ && hp.hidden_units == h_ && hp.out_features == out_ &&
        batch == b_)
        return;
    tr_ = tr;
    f_ = hp.n_filters;
    h_ = hp.hidden_units;
    out_ = hp.out_features;
    b_ = batch;

    z.assign(std::size_t(tr), MatrixXd(f_, batch));
    for (Direction* d : {&fwd, &bwd}) {
        d->gates.assign(std::size_t(tr), MatrixXd(4 * h_, batch));
        d->c.assign(std::size_t(tr), MatrixXd(h_, batch));
        d->tanh_c.assign(std::size_t(tr), MatrixXd(h_, batch));
        d->h.assign(std::size_t(tr), MatrixXd(h_, batch));
    }
    readout.resize(2 * h_, batch);
    pred.resize(out_, batch);
}

double mse_loss(const MatrixXd& pred, const MatrixXd& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw std::invalid_argument("prediction/target shape mismatch");
    return (pred - target).array().square().mean();
}

void forward_cached(const EqualizerModel& m, const MatrixXd& x, ForwardCache& cache) {
    const EqualizerHyper& hp = m.hyper;
    const int C = hp.in_features, K = hp.kernel_size, H = hp.hidden_units;
    const int T = hp.n_taps, Tr = hp.reduced_steps();
    if (x.rows() != Eigen::Index(T) * C) throw std::invalid_argument("input row count != n_taps*in_features");
    const Eigen::Index B = x.cols();
    cache.ensure(hp, B);

    const double slope = hp.leaky_slope;
    for (int t = 0; t < Tr; ++t) {
        MatrixXd& z = cache.z[std::size_t(t)];
        z.noalias() = m.w.conv_w * x.middleRows(Eigen::Index(t) * C, Eigen::Index(K) * C);
        z.colwise() += m.w.conv_b.col(0);
        z = z.array().max(z.array() * slope).matrix();
    }

    for (int t = 0; t < Tr; ++t) {
        const std::size_t s = std::size_t(t);
        lstm_step(m.w.fwd, cache.z[s], t > 0 ? &cache.fwd.h[s - 1] : nullptr,
                  t > 0 ? &cache.fwd.c[s - 1] : nullptr, cache.fwd, s, H);
    }
    for (int t = Tr - 1; t >= 0; --t) {
        const std::size_t s = std::size_t(Tr - 1 - t);  // processing order
        lstm_step(m.w.bwd, cache.z[std::size_t(t)], s > 0 ? &cache.bwd.h[s - 1] : nullptr,
                  s > 0 ? &cache.bwd.c[s - 1] : nullptr, cache.bwd, s, H);
    }

    if (hp.readout == Readout::FinalConcat) {
        cache.readout.topRows(H) = cache.fwd.h.back();
        cache.readout.bottomRows(H) = cache.bwd.h.back();
    } else {
        cache.readout.topRows(H) = cache.fwd.h[0];
        cache.readout.bottomRows(H) = cache.bwd.h[0];
        for (int t = 1; t < Tr; ++t) {
            cache.readout.topRows(H) += cache.fwd.h[std::size_t(t)];
            cache.readout.bottomRows(H) += cache.bwd.h[std::size_t(t)];
        }
        cache.readout /= double(Tr);
    }
    cache.pred.noalias() = m.w.dense_w * cache.readout;
    cache.pred.colwise() += m.w.dense_b.col(0);
}

MatrixXd forward(const EqualizerModel& m, const MatrixXd& x) {
    const EqualizerHyper& hp = m.hyper;
    const int C = hp.in_features, K = hp.kernel_size, H = hp.hidden_units;
    const int T = hp.n_taps, Tr = hp.reduced_steps();
    if (x.rows() != Eigen::Index(T) * C) throw std::invalid_argument("input row count != n_taps*in_features");
    const Eigen::Index B = x.cols();

    const double slope = hp.leaky_slope;
    std::vector<MatrixXd> z;
    z.resize(std::size_t(Tr));
    for (int t = 0; t < Tr; ++t) {
        z[std::size_t(t)].noalias() = m.w.conv_w * x.middleRows(Eigen::Index(t) * C, Eigen::Index(K) * C);
        z[std::size_t(t)].colwise() += m.w.conv_b.col(0);
        z[std::size_t(t)] = z[std::size_t(t)].array().max(z[std::size_t(t)].array() * slope).matrix();
    }

    // rolling state only
    MatrixXd readout(2 * H, B);
    MatrixXd gates(4 * H, B);
    auto run_dir = [&](const LstmTensors& w, bool reverse, Eigen::Ref<MatrixXd> out_rows) {
        MatrixXd h = MatrixXd::Zero(H, B), c = MatrixXd::Zero(H, B), tc(H, B);
        MatrixXd mean = MatrixXd::Zero(H, B);
        for (int s = 0; s < Tr; ++s) {
            const int t = reverse ? Tr - 1 - s : s;
            gates.noalias() = w.w_in * z[std::size_t(t)];
            gates.noalias() += w.w_rec * h;
            gates.colwise() += w.bias.col(0);
            sigmoid_inplace(gates.topRows(H));
            sigmoid_inplace(gates.middleRows(H, H));
            tanh_inplace(gates.middleRows(2 * H, H));
            sigmoid_inplace(gates.bottomRows(H));
            c = (gates.middleRows(H, H).array() * c.array() +
                 gates.topRows(H).array() * gates.middleRows(2 * H, H).array())
                    .matrix();
            tc = c.array().tanh().matrix();
            h = (gates.bottomRows(H).array() * tc.array()).matrix();
            if (hp.readout == Readout::MeanConcat) mean += h;
        }
        out_rows = (hp.readout == Readout::FinalConcat) ? h : MatrixXd(mean / double(Tr));
    };
    run_dir(m.w.fwd, false, readout.topRows(H));
    run_dir(m.w.bwd, true, readout.bottomRows(H));

    MatrixXd pred(hp.out_features, B);
    pred.noalias() = m.w.dense_w * readout;
    pred.colwise() += m.w.dense_b.col(0);
    return pred;
}

void backward(const EqualizerModel& m, const MatrixXd& x, const MatrixXd& target,
              const ForwardCache& cache, ModelTensors& g) {
    const EqualizerHyper& hp = m.hyper;
    const int C = hp.in_features, K = hp.kernel_size, H = hp.hidden_units;
    const int Tr = hp.reduced_steps();
    const Eigen::Index B = x.cols();
    if (cache.pred.cols() != B) throw std::invalid_argument("cache/batch mismatch");

    // shape (or reuse) the gradient container, zeroed
    if (g.conv_w.rows() != hp.n_filters || g.conv_w.cols() != Eigen::Index(K) * C) g = zeros_like(hp);
    for_each_tensor(g, [](int, MatrixXd& t) { t.setZero(); });

    MatrixXd dpred = (cache.pred - target) * (2.0 / double(cache.pred.size()));
    g.dense_w.noalias() = dpred * cache.readout.transpose();
    g.dense_b = dpred.rowwise().sum();
    MatrixXd dreadout = m.w.dense_w.transpose() * dpred;  // [2H x B]

    std::vector<MatrixXd> dz(std::size_t(Tr), MatrixXd::Zero(hp.n_filters, B));

    MatrixXd dh(H, B), dc(H, B), dgates(4 * H, B);
    auto bptt = [&](const LstmTensors& w, const ForwardCache::Direction& dir, LstmTensors& gd,
                    const Eigen::Ref<const MatrixXd>& dh_final, bool mean_readout,
                    bool reverse) {
        dh.setZero();
        dc.setZero();
        const double mean_scale = 1.0 / double(Tr);
        for (int s = Tr - 1; s >= 0; --s) {
            const std::size_t su = std::size_t(s);
            if (s == Tr - 1 && !mean_readout) dh += dh_final;
            if (mean_readout) dh += dh_final * mean_scale;
            const int t = reverse ? Tr - 1 - s : s;  // which z this step consumed

            const auto gi = dir.gates[su].topRows(H).array();
            const auto gf = dir.gates[su].middleRows(H, H).array();
            const auto gg = dir.gates[su].middleRows(2 * H, H).array();
            const auto go = dir.gates[su].bottomRows(H).array();
            const auto tc = dir.tanh_c[su].array();

            dc.array() += dh.array() * go * (1.0 - tc.square());

            dgates.topRows(H) = (dc.array() * gg * gi * (1.0 - gi)).matrix();
            if (s == 0)
                dgates.middleRows(H, H).setZero();  // c_prev is zero
            else
                dgates.middleRows(H, H) =
                    (dc.array() * dir.c[su - 1].array() * gf * (1.0 - gf)).matrix();
            dgates.middleRows(2 * H, H) = (dc.array() * gi * (1.0 - gg.square())).matrix();
            dgates.bottomRows(H) = (dh.array() * tc * go * (1.0 - go)).matrix();

            gd.w_in.noalias() += dgates * cache.z[std::size_t(t)].transpose();
            if (s > 0) gd.w_rec.noalias() += dgates * dir.h[su - 1].transpose();
            gd.bias += dgates.rowwise().sum();
            dz[std::size_t(t)].noalias() += w.w_in.transpose() * dgates;

            dh.noalias() = w.w_rec.transpose() * dgates;
            dc.array() *= gf;
        }
    };

    const bool mean_readout = hp.readout == Readout::MeanConcat;
    bptt(m.w.fwd, cache.fwd, g.fwd, dreadout.topRows(H), mean_readout, false);
    bptt(m.w.bwd, cache.bwd, g.bwd, dreadout.bottomRows(H), mean_readout, true);

    const double slope = hp.leaky_slope;
    MatrixXd dy(hp.n_filters, B);
    for (int t = 0; t < Tr; ++t) {
        const std::size_t tu = std::size_t(t);
        dy = (dz[tu].array() * (cache.z[tu].array() > 0.0).select(
                                   Eigen::ArrayXXd::Ones(hp.n_filters, B),
                                   Eigen::ArrayXXd::Constant(hp.n_filters, B, slope)))
                 .matrix();
        g.conv_w.noalias() += dy * x.middleRows(Eigen::Index(t) * C, Eigen::Index(K) * C).transpose();
        g.conv_b += dy.rowwise().sum();
    }
}

ModelTensors backward(const EqualizerModel& m, const MatrixXd& x, const MatrixXd& target,
                      const ForwardCache& cache) {
    ModelTensors g = zeros_like(m.hyper);
    backward(m, x, target, cache, g);
    return g;
}

}  // namespace genlab::nn
