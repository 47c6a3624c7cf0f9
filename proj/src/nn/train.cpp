#include "genlab/nn/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "genlab/nn/window.hpp"
#include "genlab/rxdsp/rxdsp.hpp"
#include "genlab/util/rng.hpp"

namespace genlab::nn {

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be > 0");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (!(data_fraction > 0.0 && data_fraction <= 1.0))
        throw std::invalid_argument("data_fraction must be in (0, 1]");
}

AdamState make_adam_state(const EqualizerHyper& h) {
    AdamState s;
    s.m = zeros_like(h);
    s.v = zeros_like(h);
    s.t = 0;
    return s;
}

void adam_step(AdamState& state, EqualizerModel& model, const ModelTensors& grads,
               const TrainConfig& cfg) {
    state.t += 1;
    const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
    const double bc1 = 1.0 - std::pow(b1, double(state.t));
    const double bc2 = 1.0 - std::pow(b2, double(state.t));

    // walk all three containers in lockstep
    std::vector<MatrixXd*> ps, ms, vs;
    std::vector<const MatrixXd*> gs;
    std::vector<int> layer_ids;
    for_each_tensor(model.w, [&](int layer, MatrixXd& t) {
        ps.push_back(&t);
        layer_ids.push_back(layer);
    });
    for_each_tensor(state.m, [&](int, MatrixXd& t) { ms.push_back(&t); });
    for_each_tensor(state.v, [&](int, MatrixXd& t) { vs.push_back(&t); });
    for_each_tensor(grads, [&](int, const MatrixXd& t) { gs.push_back(&t); });

    for (std::size_t i = 0; i < ps.size(); ++i) {
        const int layer = layer_ids[i];
        const bool trainable = (layer == 0)   ? model.mask.conv
                               : (layer == 1) ? model.mask.lstm
                                              : model.mask.dense;
        if (!trainable) continue;
        MatrixXd& p = *ps[i];
        MatrixXd& m = *ms[i];
        MatrixXd& v = *vs[i];
        const MatrixXd& g = *gs[i];
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        p.array() -= cfg.learning_rate * (m.array() / bc1) /
                     ((v.array() / bc2).sqrt() + cfg.adam_eps);
    }
}

std::string LearningCurve::to_csv() const {
    std::ostringstream os;
    os << "epoch,train_mse,test_mi\n";
    char buf[96];
    for (const CurvePoint& p : points) {
        std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", p.epoch, p.train_mse, p.test_mi);
        os << buf;
    }
    return os.str();
}

EvalResult evaluate(const EqualizerModel& model, const channel::Dataset& test, Polarization pol,
                    std::size_t max_windows) {
    const auto starts = eval_window_starts(test, model.hyper.n_taps, max_windows);
    const auto constellation = signal::make_constellation(test.scenario.modulation);

    std::vector<cplx> pred, target;
    pred.reserve(starts.size());
    target.reserve(starts.size());
    double se = 0.0;
    const std::size_t chunk = 4096;
    for (std::size_t off = 0; off < starts.size(); off += chunk) {
        const std::size_t n = std::min(chunk, starts.size() - off);
        std::vector<std::size_t> part(starts.begin() + long(off), starts.begin() + long(off + n));
        const WindowBatch batch = assemble_windows(test, pol, model.hyper.n_taps, part);
        const MatrixXd p = forward(model, batch.x);
        se += (p - batch.y).array().square().sum();
        for (Eigen::Index b = 0; b < p.cols(); ++b) {
            pred.emplace_back(p(0, b), p(1, b));
            target.emplace_back(batch.y(0, b), batch.y(1, b));
        }
    }
    EvalResult r;
    r.mse = se / (2.0 * double(pred.size()));
    r.mi = rxdsp::mi_lower_bound(pred, target, constellation);
    return r;
}

namespace {

// shared epoch runner: minibatch Adam over the given window starts
struct EpochWorkspace {
    ForwardCache cache;
    ModelTensors grads;
};

double run_epoch(EqualizerModel& model, AdamState& adam, const channel::Dataset& ds,
                 const std::vector<std::size_t>& order, const TrainConfig& cfg,
                 EpochWorkspace& ws) {
    double mse_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t off = 0; off < order.size(); off += std::size_t(cfg.batch_size)) {
        const std::size_t n = std::min(std::size_t(cfg.batch_size), order.size() - off);
        std::vector<std::size_t> part(order.begin() + long(off), order.begin() + long(off + n));
        const WindowBatch batch = assemble_windows(ds, cfg.pol, model.hyper.n_taps, part);
        forward_cached(model, batch.x, ws.cache);
        mse_sum += mse_loss(ws.cache.pred, batch.y) * double(n);
        seen += n;
        backward(model, batch.x, batch.y, ws.cache, ws.grads);
        adam_step(adam, model, ws.grads, cfg);
    }
    return mse_sum / double(seen);
}

TrainResult run_training(EqualizerModel& model, const channel::Dataset* fixed_train,
                         const std::vector<channel::Dataset>* library, std::size_t per_epoch_draw,
                         const channel::Dataset* test, const TrainConfig& cfg,
                         std::size_t fixed_n_use) {
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, 0x7a11));
    TrainResult res;
    res.best_mi = -std::numeric_limits<double>::infinity();
    AdamState adam = make_adam_state(model.hyper);
    EpochWorkspace ws;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const channel::Dataset* ds = fixed_train;
        std::vector<std::size_t> order;
        if (library) {
            ds = &(*library)[rng.uniform_index(library->size())];
            const std::size_t n_windows = window_count(*ds, model.hyper.n_taps);
            order = rng.sample_without_replacement(n_windows, per_epoch_draw);
        } else {
            order.resize(fixed_n_use);
            for (std::size_t i = 0; i < fixed_n_use; ++i) order[i] = i;
            rng.shuffle(order);
        }

        const double train_mse = run_epoch(model, adam, *ds, order, cfg, ws);

        CurvePoint pt;
        pt.epoch = epoch;
        pt.train_mse = train_mse;
        if (test && cfg.eval_each_epoch) {
            const EvalResult ev = evaluate(model, *test, cfg.pol, cfg.eval_max_windows);
            pt.test_mi = ev.mi;
            pt.test_mse = ev.mse;
            if (ev.mi > res.best_mi) {
                res.best_mi = ev.mi;
                res.best_epoch = epoch;
                res.best_model = model;
            }
        }
        res.curve.points.push_back(pt);
    }
    if (res.best_epoch == 0) {
        res.best_model = model;
        res.best_epoch = cfg.max_epochs;
        if (test) {
            const EvalResult ev = evaluate(model, *test, cfg.pol, cfg.eval_max_windows);
            res.best_mi = ev.mi;
        }
    }
    res.curve.model_hash = model_hash(model);
    return res;
}

}  // namespace

TrainResult pretrain(EqualizerModel& model, const std::vector<channel::Dataset>& library,
                     const TrainConfig& cfg, std::size_t per_epoch_draw,
                     const channel::Dataset* eval_ds) {
    if (library.empty()) throw std::invalid_argument("pretrain library is empty");
    TrainResult res = run_training(model, nullptr, &library, per_epoch_draw, eval_ds, cfg, 0);
    for (const auto& ds : library) res.curve.dataset_hashes.push_back(ds.content_hash);
    return res;
}

TrainResult finetune(EqualizerModel& model, const channel::Dataset& train,
                     const channel::Dataset& test, const TrainConfig& cfg) {
    model.mask = TrainableMask{false, true, true};  // freeze the conv front end
    const std::size_t n_windows = window_count(train, model.hyper.n_taps);
    const std::size_t n_use =
        std::max<std::size_t>(1, std::size_t(std::ceil(cfg.data_fraction * double(n_windows))));
    TrainResult res = run_training(model, &train, nullptr, 0, &test, cfg, n_use);
    res.curve.dataset_hashes = {train.content_hash, test.content_hash};
    return res;
}

TrainResult train_scratch(EqualizerModel& model_init, const channel::Dataset& train,
                          const channel::Dataset& test, const TrainConfig& cfg) {
    model_init.mask = TrainableMask{true, true, true};
    const std::size_t n_windows = window_count(train, model_init.hyper.n_taps);
    const std::size_t n_use =
        std::max<std::size_t>(1, std::size_t(std::ceil(cfg.data_fraction * double(n_windows))));
    TrainResult res = run_training(model_init, &train, nullptr, 0, &test, cfg, n_use);
    res.curve.dataset_hashes = {train.content_hash, test.content_hash};
    return res;
}

}  // namespace genlab::nn
