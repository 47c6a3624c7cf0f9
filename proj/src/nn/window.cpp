#include "genlab/nn/window.hpp"

#include <stdexcept>

namespace genlab::nn {

std::size_t window_count(const channel::Dataset& ds, int n_taps) {
    const std::size_t n = ds.n_symbols();
    if (n < std::size_t(n_taps)) throw std::invalid_argument("dataset shorter than one window");
    return n - std::size_t(n_taps) + 1;
}

WindowBatch assemble_windows(const channel::Dataset& ds, Polarization pol, int n_taps,
                             const std::vector<std::size_t>& starts) {
    const std::size_t n = ds.n_symbols();
    const int center = (n_taps - 1) / 2;
    const std::vector<cplx>& rx_a = (pol == Polarization::H) ? ds.rx.h : ds.rx.v;
    const std::vector<cplx>& rx_b = (pol == Polarization::H) ? ds.rx.v : ds.rx.h;
    const std::vector<cplx>& tx_a = (pol == Polarization::H) ? ds.tx.h : ds.tx.v;

    WindowBatch batch;
    batch.x.resize(Eigen::Index(n_taps) * 4, Eigen::Index(starts.size()));
    batch.y.resize(2, Eigen::Index(starts.size()));
    for (std::size_t b = 0; b < starts.size(); ++b) {
        const std::size_t k = starts[b];
        if (k + std::size_t(n_taps) > n) throw std::invalid_argument("window start out of range");
        for (int t = 0; t < n_taps; ++t) {
            const std::size_t s = k + std::size_t(t);
            batch.x(Eigen::Index(t) * 4 + 0, Eigen::Index(b)) = rx_a[s].real();
            batch.x(Eigen::Index(t) * 4 + 1, Eigen::Index(b)) = rx_a[s].imag();
            batch.x(Eigen::Index(t) * 4 + 2, Eigen::Index(b)) = rx_b[s].real();
            batch.x(Eigen::Index(t) * 4 + 3, Eigen::Index(b)) = rx_b[s].imag();
        }
        const cplx target = tx_a[k + std::size_t(center)];
        batch.y(0, Eigen::Index(b)) = target.real();
        batch.y(1, Eigen::Index(b)) = target.imag();
    }
    return batch;
}

WindowBatch windowize(const channel::Dataset& ds, Polarization pol, int n_taps) {
    const std::size_t count = window_count(ds, n_taps);
    std::vector<std::size_t> starts(count);
    for (std::size_t i = 0; i < count; ++i) starts[i] = i;
    return assemble_windows(ds, pol, n_taps, starts);
}

std::vector<std::size_t> eval_window_starts(const channel::Dataset& ds, int n_taps, std::size_t cap) {
    const std::size_t count = window_count(ds, n_taps);
    if (cap == 0 || count <= cap) {
        std::vector<std::size_t> all(count);
        for (std::size_t i = 0; i < count; ++i) all[i] = i;
        return all;
    }
    std::vector<std::size_t> starts(cap);
    const double stride = double(count) / double(cap);
    for (std::size_t i = 0; i < cap; ++i) starts[i] = std::size_t(double(i) * stride);
    return starts;
}

}  // namespace genlab::nn
