#ifndef GENLAB_NN_WINDOW_HPP
#define GENLAB_NN_WINDOW_HPP

#include <cstddef>
#include <vector>

#include "genlab/channel/dataset.hpp"
#include "genlab/nn/model.hpp"
#include "genlab/types.hpp"

namespace genlab::nn {

// A window is n_taps consecutive rx symbols starting at index k; its
// regression target is the tx symbol at the window center k+(n_taps-1)/2.
// Features per symbol, recovered polarization first: (re, im, re', im').

struct WindowBatch {
    MatrixXd x;  // [n_taps*4 x B]
    MatrixXd y;  // [2 x B]
};

std::size_t window_count(const channel::Dataset& ds, int n_taps);

// Assemble the windows starting at the given indices.
WindowBatch assemble_windows(const channel::Dataset& ds, Polarization pol, int n_taps,
                             const std::vector<std::size_t>& starts);

// All windows in order (materialized; prefer assemble_windows for training).
WindowBatch windowize(const channel::Dataset& ds, Polarization pol, int n_taps);

// Deterministic evenly-strided subset of all window starts; cap == 0 keeps
// everything.
std::vector<std::size_t> eval_window_starts(const channel::Dataset& ds, int n_taps, std::size_t cap);

}  // namespace genlab::nn

#endif
