#ifndef GENLAB_RXDSP_RXDSP_HPP
#define GENLAB_RXDSP_RXDSP_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "genlab/fft/fft.hpp"
#include "genlab/signal/constellation.hpp"
#include "genlab/types.hpp"

namespace genlab::rxdsp {

// Frequency-domain chromatic dispersion compensation. total_dispersion is
// the accumulated D*L in ps/nm; applies exp(-j (beta2_total/2) w^2) per
// polarization, the exact inverse of the propagation dispersion operator.
void cdc_compensate(DpWaveform& wave, double total_dispersion_ps_nm, double wavelength_nm, Fft& fft);

// Least-squares single complex gain: returns rx scaled by
// g = <tx, rx> / <rx, rx>, the argmin over g of sum |g rx - tx|^2.
std::vector<cplx> normalize_gain_phase(const std::vector<cplx>& rx, const std::vector<cplx>& tx);

// Mismatched-decoding mutual information lower bound with a circular
// Gaussian auxiliary channel. By default sigma^2 is the pooled mean of
// |rx - tx|^2 over all symbols; with per_point_variance the auxiliary
// channel uses one variance per constellation point. Inputs are assumed
// uniform over the constellation. May be negative; returned raw.
// sigma^2 == 0 returns log2(M) exactly.
double mi_lower_bound(const std::vector<cplx>& rx, const std::vector<cplx>& tx,
                      const signal::Constellation& c, bool per_point_variance = false);

// Bit error ratio after hard demapping of both sequences.
double ber(const std::vector<cplx>& rx, const std::vector<cplx>& tx, const signal::Constellation& c);

// Max over lags |k| <= max_lag of the magnitude of the normalized complex
// cross-covariance. 1.0 means one sequence is a scaled/rotated shift of the
// other at some lag.
double cross_correlation(const std::vector<cplx>& a, const std::vector<cplx>& b, int max_lag = 64);

// Normalized 2-D histogram over the I/Q plane. Out-of-grid samples are
// counted in the nearest edge bin and tallied in clamped_samples.
struct IqHistogram {
    double min = 0, max = 0;
    int bins = 0;
    std::vector<double> density;  // bins*bins, row = I bin, col = Q bin; sums to 1
    std::size_t clamped_samples = 0;

    double& at(int i, int q) { return density[std::size_t(i) * bins + q]; }
    double at(int i, int q) const { return density[std::size_t(i) * bins + q]; }
};

IqHistogram empirical_pdf(const std::vector<cplx>& symbols, double grid_min, double grid_max, int bins);

// CSV with header i_center,q_center,density.
std::string histogram_csv(const IqHistogram& h);

// 0.5 * sum |p - q| over bins; both histograms must share the grid.
double total_variation(const IqHistogram& a, const IqHistogram& b);

}  // namespace genlab::rxdsp

#endif
