#ifndef GENLAB_CHANNEL_SSFM_HPP
#define GENLAB_CHANNEL_SSFM_HPP

#include "genlab/channel/scenario.hpp"
#include "genlab/fft/fft.hpp"
#include "genlab/types.hpp"
#include "genlab/util/rng.hpp"

namespace genlab::channel {

// D [ps/(nm km)] -> beta2 [ps^2/km] at the given wavelength.
// beta2 = -D * lambda^2 / (2 pi c), c = 299792.458 nm/ps.
double derive_beta2(double dispersion_ps_nm_km, double wavelength_nm);

// Dual-polarization Manakov propagation over one fiber of the given
// parameters, symmetric split-step with uniform steps of at most step_km.
// Fields are in sqrt(W); the waveform grid is treated as periodic.
//
//   dA/dz = -(alpha/2) A - j (beta2/2) d^2A/dt^2 + j (8/9) gamma (|Ah|^2+|Av|^2) A
//
// The linear factor applied in frequency domain per dz is
// exp(+j (beta2/2) w^2 dz - (alpha/2) dz).
void ssfm_propagate(DpWaveform& wave, const FiberParams& fiber, double wavelength_nm,
                    double step_km, Fft& fft);

// Flat-gain amplifier: field scaled by 10^(gain/20); if noise_figure_db is
// set, circular complex ASE is added per polarization with PSD
// rho = (G-1) * F * h * nu / 2 integrated over the simulation bandwidth.
void edfa_amplify(DpWaveform& wave, double gain_db, std::optional<double> noise_figure_db,
                  double wavelength_nm, Rng& rng);

}  // namespace genlab::channel

#endif
