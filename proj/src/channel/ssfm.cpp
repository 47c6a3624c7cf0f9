#include "genlab/channel/ssfm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace genlab::channel {

namespace {
constexpr double kSpeedOfLightNmPerPs = 299792.458;  // also km/s
constexpr double kPlanck = 6.62607015e-34;           // J s
constexpr double kManakovFactor = 8.0 / 9.0;

void check_finite(const DpWaveform& w, const char* where) {
    for (const auto* pol : {&w.h, &w.v}) {
        for (const cplx& x : *pol) {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw std::runtime_error(std::string("non-finite field during ") + where);
        }
    }
}

// one linear step of length dz_km on both polarizations (frequency domain)
void linear_step(DpWaveform& w, const std::vector<double>& omega, double beta2, double alpha_np,
                 double dz_km, Fft& fft) {
    const double loss = std::exp(-0.5 * alpha_np * dz_km);
    for (auto* pol : {&w.h, &w.v}) {
        fft.forward(*pol);
        for (std::size_t k = 0; k < pol->size(); ++k) {
            const double phase = 0.5 * beta2 * omega[k] * omega[k] * dz_km;
            (*pol)[k] *= loss * cplx(std::cos(phase), std::sin(phase));
        }
        fft.inverse(*pol);
    }
}

void nonlinear_step(DpWaveform& w, double gamma, double dz_km) {
    const double c = kManakovFactor * gamma * dz_km;
    for (std::size_t i = 0; i < w.h.size(); ++i) {
        const double p = std::norm(w.h[i]) + std::norm(w.v[i]);
        const cplx rot(std::cos(c * p), std::sin(c * p));
        w.h[i] *= rot;
        w.v[i] *= rot;
    }
}

}  // namespace

double derive_beta2(double dispersion_ps_nm_km, double wavelength_nm) {
    const double two_pi = 6.283185307179586476925286766559;
    return -dispersion_ps_nm_km * wavelength_nm * wavelength_nm / (two_pi * kSpeedOfLightNmPerPs);
}

void ssfm_propagate(DpWaveform& wave, const FiberParams& fiber, double wavelength_nm,
                    double step_km, Fft& fft) {
    fiber.validate();
    if (step_km <= 0) throw std::invalid_argument("step_km must be > 0");
    if (step_km > fiber.length_km) throw std::invalid_argument("step_km exceeds fiber length");
    if (wave.h.size() != wave.v.size()) throw std::invalid_argument("polarization length mismatch");
    if (wave.sample_rate_hz <= 0) throw std::invalid_argument("waveform sample rate unset");

    const double beta2 = derive_beta2(fiber.dispersion_ps_nm_km, wavelength_nm);
    const double alpha_np = fiber.alpha_db_per_km * std::log(10.0) / 10.0;
    const int n_steps = std::max(1, int(std::ceil(fiber.length_km / step_km - 1e-12)));
    const double dz = fiber.length_km / n_steps;

    const double dt_ps = 1e12 / wave.sample_rate_hz;
    const std::vector<double> omega = fft_angular_freqs(wave.size(), dt_ps);  // rad/ps

    // symmetric splitting with merged interior half-steps:
    // L(dz/2) N(dz) [L(dz) N(dz)]^{n-1} L(dz/2)
    linear_step(wave, omega, beta2, alpha_np, 0.5 * dz, fft);
    nonlinear_step(wave, fiber.gamma_per_w_km, dz);
    for (int s = 1; s < n_steps; ++s) {
        linear_step(wave, omega, beta2, alpha_np, dz, fft);
        nonlinear_step(wave, fiber.gamma_per_w_km, dz);
    }
    linear_step(wave, omega, beta2, alpha_np, 0.5 * dz, fft);

    check_finite(wave, "ssfm_propagate");
}

void edfa_amplify(DpWaveform& wave, double gain_db, std::optional<double> noise_figure_db,
                  double wavelength_nm, Rng& rng) {
    if (gain_db < 0) throw std::invalid_argument("amplifier gain must be >= 0 dB");
    const double gain = std::pow(10.0, gain_db / 20.0);
    for (auto* pol : {&wave.h, &wave.v})
        for (cplx& x : *pol) x *= gain;

    if (!noise_figure_db) return;
    if (*noise_figure_db < 0) throw std::invalid_argument("noise figure must be >= 0 dB (F >= 1)");

    const double g_lin = gain * gain;  // power gain
    if (g_lin <= 1.0) return;          // no gain, no ASE
    const double f_lin = std::pow(10.0, *noise_figure_db / 10.0);
    const double nu = kSpeedOfLightNmPerPs * 1e12 / wavelength_nm;  // Hz
    const double psd = (g_lin - 1.0) * f_lin * kPlanck * nu / 2.0;  // W/Hz per polarization
    const double var = psd * wave.sample_rate_hz;                   // noise power in sim bandwidth
    const double sigma = std::sqrt(var / 2.0);                      // per quadrature
    for (auto* pol : {&wave.h, &wave.v})
        for (cplx& x : *pol) x += cplx(sigma * rng.normal(), sigma * rng.normal());
}

}  // namespace genlab::channel
