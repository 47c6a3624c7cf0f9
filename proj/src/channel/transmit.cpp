#include "genlab/channel/transmit.hpp"

#include <cmath>
#include <stdexcept>

#include "genlab/signal/pulse.hpp"

namespace genlab::channel {

TransmitResult transmit(const ScenarioConfig& sc, const DpSymbols& symbols, Rng& rng, Fft& fft) {
    sc.validate();
    if (symbols.h.size() != symbols.v.size()) throw std::invalid_argument("polarization length mismatch");
    const int sps = sc.sim.sps;

    const auto taps = signal::rrc_taps(sc.roll_off, sc.sim.rrc_span, sps);
    TransmitResult res;
    res.wave.h = signal::upsample_shape(symbols.h, sps, taps);
    res.wave.v = signal::upsample_shape(symbols.v, sps, taps);
    res.wave.sample_rate_hz = sc.symbol_rate_baud * sps;
    res.unpadded_length = res.wave.h.size();

    // exact launch-power scaling: mean(|h|^2 + |v|^2) -> P_launch
    const double p_target_w = 1e-3 * std::pow(10.0, sc.launch_power_dbm / 10.0);
    double p_now = 0.0;
    for (std::size_t i = 0; i < res.wave.size(); ++i)
        p_now += std::norm(res.wave.h[i]) + std::norm(res.wave.v[i]);
    p_now /= double(res.wave.size());
    if (p_now <= 0.0) throw std::invalid_argument("zero-power transmit waveform");
    const double scale = std::sqrt(p_target_w / p_now);
    for (auto* pol : {&res.wave.h, &res.wave.v})
        for (cplx& x : *pol) x *= scale;

    // pad to a power-of-two grid; the slack doubles as a guard interval for
    // dispersion walk-off under the periodic boundary
    const double beta2_tot = std::abs(derive_beta2(sc.fiber.dispersion_ps_nm_km, sc.wavelength_nm)) *
                             sc.fiber.length_km * sc.n_spans;  // ps^2
    const double dt_ps = 1e12 / res.wave.sample_rate_hz;
    const double bw_rad_ps = 2.0 * 3.14159265358979323846 * sc.symbol_rate_baud * (1.0 + sc.roll_off) * 1e-12;
    const std::size_t guard = std::size_t(beta2_tot * bw_rad_ps / dt_ps) + 1;
    std::size_t n_grid = next_pow2(res.unpadded_length + guard);
    res.wave.h.resize(n_grid, cplx(0.0, 0.0));
    res.wave.v.resize(n_grid, cplx(0.0, 0.0));

    if (sc.channel_bw_hz) {
        // ideal brick-wall channel filter (WDM-style band limit)
        const double half_bw = 0.5 * *sc.channel_bw_hz;
        const double df = res.wave.sample_rate_hz / double(n_grid);
        for (auto* pol : {&res.wave.h, &res.wave.v}) {
            fft.forward(*pol);
            for (std::size_t k = 0; k < n_grid; ++k) {
                const double fk = (k < n_grid / 2 ? double(k) : double(k) - double(n_grid)) * df;
                if (std::abs(fk) > half_bw) (*pol)[k] = cplx(0.0, 0.0);
            }
            fft.inverse(*pol);
        }
    }

    const double span_loss_db = sc.fiber.alpha_db_per_km * sc.fiber.length_km;
    for (int span = 0; span < sc.n_spans; ++span) {
        ssfm_propagate(res.wave, sc.fiber, sc.wavelength_nm, sc.sim.step_km, fft);
        edfa_amplify(res.wave, span_loss_db, sc.amp_noise_figure_db, sc.wavelength_nm, rng);
    }

    if (sc.transceiver_snr_db) {
        const double snr_lin = std::pow(10.0, *sc.transceiver_snr_db / 10.0);
        for (auto* pol : {&res.wave.h, &res.wave.v}) {
            double p_pol = 0.0;
            // signal power measured on the occupied (unpadded) region
            for (std::size_t i = 0; i < res.unpadded_length; ++i) p_pol += std::norm((*pol)[i]);
            p_pol /= double(res.unpadded_length);
            // white over the sim bandwidth; matched filtering narrows the
            // noise bandwidth by sps, landing the symbols at snr_lin
            const double var = double(sps) * p_pol / snr_lin;
            const double sigma = std::sqrt(var / 2.0);
            for (cplx& x : *pol) x += cplx(sigma * rng.normal(), sigma * rng.normal());
        }
    }
    return res;
}

}  // namespace genlab::channel
