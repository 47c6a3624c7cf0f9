#ifndef GENLAB_CHANNEL_SCENARIO_HPP
#define GENLAB_CHANNEL_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "genlab/signal/constellation.hpp"

namespace genlab::channel {

struct FiberParams {
    double alpha_db_per_km = 0.2;     // attenuation
    double dispersion_ps_nm_km = 17;  // D
    double gamma_per_w_km = 1.3;      // Kerr coefficient
    double length_km = 50;            // span length

    void validate() const;
};

enum class FiberType : std::uint8_t { SSMF, TWC };

const char* to_string(FiberType t);
FiberType fiber_type_from_string(const std::string& s);

// Numerical knobs of the simulator itself; recorded alongside the scenario
// so datasets are reproducible from their sidecar alone.
struct SimOptions {
    int sps = 8;            // samples per symbol during propagation
    double step_km = 0.1;   // split-step size
    int rrc_span = 96;      // shaping filter span in symbols; roll-off 0.1
                            // has slow 1/t^2 tails and needs this much for
                            // sub-1e-3 residual ISI
};

struct ScenarioConfig {
    signal::Modulation modulation = signal::Modulation::QAM16;
    double symbol_rate_baud = 34.4e9;
    double launch_power_dbm = 0.0;  // per channel
    int n_spans = 1;
    FiberParams fiber;
    FiberType fiber_type = FiberType::SSMF;
    double roll_off = 0.1;
    double wavelength_nm = 1550.0;
    std::optional<double> amp_noise_figure_db = 4.5;  // nullopt = noiseless amplifier
    std::optional<double> transceiver_snr_db;         // nullopt = no transceiver noise
    // ideal brick-wall low-pass applied after shaping (total width, Hz);
    // off by default: the RRC at roll-off 0.1 is already near-band-limited
    std::optional<double> channel_bw_hz;
    std::uint64_t seed = 1;
    SimOptions sim;

    void validate() const;
    std::string to_json() const;
    static ScenarioConfig from_json(const std::string& json_text);
};

// Randomization window for (alpha, D, gamma).
struct ParameterRanges {
    double alpha_min = 0, alpha_max = 0;
    double dispersion_min = 0, dispersion_max = 0;
    double gamma_min = 0, gamma_max = 0;

    void validate() const;
    std::string to_json() const;
    static ParameterRanges from_json(const std::string& json_text);
};

// Fiber-parameter randomization windows per fiber type.
ParameterRanges preset_ranges(FiberType t);

// Link presets. A: 64-QAM 28 GBd 7 dBm 4x100 km SSMF; B: 16-QAM 34.4 GBd
// 9 dBm 5x50 km SSMF; C: 16-QAM 34.4 GBd 3 dBm 9x50 km TWC. "desk" is a
// reduced-size variant of B for fast runs; "gap-desk" is the desk target
// domain: fiber parameters outside the randomization window plus
// transceiver noise.
ScenarioConfig preset_scenario(const std::string& name);

}  // namespace genlab::channel

#endif
