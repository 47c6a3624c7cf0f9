#include "genlab/channel/scenario.hpp"

#include <json.hpp>

#include <stdexcept>

namespace genlab::channel {

using nlohmann::json;

void FiberParams::validate() const {
    if (alpha_db_per_km < 0) throw std::invalid_argument("fiber alpha must be >= 0");
    if (length_km <= 0) throw std::invalid_argument("fiber length must be > 0");
    if (gamma_per_w_km < 0) throw std::invalid_argument("fiber gamma must be >= 0");
}

const char* to_string(FiberType t) { return t == FiberType::SSMF ? "SSMF" : "TWC"; }

FiberType fiber_type_from_string(const std::string& s) {
    if (s == "SSMF") return FiberType::SSMF;
    if (s == "TWC") return FiberType::TWC;
    throw std::invalid_argument("unknown fiber type: " + s);
}

void ScenarioConfig::validate() const {
    fiber.validate();
    if (n_spans < 1) throw std::invalid_argument("n_spans must be >= 1");
    if (symbol_rate_baud <= 0) throw std::invalid_argument("symbol_rate must be > 0");
    if (wavelength_nm < 1260.0 || wavelength_nm > 1675.0)
        throw std::invalid_argument("wavelength_nm out of range [1260, 1675]");
    if (!(roll_off > 0.0 && roll_off <= 1.0)) throw std::invalid_argument("roll_off must be in (0, 1]");
    if (amp_noise_figure_db && *amp_noise_figure_db < 0.0)
        throw std::invalid_argument("amplifier noise figure must be >= 0 dB");
    if (channel_bw_hz && *channel_bw_hz <= 0.0)
        throw std::invalid_argument("channel bandwidth must be > 0");
    if (sim.sps < 4) throw std::invalid_argument("propagation sps must be >= 4");
    if (sim.step_km <= 0) throw std::invalid_argument("step_km must be > 0");
}

namespace {

json scenario_to_json_obj(const ScenarioConfig& s) {
    json j;
    j["modulation"] = signal::to_string(s.modulation);
    j["symbol_rate_baud"] = s.symbol_rate_baud;
    j["launch_power_dbm"] = s.launch_power_dbm;
    j["n_spans"] = s.n_spans;
    j["fiber"] = {{"alpha_db_per_km", s.fiber.alpha_db_per_km},
                  {"dispersion_ps_nm_km", s.fiber.dispersion_ps_nm_km},
                  {"gamma_per_w_km", s.fiber.gamma_per_w_km},
                  {"length_km", s.fiber.length_km}};
    j["fiber_type"] = to_string(s.fiber_type);
    j["roll_off"] = s.roll_off;
    j["wavelength_nm"] = s.wavelength_nm;
    j["amp_noise_figure_db"] = s.amp_noise_figure_db ? json(*s.amp_noise_figure_db) : json(nullptr);
    j["transceiver_snr_db"] = s.transceiver_snr_db ? json(*s.transceiver_snr_db) : json(nullptr);
    j["channel_bw_hz"] = s.channel_bw_hz ? json(*s.channel_bw_hz) : json(nullptr);
    j["seed"] = s.seed;
    j["sim"] = {{"sps", s.sim.sps}, {"step_km", s.sim.step_km}, {"rrc_span", s.sim.rrc_span}};
    return j;
}

ScenarioConfig scenario_from_json_obj(const json& j) {
    ScenarioConfig s;
    s.modulation = signal::modulation_from_string(j.at("modulation").get<std::string>());
    s.symbol_rate_baud = j.at("symbol_rate_baud").get<double>();
    s.launch_power_dbm = j.at("launch_power_dbm").get<double>();
    s.n_spans = j.at("n_spans").get<int>();
    const json& f = j.at("fiber");
    s.fiber.alpha_db_per_km = f.at("alpha_db_per_km").get<double>();
    s.fiber.dispersion_ps_nm_km = f.at("dispersion_ps_nm_km").get<double>();
    s.fiber.gamma_per_w_km = f.at("gamma_per_w_km").get<double>();
    s.fiber.length_km = f.at("length_km").get<double>();
    s.fiber_type = fiber_type_from_string(j.at("fiber_type").get<std::string>());
    s.roll_off = j.at("roll_off").get<double>();
    s.wavelength_nm = j.at("wavelength_nm").get<double>();
    if (j.contains("amp_noise_figure_db") && !j.at("amp_noise_figure_db").is_null())
        s.amp_noise_figure_db = j.at("amp_noise_figure_db").get<double>();
    else
        s.amp_noise_figure_db.reset();
    if (j.contains("transceiver_snr_db") && !j.at("transceiver_snr_db").is_null())
        s.transceiver_snr_db = j.at("transceiver_snr_db").get<double>();
    if (j.contains("channel_bw_hz") && !j.at("channel_bw_hz").is_null())
        s.channel_bw_hz = j.at("channel_bw_hz").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sim")) {
        const json& m = j.at("sim");
        s.sim.sps = m.value("sps", s.sim.sps);
        s.sim.step_km = m.value("step_km", s.sim.step_km);
        s.sim.rrc_span = m.value("rrc_span", s.sim.rrc_span);
    }
    s.validate();
    return s;
}

}  // namespace

std::string ScenarioConfig::to_json() const { return scenario_to_json_obj(*this).dump(2); }

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    return scenario_from_json_obj(json::parse(text));
}

void ParameterRanges::validate() const {
    if (alpha_min > alpha_max || dispersion_min > dispersion_max || gamma_min > gamma_max)
        throw std::invalid_argument("parameter range min > max");
}

std::string ParameterRanges::to_json() const {
    json j;
    j["alpha_db_per_km"] = {alpha_min, alpha_max};
    j["dispersion_ps_nm_km"] = {dispersion_min, dispersion_max};
    j["gamma_per_w_km"] = {gamma_min, gamma_max};
    return j.dump(2);
}

ParameterRanges ParameterRanges::from_json(const std::string& text) {
    const json j = json::parse(text);
    ParameterRanges r;
    r.alpha_min = j.at("alpha_db_per_km").at(0).get<double>();
    r.alpha_max = j.at("alpha_db_per_km").at(1).get<double>();
    r.dispersion_min = j.at("dispersion_ps_nm_km").at(0).get<double>();
    r.dispersion_max = j.at("dispersion_ps_nm_km").at(1).get<double>();
    r.gamma_min = j.at("gamma_per_w_km").at(0).get<double>();
    r.gamma_max = j.at("gamma_per_w_km").at(1).get<double>();
    r.validate();
    return r;
}

ParameterRanges preset_ranges(FiberType t) {
    ParameterRanges r;
    if (t == FiberType::SSMF) {
        r.alpha_min = 0.19;
        r.alpha_max = 0.22;
        r.dispersion_min = 16.5;
        r.dispersion_max = 17.5;
        r.gamma_min = 1.1;
        r.gamma_max = 1.5;
    } else {
        r.alpha_min = 0.2;
        r.alpha_max = 0.25;
        r.dispersion_min = 2.5;
        r.dispersion_max = 3.5;
        r.gamma_min = 2.0;
        r.gamma_max = 3.0;
    }
    return r;
}

ScenarioConfig preset_scenario(const std::string& name) {
    ScenarioConfig s;
    if (name == "A") {
        s.modulation = signal::Modulation::QAM64;
        s.symbol_rate_baud = 28e9;
        s.launch_power_dbm = 7.0;
        s.n_spans = 4;
        s.fiber = {0.205, 17.0, 1.3, 100.0};
        s.fiber_type = FiberType::SSMF;
    } else if (name == "B") {
        s.modulation = signal::Modulation::QAM16;
        s.symbol_rate_baud = 34.4e9;
        s.launch_power_dbm = 9.0;
        s.n_spans = 5;
        s.fiber = {0.205, 17.0, 1.3, 50.0};
        s.fiber_type = FiberType::SSMF;
    } else if (name == "C") {
        s.modulation = signal::Modulation::QAM16;
        s.symbol_rate_baud = 34.4e9;
        s.launch_power_dbm = 3.0;
        s.n_spans = 9;
        s.fiber = {0.225, 3.0, 2.5, 50.0};
        s.fiber_type = FiberType::TWC;
    } else if (name == "desk") {
        // reduced-size B: same modulation/rate, fewer spans, coarser step
        s.modulation = signal::Modulation::QAM16;
        s.symbol_rate_baud = 34.4e9;
        s.launch_power_dbm = 9.0;
        s.n_spans = 2;
        s.fiber = {0.205, 17.0, 1.3, 50.0};
        s.fiber_type = FiberType::SSMF;
        s.sim.step_km = 0.25;
    } else if (name == "gap-desk") {
        // target-domain counterpart of "desk": fiber parameters pushed
        // outside the SSMF randomization window plus transceiver noise.
        // 11 dBm drives the link well into the nonlinear regime so the
        // equalizer has structure to learn.
        s = preset_scenario("desk");
        s.launch_power_dbm = 11.0;
        s.fiber.alpha_db_per_km = 0.225;
        s.fiber.dispersion_ps_nm_km = 16.4;
        s.fiber.gamma_per_w_km = 1.55;
        s.transceiver_snr_db = 26.0;
        s.seed = 77;
    } else {
        throw std::invalid_argument("unknown preset: " + name + " (use A, B, C, desk, gap-desk)");
    }
    return s;
}

}  // namespace genlab::channel
