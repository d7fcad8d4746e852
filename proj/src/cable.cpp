#include "ytopo/cable.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ytopo {

void CableParams::validate() const {
  const bool finite = std::isfinite(resistance_ohm_per_m) && std::isfinite(inductance_h_per_m) &&
                      std::isfinite(conductance_s_per_m) && std::isfinite(capacitance_f_per_m);
  if (!finite) raise(ErrorCode::InvalidParameter, "cable parameters must be finite");
  if (resistance_ohm_per_m < 0.0) raise(ErrorCode::InvalidParameter, "R must be >= 0");
  if (inductance_h_per_m <= 0.0) raise(ErrorCode::InvalidParameter, "L must be > 0");
  if (conductance_s_per_m < 0.0) raise(ErrorCode::InvalidParameter, "G must be >= 0");
  if (capacitance_f_per_m <= 0.0) raise(ErrorCode::InvalidParameter, "C must be > 0");
}

SecondaryParams secondary_params(const CableParams& cable, double freq_hz) {
  cable.validate();
  if (!(freq_hz > 0.0) || !std::isfinite(freq_hz)) {
    raise(ErrorCode::InvalidParameter, "frequency must be positive and finite");
  }

  const double omega = 2.0 * M_PI * freq_hz;
  const Complex series{cable.resistance_ohm_per_m, omega * cable.inductance_h_per_m};
  const Complex shunt{cable.conductance_s_per_m, omega * cable.capacitance_f_per_m};

  Complex gamma = std::sqrt(series * shunt);
  if (gamma.real() < 0.0) gamma = -gamma;  // decaying wave

  Complex yc = std::sqrt(shunt / series);
  if (yc.real() < 0.0) yc = -yc;

  SecondaryParams sec;
  sec.gamma = gamma;
  sec.yc = yc;
  sec.freq_hz = freq_hz;
  sec.wavelength_m = 2.0 * M_PI / gamma.imag();
  return sec;
}

const std::vector<CablePreset>& cable_presets() {
  // lv-underground is NAYY150SE-like: Z0 ~ 25 ohm, propagation speed ~ 2e8 m/s.
  static const std::vector<CablePreset> presets = {
      {"lv-underground", {1.0e-3, 1.25e-7, 1.0e-8, 2.0e-10}},
      {"mv-overhead", {1.5e-4, 1.28e-6, 1.0e-10, 9.4e-12}},
      {"indoor", {1.4e-2, 5.3e-7, 1.0e-9, 6.5e-11}},
  };
  return presets;
}

const CableParams& find_cable(const std::string& name, const std::vector<CablePreset>& extra) {
  for (const auto& preset : extra) {
    if (preset.name == name) return preset.params;
  }
  for (const auto& preset : cable_presets()) {
    if (preset.name == name) return preset.params;
  }
  raise(ErrorCode::ConfigError, "unknown cable preset '" + name + "'");
}

std::vector<CablePreset> parse_cable_presets_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::IoError, std::string("cable preset JSON: ") + e.what());
  }
  if (!doc.is_array()) raise(ErrorCode::IoError, "cable preset JSON must be an array");

  std::vector<CablePreset> presets;
  for (const auto& item : doc) {
    CablePreset preset;
    try {
      preset.name = item.at("name").get<std::string>();
      preset.params.resistance_ohm_per_m = item.at("R").get<double>();
      preset.params.inductance_h_per_m = item.at("L").get<double>();
      preset.params.conductance_s_per_m = item.at("G").get<double>();
      preset.params.capacitance_f_per_m = item.at("C").get<double>();
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::IoError, std::string("cable preset JSON: ") + e.what());
    }
    preset.params.validate();
    presets.push_back(std::move(preset));
  }
  return presets;
}

std::vector<CablePreset> load_cable_presets_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cable_presets_json(buf.str());
}

std::string cable_presets_to_json(const std::vector<CablePreset>& presets) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& preset : presets) {
    doc.push_back({{"name", preset.name},
                   {"R", preset.params.resistance_ohm_per_m},
                   {"L", preset.params.inductance_h_per_m},
                   {"G", preset.params.conductance_s_per_m},
                   {"C", preset.params.capacitance_f_per_m}});
  }
  return doc.dump(2);
}

}  // namespace ytopo
