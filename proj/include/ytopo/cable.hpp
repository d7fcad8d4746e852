#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "ytopo/error.hpp"

namespace ytopo {

using Complex = std::complex<double>;

/// Per-unit-length primary line parameters (uniform RLGC model).
struct CableParams {
  double resistance_ohm_per_m = 0.0;   // R
  double inductance_h_per_m = 0.0;     // L
  double conductance_s_per_m = 0.0;    // G
  double capacitance_f_per_m = 0.0;    // C

  /// R >= 0, L > 0, G >= 0, C > 0, all finite.
  void validate() const;
};

/// Secondary parameters of a line at one frequency.
struct SecondaryParams {
  Complex gamma;            // propagation constant alpha + j*beta, 1/m
  Complex yc;               // characteristic admittance, S
  double freq_hz = 0.0;
  double wavelength_m = 0.0;  // 2*pi / beta

  double alpha() const { return gamma.real(); }
  double beta() const { return gamma.imag(); }
};

/// Gamma = sqrt((R + jwL)(G + jwC)), Yc = sqrt((G + jwC)/(R + jwL)).
/// Square-root branches are fixed so that Re(Gamma) >= 0 and Re(Yc) > 0.
SecondaryParams secondary_params(const CableParams& cable, double freq_hz);

struct CablePreset {
  std::string name;
  CableParams params;
};

/// Built-in presets: lv-underground (v ~= 2e8 m/s), mv-overhead, indoor.
const std::vector<CablePreset>& cable_presets();

/// Looks up a preset by name in `extra` first, then the built-ins.
const CableParams& find_cable(const std::string& name,
                              const std::vector<CablePreset>& extra = {});

/// Parses a JSON array of {name, R, L, G, C} documents (SI units).
std::vector<CablePreset> parse_cable_presets_json(const std::string& text);
std::vector<CablePreset> load_cable_presets_file(const std::string& path);
std::string cable_presets_to_json(const std::vector<CablePreset>& presets);

}  // namespace ytopo
