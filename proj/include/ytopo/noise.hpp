#pragma once

#include <string>
#include <vector>

#include "ytopo/cable.hpp"
#include "ytopo/rng.hpp"

namespace ytopo {

/// Thevenin equivalent of an admittance meter.
struct MeterParams {
  Complex v_source;    // V_S, generated voltage phasor
  Complex y_source;    // Y_S, output admittance
  double sigma2_n = 0.0;  // variance of the voltage noise V_mN, V^2

  void validate() const;
};

struct NoisySample {
  Complex y_measured;
  Complex y_true;
  double anr_db = 0.0;
};

/// Admittance-to-noise ratio in dB: 10 log10(|V_S - V_m0|^2 / sigma2_n).
/// sigma2_n = 0 yields +infinity.
double anr(Complex v_source, Complex v_m0, double sigma2_n);

/// Simulates one voltage-divider measurement of y_true with the exact
/// (non-linearized) inversion Y_m = Y_S (V_S - V_m) / V_m, V_m = V_m0 + V_mN,
/// V_mN a circular complex Gaussian of variance sigma2_n.
NoisySample measure_once(const MeterParams& meter, Complex y_true, Rng& rng);

/// Linearized admittance noise: adds a circular complex Gaussian of variance
/// |y_true|^2 10^(-anr_db/10). anr_db = +inf returns y_true unchanged.
Complex perturb_admittance(Complex y_true, double anr_db, Rng& rng);

/// Meter tuned for a target SNR at a node with admittance y_true, in the
/// |Y_S| << |Y_m0| regime (y_source = ratio * |y_true|, real).
MeterParams meter_for_snr(Complex y_true, double snr_db, double y_source_ratio = 0.01);

/// SNR at the node for the meter's noiseless divider voltage, dB.
double meter_snr_db(const MeterParams& meter, Complex y_true);

/// One row of the band table: typical ANR ranges per PLC band.
struct AnrBand {
  std::string name;
  double freq_min_hz = 0.0;
  double freq_max_hz = 0.0;
  double anr_db_min = 0.0;
  double anr_db_max = 0.0;  // +inf for open-ended
  double max_cable_length_m = 0.0;  // config validation hint only
};

/// Built-in bands (cenelec, fcc, broadband) plus the cenelec-default
/// scenario mapping SNR 55 dB to ANR 99 dB.
const std::vector<AnrBand>& anr_bands();
const AnrBand& find_anr_band(const std::string& name, const std::vector<AnrBand>& extra = {});
std::vector<AnrBand> parse_anr_bands_json(const std::string& text);
std::string anr_bands_to_json(const std::vector<AnrBand>& bands);

constexpr double kCenelecDefaultSnrDb = 55.0;
constexpr double kCenelecDefaultAnrDb = 99.0;

}  // namespace ytopo
