#include "ytopo/noise.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace ytopo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void MeterParams::validate() const {
  if (!(std::abs(v_source) > 0.0)) raise(ErrorCode::InvalidParameter, "|V_S| must be > 0");
  if (!(y_source.real() > 0.0)) raise(ErrorCode::InvalidParameter, "Re(Y_S) must be > 0");
  if (sigma2_n < 0.0 || std::isnan(sigma2_n)) {
    raise(ErrorCode::InvalidParameter, "sigma2_n must be >= 0");
  }
}

double anr(Complex v_source, Complex v_m0, double sigma2_n) {
  if (sigma2_n < 0.0 || std::isnan(sigma2_n)) {
    raise(ErrorCode::InvalidParameter, "sigma2_n must be >= 0");
  }
  if (sigma2_n == 0.0) return kInf;
  const double num = std::norm(v_source - v_m0);
  if (num == 0.0) return -kInf;
  return 10.0 * std::log10(num / sigma2_n);
}

NoisySample measure_once(const MeterParams& meter, Complex y_true, Rng& rng) {
  meter.validate();
  const Complex den = meter.y_source + y_true;
  if (std::abs(den) == 0.0) raise(ErrorCode::SingularLoad, "Y_S + Y_true = 0");
  const Complex v_m0 = meter.v_source * meter.y_source / den;

  NoisySample sample;
  sample.y_true = y_true;
  sample.anr_db = anr(meter.v_source, v_m0, meter.sigma2_n);
  if (meter.sigma2_n == 0.0) {
    sample.y_measured = y_true;  // noiseless divider inversion is the identity
    return sample;
  }

  Complex v_m = v_m0 + rng.circular_gaussian(meter.sigma2_n);
  while (std::abs(v_m) == 0.0) {  // measure-zero event
    v_m = v_m0 + rng.circular_gaussian(meter.sigma2_n);
  }
  sample.y_measured = meter.y_source * (meter.v_source - v_m) / v_m;
  return sample;
}

Complex perturb_admittance(Complex y_true, double anr_db, Rng& rng) {
  if (std::isnan(anr_db)) raise(ErrorCode::InvalidParameter, "anr_db is NaN");
  if (anr_db == kInf) return y_true;
  const double variance = std::norm(y_true) * std::pow(10.0, -anr_db / 10.0);
  return y_true + rng.circular_gaussian(variance);
}

MeterParams meter_for_snr(Complex y_true, double snr_db, double y_source_ratio) {
  if (!(y_source_ratio > 0.0)) raise(ErrorCode::InvalidParameter, "y_source_ratio must be > 0");
  MeterParams meter;
  meter.v_source = Complex{1.0, 0.0};
  meter.y_source = Complex{y_source_ratio * std::abs(y_true), 0.0};
  const Complex v_m0 = meter.v_source * meter.y_source / (meter.y_source + y_true);
  meter.sigma2_n = std::norm(v_m0) * std::pow(10.0, -snr_db / 10.0);
  meter.validate();
  return meter;
}

double meter_snr_db(const MeterParams& meter, Complex y_true) {
  meter.validate();
  const Complex v_m0 = meter.v_source * meter.y_source / (meter.y_source + y_true);
  if (meter.sigma2_n == 0.0) return kInf;
  return 10.0 * std::log10(std::norm(v_m0) / meter.sigma2_n);
}

const std::vector<AnrBand>& anr_bands() {
  static const std::vector<AnrBand> bands = {
      {"cenelec", 3e3, 150e3, 99.0, 135.0, 16600.0},
      {"fcc", 150e3, 500e3, 122.0, 158.0, 330.0},
      {"broadband", 2e6, 30e6, 99.0, kInf, 25.0},
  };
  return bands;
}

const AnrBand& find_anr_band(const std::string& name, const std::vector<AnrBand>& extra) {
  for (const auto& band : extra) {
    if (band.name == name) return band;
  }
  for (const auto& band : anr_bands()) {
    if (band.name == name) return band;
  }
  raise(ErrorCode::ConfigError, "unknown ANR band '" + name + "'");
}

namespace {

double json_number_or_inf(const nlohmann::json& v) {
  if (v.is_null()) return kInf;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    raise(ErrorCode::IoError, "expected number or \"inf\", got '" + s + "'");
  }
  return v.get<double>();
}

}  // namespace

std::vector<AnrBand> parse_anr_bands_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::IoError, std::string("ANR band JSON: ") + e.what());
  }
  if (!doc.is_object()) raise(ErrorCode::IoError, "ANR band JSON must be an object keyed by band");

  std::vector<AnrBand> bands;
  for (const auto& [name, body] : doc.items()) {
    if (name == "cenelec-default") continue;  // fixed scenario, not a band
    AnrBand band;
    band.name = name;
    try {
      band.freq_min_hz = body.at("freq_hz").at(0).get<double>();
      band.freq_max_hz = body.at("freq_hz").at(1).get<double>();
      band.anr_db_min = json_number_or_inf(body.at("anr_db").at(0));
      band.anr_db_max = json_number_or_inf(body.at("anr_db").at(1));
      band.max_cable_length_m = body.at("max_cable_length_m").get<double>();
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::IoError, std::string("ANR band JSON: ") + e.what());
    }
    bands.push_back(std::move(band));
  }
  return bands;
}

std::string anr_bands_to_json(const std::vector<AnrBand>& bands) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& band : bands) {
    nlohmann::json body;
    body["freq_hz"] = {band.freq_min_hz, band.freq_max_hz};
    body["anr_db"] = nlohmann::json::array();
    body["anr_db"].push_back(band.anr_db_min);
    if (std::isinf(band.anr_db_max)) {
      body["anr_db"].push_back(nullptr);
    } else {
      body["anr_db"].push_back(band.anr_db_max);
    }
    body["max_cable_length_m"] = band.max_cable_length_m;
    doc[band.name] = body;
  }
  doc["cenelec-default"] = {{"snr_db", kCenelecDefaultSnrDb}, {"anr_db", kCenelecDefaultAnrDb}};
  return doc.dump(2);
}

}  // namespace ytopo
