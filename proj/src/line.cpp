#include "ytopo/line.hpp"

#include <cmath>

namespace ytopo {

namespace {
constexpr double kResonanceTol = 1e-12;   // |1 + rho x| below this is treated as resonant
constexpr double kMatchedTol = 1e-15;     // |rho_L| below this is a matched load
}  // namespace

Complex reflection_coefficient(Complex y_load, Complex yc) {
  const Complex den = yc + y_load;
  if (std::abs(den) == 0.0) raise(ErrorCode::SingularLoad, "yc + y_load = 0");
  return (yc - y_load) / den;
}

Complex carry_back(Complex y_far, const SecondaryParams& sec, double length_m) {
  if (!(length_m >= 0.0) || !std::isfinite(length_m)) {
    raise(ErrorCode::InvalidParameter, "line length must be finite and >= 0");
  }
  const Complex rho = reflection_coefficient(y_far, sec.yc);
  if (rho == Complex{0.0, 0.0}) return sec.yc;  // matched load is a fixed point
  const Complex rx = rho * std::exp(-2.0 * sec.gamma * length_m);
  const Complex den = 1.0 + rx;
  if (std::abs(den) < kResonanceTol) {
    raise(ErrorCode::Resonance, "1 + rho e^{-2 Gamma d} vanished");
  }
  return sec.yc * (1.0 - rx) / den;
}

double single_line_distance(Complex y_meas, Complex y_load, const SecondaryParams& sec) {
  const double alpha = sec.alpha();
  if (alpha <= 0.0) raise(ErrorCode::IdealLine, "alpha = 0: periodic line cannot be inverted");

  const double mag_load = std::abs(reflection_coefficient(y_load, sec.yc));
  if (mag_load < kMatchedTol) {
    raise(ErrorCode::MatchedLoad, "rho_L = 0: admittance is constant along the line");
  }
  const double mag_meas = std::abs(reflection_coefficient(y_meas, sec.yc));

  const double d = (std::log(mag_load) - std::log(mag_meas)) / (2.0 * alpha);
  if (d < 0.0) {
    raise(ErrorCode::InconsistentMeasurement,
          "|rho(meas)| exceeds |rho_L|; no non-negative length fits");
  }
  return d;
}

}  // namespace ytopo
