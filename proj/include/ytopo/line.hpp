#pragma once

#include "ytopo/cable.hpp"

namespace ytopo {

/// Admittance of the device attached at a node, on its own.
struct LoadAdmittance {
  Complex y;  // Re(y) >= 0 for a passive load
};

/// rho = (yc - y_load) / (yc + y_load).
Complex reflection_coefficient(Complex y_load, Complex yc);

/// Carries a far-end admittance back through a line of length d:
///   Y(d) = Yc * (1 - rho_L e^{-2 Gamma d}) / (1 + rho_L e^{-2 Gamma d}).
Complex carry_back(Complex y_far, const SecondaryParams& sec, double length_m);

/// Inverts the magnitude decay |rho(d)| = |rho_L| e^{-2 alpha d} for the line
/// length, given the admittance measured at the near end and the known load.
/// Requires a lossy line (alpha > 0) and an unmatched load (rho_L != 0);
/// phase information is deliberately discarded.
double single_line_distance(Complex y_meas, Complex y_load, const SecondaryParams& sec);

}  // namespace ytopo
