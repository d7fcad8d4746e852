#pragma once

#include "ytopo/cable.hpp"

namespace ytopo {

/// Coefficients of a2 x^2 + a1 x + a0 = 0 in x = e^{-2 Gamma d}, the single
/// complex equation equivalent to the coupled two-node admittance system.
struct QuadraticCoefficients {
  Complex a2;
  Complex a1;
  Complex a0;
};

/// Both candidate distances for one (leaf, neighbor) admittance pair.
/// Roots with x = 0 or |x| > 1 + 1e-6 map to non-physical distances
/// (Re(d) < 0 or infinite); they are reported, never dropped.
struct DistancePair {
  Complex d1;
  Complex d2;
  Complex x1;
  Complex x2;
  bool linear = false;            // a2 = 0: matched-leaf degenerate, single root
  bool near_double_root = false;  // discriminant numerically zero
};

struct AdjacencyVerdict {
  bool adjacent = false;
  double d_real = 0.0;    // accepted branch length, valid iff adjacent
  double residual = 0.0;  // |Im(d)| of the accepted (or best) root, m
  Complex d;              // the root the verdict is based on
};

/// Builds the quadratic from the measured network admittances y1 (candidate
/// leaf), y2 (candidate neighbor), the leaf load y_l1 and the line's yc:
/// with A = y1 - y_l1, R1 = (yc - A)/(yc + A), r = (yc - y_l1)/(yc + y_l1),
///   a2 = -r y2,  a1 = (2 yc - y2) - R1 r (2 yc + y2),  a0 = -R1 y2.
QuadraticCoefficients quadratic_coefficients(Complex y1, Complex y2, Complex y_l1, Complex yc);

/// Solves the quadratic (numerically stable form) and maps each root to a
/// complex distance d = -Ln(x) / (2 Gamma), with the log branch chosen in
/// (-2 pi, 0] so d is continuous across the negative real x axis for
/// physical lengths below lambda/2.
DistancePair solve_pair_distance(Complex y1, Complex y2, Complex y_l1,
                                 const SecondaryParams& sec);

/// Leaf-adjacency acceptance: adjacent iff some root has |Im(d)| < threshold
/// and 0 < Re(d) <= wavelength/4. Among qualifying roots the one with the
/// smallest |Im(d)| wins; two equally real qualifying roots are an error.
AdjacencyVerdict adjacency_test(const DistancePair& pair, double threshold_m,
                                double wavelength_m);

/// Relative residual of the original coupled system (not the cleared
/// quadratic) at x: substitutes x into both lines and compares against y1.
/// Guards spurious roots introduced by clearing denominators.
double pair_system_residual(Complex y1, Complex y2, Complex y_l1, const SecondaryParams& sec,
                            Complex x);

}  // namespace ytopo
