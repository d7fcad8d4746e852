#include "ytopo/pair_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ytopo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNonPhysicalMagTol = 1e-6;  // |x| > 1 + tol cannot be a forward decay
constexpr double kAmbiguityTolM = 1e-12;     // two qualifying roots closer than this: ambiguous

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// d = -Ln(x) / (2 Gamma) with branch bookkeeping. Physical roots use
/// arg in (-2 pi, 0]; magnitude-growing roots pick the branch with Re(d) < 0.
Complex root_to_distance(Complex x, const SecondaryParams& sec) {
  if (!finite(x)) return {-kInf, 0.0};  // phantom second root of the linear case
  const double mag = std::abs(x);
  if (mag == 0.0) return {kInf, 0.0};

  const double log_mag = std::log(mag);
  double theta = std::arg(x);
  if (mag > 1.0 + kNonPhysicalMagTol) {
    if (sec.alpha() * log_mag + sec.beta() * theta <= 0.0) theta += 2.0 * M_PI;
  } else if (theta > 0.0) {
    theta -= 2.0 * M_PI;
  }
  return -Complex{log_mag, theta} / (2.0 * sec.gamma);
}

}  // namespace

QuadraticCoefficients quadratic_coefficients(Complex y1, Complex y2, Complex y_l1, Complex yc) {
  const Complex branch_adm = y1 - y_l1;  // leaf's line-input admittance
  if (std::abs(yc + branch_adm) == 0.0 || std::abs(yc + y_l1) == 0.0) {
    raise(ErrorCode::DegeneratePair, "singular reflection denominator");
  }
  const Complex r1 = (yc - branch_adm) / (yc + branch_adm);
  const Complex rho_l1 = (yc - y_l1) / (yc + y_l1);

  QuadraticCoefficients q;
  q.a2 = -rho_l1 * y2;
  q.a1 = (2.0 * yc - y2) - r1 * rho_l1 * (2.0 * yc + y2);
  q.a0 = -r1 * y2;
  return q;
}

DistancePair solve_pair_distance(Complex y1, Complex y2, Complex y_l1,
                                 const SecondaryParams& sec) {
  const QuadraticCoefficients q = quadratic_coefficients(y1, y2, y_l1, sec.yc);
  const double scale = std::max({std::abs(q.a2), std::abs(q.a1), std::abs(q.a0)});
  if (scale == 0.0) raise(ErrorCode::DegeneratePair, "all quadratic coefficients vanish");
  const Complex a2 = q.a2 / scale;
  const Complex a1 = q.a1 / scale;
  const Complex a0 = q.a0 / scale;

  DistancePair pair;
  if (a2 == Complex{0.0, 0.0}) {
    // matched leaf: rho_L1 = 0 kills the x^2 term
    if (a1 == Complex{0.0, 0.0}) {
      raise(ErrorCode::DegeneratePair, "matched leaf with vanishing linear term");
    }
    pair.linear = true;
    pair.x1 = -a0 / a1;
    pair.x2 = {kInf, kInf};
  } else {
    const Complex disc = a1 * a1 - 4.0 * a2 * a0;
    Complex sq = std::sqrt(disc);
    if ((std::conj(a1) * sq).real() < 0.0) sq = -sq;  // align with a1
    const Complex big = -0.5 * (a1 + sq);             // larger-magnitude numerator
    if (big == Complex{0.0, 0.0}) {
      pair.x1 = pair.x2 = Complex{0.0, 0.0};  // a1 = a0 = 0: double root at the origin
    } else {
      pair.x1 = big / a2;
      pair.x2 = a0 / big;
    }
    pair.near_double_root =
        std::abs(disc) < 1e-12 * (std::norm(a1) + 4.0 * std::abs(a2) * std::abs(a0));
  }

  pair.d1 = root_to_distance(pair.x1, sec);
  pair.d2 = root_to_distance(pair.x2, sec);
  return pair;
}

AdjacencyVerdict adjacency_test(const DistancePair& pair, double threshold_m,
                                double wavelength_m) {
  if (!(threshold_m > 0.0)) raise(ErrorCode::InvalidParameter, "threshold must be > 0");
  if (!(wavelength_m > 0.0)) raise(ErrorCode::InvalidParameter, "wavelength must be > 0");
  const double quarter = wavelength_m / 4.0;

  const auto qualifies = [&](Complex d) {
    return finite(d) && d.real() > 0.0 && d.real() <= quarter &&
           std::abs(d.imag()) < threshold_m;
  };
  const bool q1 = qualifies(pair.d1);
  const bool q2 = qualifies(pair.d2);

  AdjacencyVerdict verdict;
  if (q1 && q2) {
    if (std::abs(std::abs(pair.d1.imag()) - std::abs(pair.d2.imag())) < kAmbiguityTolM) {
      raise(ErrorCode::AmbiguousPair, "both roots qualify with equal imaginary residuals");
    }
    const Complex& best = std::abs(pair.d1.imag()) <= std::abs(pair.d2.imag()) ? pair.d1 : pair.d2;
    verdict.adjacent = true;
    verdict.d = best;
    verdict.d_real = best.real();
    verdict.residual = std::abs(best.imag());
    return verdict;
  }
  if (q1 || q2) {
    const Complex& best = q1 ? pair.d1 : pair.d2;
    verdict.adjacent = true;
    verdict.d = best;
    verdict.d_real = best.real();
    verdict.residual = std::abs(best.imag());
    return verdict;
  }

  // Not adjacent; report the closest-to-real root for diagnostics.
  verdict.adjacent = false;
  const bool f1 = finite(pair.d1);
  const bool f2 = finite(pair.d2);
  if (f1 && (!f2 || std::abs(pair.d1.imag()) <= std::abs(pair.d2.imag()))) {
    verdict.d = pair.d1;
  } else if (f2) {
    verdict.d = pair.d2;
  } else {
    verdict.d = {kInf, kInf};
  }
  verdict.d_real = verdict.d.real();
  verdict.residual = std::abs(verdict.d.imag());
  return verdict;
}

double pair_system_residual(Complex y1, Complex y2, Complex y_l1, const SecondaryParams& sec,
                            Complex x) {
  const Complex yc = sec.yc;
  const Complex rho_l1 = (yc - y_l1) / (yc + y_l1);

  // second line of the coupled system, written exactly as measured at node 2
  const Complex cb1 = yc * (1.0 - rho_l1 * x) / (1.0 + rho_l1 * x);
  const Complex rho_l2 = (yc - y2 + cb1) / (yc + y2 - cb1);

  // first line: what node 1 would measure if x were the true line factor
  const Complex y1_pred = y_l1 + yc * (1.0 - rho_l2 * x) / (1.0 + rho_l2 * x);

  const double denom = std::max(std::abs(y1), std::numeric_limits<double>::min());
  return std::abs(y1_pred - y1) / denom;
}

}  // namespace ytopo
