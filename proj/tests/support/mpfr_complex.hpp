#pragma once

#include <mpfr.h>

#include <complex>

// 256-bit (~77 decimal digit) complex arithmetic, just enough to evaluate
// the secondary-parameter square roots independently of double precision.
namespace oracle {

class BigComplex {
 public:
  static constexpr mpfr_prec_t kPrec = 256;

  BigComplex() {
    init();
    mpfr_set_zero(re_, 1);
    mpfr_set_zero(im_, 1);
  }
  BigComplex(double re, double im) {
    init();
    mpfr_set_d(re_, re, MPFR_RNDN);
    mpfr_set_d(im_, im, MPFR_RNDN);
  }
  BigComplex(const BigComplex& other) {
    init();
    mpfr_set(re_, other.re_, MPFR_RNDN);
    mpfr_set(im_, other.im_, MPFR_RNDN);
  }
  BigComplex& operator=(const BigComplex& other) {
    mpfr_set(re_, other.re_, MPFR_RNDN);
    mpfr_set(im_, other.im_, MPFR_RNDN);
    return *this;
  }
  ~BigComplex() {
    mpfr_clear(re_);
    mpfr_clear(im_);
  }

  friend BigComplex operator*(const BigComplex& x, const BigComplex& y) {
    BigComplex out;
    mpfr_t t1, t2;
    mpfr_inits2(kPrec, t1, t2, static_cast<mpfr_ptr>(nullptr));
    // re = xr*yr - xi*yi
    mpfr_mul(t1, x.re_, y.re_, MPFR_RNDN);
    mpfr_mul(t2, x.im_, y.im_, MPFR_RNDN);
    mpfr_sub(out.re_, t1, t2, MPFR_RNDN);
    // im = xr*yi + xi*yr
    mpfr_mul(t1, x.re_, y.im_, MPFR_RNDN);
    mpfr_mul(t2, x.im_, y.re_, MPFR_RNDN);
    mpfr_add(out.im_, t1, t2, MPFR_RNDN);
    mpfr_clears(t1, t2, static_cast<mpfr_ptr>(nullptr));
    return out;
  }

  friend BigComplex operator/(const BigComplex& x, const BigComplex& y) {
    BigComplex out;
    mpfr_t t1, t2, den;
    mpfr_inits2(kPrec, t1, t2, den, static_cast<mpfr_ptr>(nullptr));
    // den = yr^2 + yi^2
    mpfr_mul(t1, y.re_, y.re_, MPFR_RNDN);
    mpfr_mul(t2, y.im_, y.im_, MPFR_RNDN);
    mpfr_add(den, t1, t2, MPFR_RNDN);
    // re = (xr*yr + xi*yi) / den
    mpfr_mul(t1, x.re_, y.re_, MPFR_RNDN);
    mpfr_mul(t2, x.im_, y.im_, MPFR_RNDN);
    mpfr_add(t1, t1, t2, MPFR_RNDN);
    mpfr_div(out.re_, t1, den, MPFR_RNDN);
    // im = (xi*yr - xr*yi) / den
    mpfr_mul(t1, x.im_, y.re_, MPFR_RNDN);
    mpfr_mul(t2, x.re_, y.im_, MPFR_RNDN);
    mpfr_sub(t1, t1, t2, MPFR_RNDN);
    mpfr_div(out.im_, t1, den, MPFR_RNDN);
    mpfr_clears(t1, t2, den, static_cast<mpfr_ptr>(nullptr));
    return out;
  }

  /// Principal square root: re = sqrt((|z|+zr)/2), im = sgn(zi) sqrt((|z|-zr)/2).
  BigComplex sqrt() const {
    BigComplex out;
    mpfr_t mag, t;
    mpfr_inits2(kPrec, mag, t, static_cast<mpfr_ptr>(nullptr));
    mpfr_hypot(mag, re_, im_, MPFR_RNDN);

    mpfr_add(t, mag, re_, MPFR_RNDN);
    mpfr_div_ui(t, t, 2, MPFR_RNDN);
    mpfr_sqrt(out.re_, t, MPFR_RNDN);

    mpfr_sub(t, mag, re_, MPFR_RNDN);
    mpfr_div_ui(t, t, 2, MPFR_RNDN);
    mpfr_sqrt(out.im_, t, MPFR_RNDN);
    if (mpfr_sgn(im_) < 0) mpfr_neg(out.im_, out.im_, MPFR_RNDN);

    mpfr_clears(mag, t, static_cast<mpfr_ptr>(nullptr));
    return out;
  }

  std::complex<double> to_double() const {
    return {mpfr_get_d(re_, MPFR_RNDN), mpfr_get_d(im_, MPFR_RNDN)};
  }

  static BigComplex from_mpfr(mpfr_srcptr re, mpfr_srcptr im) {
    BigComplex out;
    mpfr_set(out.re_, re, MPFR_RNDN);
    mpfr_set(out.im_, im, MPFR_RNDN);
    return out;
  }

 private:
  void init() { mpfr_inits2(kPrec, re_, im_, static_cast<mpfr_ptr>(nullptr)); }

  mpfr_t re_;
  mpfr_t im_;
};

/// Gamma and Yc of an RLGC line evaluated at 256-bit precision throughout
/// (including omega = 2 pi f and the omega*L, omega*C products).
inline void secondary_params_bigfloat(double r, double l, double g, double c, double freq_hz,
                                      std::complex<double>* gamma, std::complex<double>* yc) {
  mpfr_t omega, re, im;
  mpfr_inits2(BigComplex::kPrec, omega, re, im, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(omega, MPFR_RNDN);
  mpfr_mul_d(omega, omega, 2.0, MPFR_RNDN);
  mpfr_mul_d(omega, omega, freq_hz, MPFR_RNDN);

  mpfr_set_d(re, r, MPFR_RNDN);
  mpfr_mul_d(im, omega, l, MPFR_RNDN);
  const BigComplex series = BigComplex::from_mpfr(re, im);

  mpfr_set_d(re, g, MPFR_RNDN);
  mpfr_mul_d(im, omega, c, MPFR_RNDN);
  const BigComplex shunt = BigComplex::from_mpfr(re, im);

  mpfr_clears(omega, re, im, static_cast<mpfr_ptr>(nullptr));

  *gamma = (series * shunt).sqrt().to_double();
  *yc = (shunt / series).sqrt().to_double();
}

}  // namespace oracle
