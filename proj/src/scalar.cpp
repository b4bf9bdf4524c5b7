#include "sdl/scalar.hpp"

#include <cmath>

namespace sdl {

// First continued-fraction convergent within a few ulps of x, so 0.9 maps to
// 9/10 rather than to its binary expansion.
Rational nearest_rational(double x, std::int64_t max_den) {
  using boost::multiprecision::mpz_int;
  if (!std::isfinite(x)) return Rational(0);
  const bool neg = x < 0;
  const Rational exact(std::fabs(x));
  const Rational tol(std::fabs(x) * 1e-14 + 1e-300);
  mpz_int h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Rational rem = exact;
  for (int iter = 0; iter < 128; ++iter) {
    mpz_int a = numerator(rem) / denominator(rem);
    mpz_int h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    Rational conv(h1, k1);
    if (abs(conv - exact) <= tol) break;
    Rational frac = rem - Rational(a);
    if (frac == 0) break;
    rem = 1 / frac;
  }
  if (k1 == 0) return neg ? Rational(-exact) : exact;
  Rational r(h1, k1);
  return neg ? Rational(-r) : r;
}

}  // namespace sdl
