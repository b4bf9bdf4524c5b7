#pragma once

// Scalar types shared by the exact solvers: 80-bit floating point or GMP
// rationals. Doubles from configs enter exact code through nearest_rational.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <cstdint>
#include <type_traits>

#include <Eigen/Core>

namespace sdl {

using Rational = boost::multiprecision::mpq_rational;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Best rational approximation of x with denominator at most max_den
/// (first continued-fraction convergent within 1e-14 relative error).
Rational nearest_rational(double x, std::int64_t max_den = 1000000000);

template <class Scalar>
Scalar from_double(double x) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return nearest_rational(x);
  else
    return static_cast<Scalar>(x);
}

template <class Scalar>
double to_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return x.template convert_to<double>();
  else
    return static_cast<double>(x);
}

template <class Scalar>
long double to_long_double(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Rational>)
    return x.template convert_to<long double>();
  else
    return static_cast<long double>(x);
}

template <class Scalar>
Scalar ipow(Scalar base, unsigned e) {
  Scalar r(1);
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

/// Natural log for either scalar; rationals are logged via numerator and
/// denominator separately so tiny values do not underflow.
template <class Scalar>
long double log_of(const Scalar& x) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    using boost::multiprecision::mpz_int;
    auto lg = [](const mpz_int& z) {
      long exp = 0;
      long double m = mpz_get_d_2exp(&exp, z.backend().data());
      return std::log(std::fabs(m)) + static_cast<long double>(exp) * std::log(2.0L);
    };
    return lg(numerator(x)) - lg(denominator(x));
  } else {
    return std::log(static_cast<long double>(x));
  }
}

}  // namespace sdl
