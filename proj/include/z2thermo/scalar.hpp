#pragma once

// Scalar types and Eigen glue shared by every module.
//
// All dense algebra is templated on the scalar.  Unit-level code runs on
// double or std::complex<double>; the thermodynamic pipeline runs on MPFR
// reals of fixed decimal precision.

#include <array>
#include <complex>
#include <limits>
#include <type_traits>

#include <boost/multiprecision/mpfr.hpp>
#include <Eigen/Core>

namespace z2thermo {

template <unsigned Digits>
using MpReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<Digits>,
                                             boost::multiprecision::et_off>;

/// Decimal precisions tried, in order, by the quench pipeline.
inline constexpr std::array<unsigned, 4> kPrecisionTiers{40, 80, 160, 320};

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class Scalar>
inline constexpr bool is_complex_v = is_complex<Scalar>::value;

/// Decimal digits carried by the real type underlying Scalar.
template <class Scalar>
constexpr int decimal_digits() {
  return std::numeric_limits<RealOf<Scalar>>::digits10;
}

template <class Scalar>
double to_double(const Scalar& x) {
  if constexpr (is_complex_v<Scalar>) {
    return static_cast<double>(x.real());
  } else {
    return static_cast<double>(x);
  }
}

template <class Scalar>
RealOf<Scalar> real_part(const Scalar& x) {
  if constexpr (is_complex_v<Scalar>) {
    return x.real();
  } else {
    return x;
  }
}

template <class Scalar>
RealOf<Scalar> imag_part(const Scalar& x) {
  if constexpr (is_complex_v<Scalar>) {
    return x.imag();
  } else {
    return RealOf<Scalar>(0);
  }
}

/// Smallest positive power of ten that is still resolvable relative to 1
/// after `guard` digits are reserved for accumulated round-off.
template <class Real>
Real resolvable_fraction(int guard) {
  using std::pow;
  return pow(Real(10), Real(guard - decimal_digits<Real>()));
}

}  // namespace z2thermo

namespace Eigen {

template <unsigned Digits>
struct NumTraits<z2thermo::MpReal<Digits>> : GenericNumTraits<z2thermo::MpReal<Digits>> {
  using Real = z2thermo::MpReal<Digits>;
  using NonInteger = Real;
  using Nested = Real;
  using Literal = Real;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 10,
    MulCost = 40
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return std::numeric_limits<Real>::max(); }
  static Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static int digits10() { return std::numeric_limits<Real>::digits10; }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
};

}  // namespace Eigen
