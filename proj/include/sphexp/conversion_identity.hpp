// sphexp/conversion_identity.hpp
//
// Exact rational check of the weight identity that turns the sphere form of
// the series into the Gaussian form:
//
//   1/Gamma(r) * 1/k! * (r+k)!/(k+j)! * Gamma(d/2) / Gamma((2(k+1)+d)/2) == 1/(k! (j+k)!)
//
// where d is the real dimension of the sphere's ambient space.
#ifndef SPHEXP_CONVERSION_IDENTITY_HPP
#define SPHEXP_CONVERSION_IDENTITY_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <vector>

namespace sphexp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Gamma at a positive integer n: (n - 1)!.
inline BigInt gamma_int(int n) { return factorial(n - 1); }

/// Gamma(x) / Gamma(x + k + 1) = prod_{i=0..k} 1 / (x + i), exact for any
/// positive rational x.
inline Rational gamma_shift_ratio(const Rational& x, int k) {
  Rational v(1);
  for (int i = 0; i <= k; ++i) v /= (x + i);
  return v;
}

/// Left-hand weight for a positive (possibly fractional) dimension d.
inline Rational conversion_weight(int r, int j, int k, const Rational& d) {
  Rational v(1, gamma_int(r));
  v /= factorial(k);
  v *= Rational(factorial(r + k), factorial(k + j));
  v *= gamma_shift_ratio(d / 2, k);
  return v;
}

inline Rational gaussian_weight(int j, int k) {
  return Rational(1, factorial(k) * factorial(j + k));
}

struct IdentitySweep {
  int cases = 0;
  int holds = 0;
  std::vector<std::array<int, 3>> failures;  // (r, j, k)

  bool all_hold() const { return cases > 0 && holds == cases; }
};

/// Sweeps 1 <= r <= rmax, 0 <= j <= r, 0 <= k <= kmax with d = dimension(r)
/// (a Rational).
template <typename Dimension>
IdentitySweep sweep_conversion_identity(int rmax, int kmax, Dimension dimension) {
  IdentitySweep s;
  for (int r = 1; r <= rmax; ++r) {
    for (int j = 0; j <= r; ++j) {
      for (int k = 0; k <= kmax; ++k) {
        ++s.cases;
        if (conversion_weight(r, j, k, dimension(r)) == gaussian_weight(j, k))
          ++s.holds;
        else
          s.failures.push_back({r, j, k});
      }
    }
  }
  return s;
}

}  // namespace sphexp

#endif  // SPHEXP_CONVERSION_IDENTITY_HPP
