// sphexp/charpoly.hpp
//
// Homogeneous pieces P_j(A) of det(1 - A), from traces of powers of A.
#ifndef SPHEXP_CHARPOLY_HPP
#define SPHEXP_CHARPOLY_HPP

#include "sphexp/core.hpp"

#include <vector>

namespace sphexp {

/// p[j] is the degree-j part of det(1 - A); p[0] == 1 and p.size() == dim + 1.
template <typename Real>
struct CharPolyCoefficients {
  Eigen::Index dim = 0;
  std::vector<std::complex<Real>> p;

  std::complex<Real> operator[](std::size_t j) const { return p[j]; }

  /// Sum of all pieces, i.e. det(1 - A).
  std::complex<Real> total() const {
    std::complex<Real> s(0);
    for (const auto& c : p) s += c;
    return s;
  }
};

/// [Tr(A), Tr(A^2), ..., Tr(A^kmax)] by repeated multiplication.
template <typename Real>
std::vector<std::complex<Real>> power_sums(const ComplexMatrix<Real>& a, int kmax) {
  require_valid(a);
  if (kmax < 1) throw Error("index_range", "kmax must be >= 1");
  std::vector<std::complex<Real>> out;
  out.reserve(std::size_t(kmax));
  ComplexMatrix<Real> power = a;
  out.push_back(power.trace());
  for (int k = 2; k <= kmax; ++k) {
    power = (power * a).eval();
    out.push_back(power.trace());
  }
  return out;
}

/// Newton's identities: e_k = (1/k) sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i,
/// and P_j = (-1)^j e_j. No eigendecomposition is involved.
template <typename Real>
CharPolyCoefficients<Real> char_poly_pieces(const ComplexMatrix<Real>& a) {
  require_valid(a);
  const auto r = static_cast<int>(a.rows());
  const auto traces = power_sums(a, r);

  std::vector<std::complex<Real>> e(std::size_t(r) + 1);
  e[0] = 1;
  for (int k = 1; k <= r; ++k) {
    std::complex<Real> acc(0);
    for (int i = 1; i <= k; ++i) {
      const auto term = e[std::size_t(k - i)] * traces[std::size_t(i - 1)];
      acc += (i % 2 == 1) ? term : -term;
    }
    e[std::size_t(k)] = acc / Real(k);
  }

  CharPolyCoefficients<Real> out{a.rows(), std::move(e)};
  for (int j = 1; j <= r; j += 2) out.p[std::size_t(j)] = -out.p[std::size_t(j)];
  return out;
}

template <typename Real>
CharPolyCoefficients<Real> char_poly_pieces(const HermitianMatrix<Real>& a) {
  return char_poly_pieces(a.matrix());
}

}  // namespace sphexp

#endif  // SPHEXP_CHARPOLY_HPP
