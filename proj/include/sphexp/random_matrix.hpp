// sphexp/random_matrix.hpp
//
// Seeded test matrices. All draws come from the Philox stream, so the same
// seed gives the same matrix on every platform.
#ifndef SPHEXP_RANDOM_MATRIX_HPP
#define SPHEXP_RANDOM_MATRIX_HPP

#include "sphexp/core.hpp"
#include "sphexp/linalg.hpp"
#include "sphexp/sphere.hpp"

namespace sphexp {

template <typename Real>
ComplexMatrix<Real> random_gaussian_matrix(int r, std::uint64_t seed) {
  ComplexMatrix<Real> g(r, r);
  for (int col = 0; col < r; ++col) g.col(col) = gaussian_vector<Real>(seed, 0x7fffffff, col, r);
  return g;
}

/// Hermitian matrix with spectral norm exactly `norm` (to rounding).
template <typename Real>
HermitianMatrix<Real> random_hermitian(int r, Real norm, std::uint64_t seed) {
  const ComplexMatrix<Real> g = random_gaussian_matrix<Real>(r, seed);
  HermitianMatrix<Real> h(ComplexMatrix<Real>((g + g.adjoint()) / Real(2)));
  const Real current = operator_norm_upper(h);
  if (current == Real(0)) return h;
  return HermitianMatrix<Real>(ComplexMatrix<Real>(h.matrix() * (norm / current)));
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal moved into Q.
template <typename Real>
ComplexMatrix<Real> random_unitary(int r, std::uint64_t seed) {
  const ComplexMatrix<Real> g = random_gaussian_matrix<Real>(r, seed);
  Eigen::HouseholderQR<ComplexMatrix<Real>> qr(g);
  ComplexMatrix<Real> q = qr.householderQ();
  const ComplexMatrix<Real> rr = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int i = 0; i < r; ++i) {
    const auto d = rr(i, i);
    if (std::abs(d) > Real(0)) q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace sphexp

#endif  // SPHEXP_RANDOM_MATRIX_HPP
