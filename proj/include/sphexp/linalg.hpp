// sphexp/linalg.hpp
//
// Products, norms, the hermitian Jacobi eigen-solver, the reference
// exponential and the resolvent (1 - A)^{-1}.
#ifndef SPHEXP_LINALG_HPP
#define SPHEXP_LINALG_HPP

#include "sphexp/core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sphexp {

template <typename Real>
ComplexMatrix<Real> matmul(const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b) {
  if (a.cols() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    throw Error("dim_mismatch", std::to_string(a.rows()) + " vs " + std::to_string(b.rows()));
  return a * b;
}

template <typename Real>
struct HermitianEigen {
  RealVector<Real> values;       // ascending
  ComplexMatrix<Real> vectors;   // columns, unitary
  int sweeps = 0;
};

/// Cyclic Jacobi diagonalization of a hermitian matrix.
///
/// Each rotation zeroes one off-diagonal pair (p, q) with the unitary block
/// [[c, s e], [-s conj(e), c]] where e is the phase of a(p, q). Sweeps stop
/// once the off-diagonal Frobenius mass drops below 1e-14 * ||A||_F.
template <typename Real>
HermitianEigen<Real> jacobi_eigen(const HermitianMatrix<Real>& h, int max_sweeps = 100) {
  using C = std::complex<Real>;
  ComplexMatrix<Real> a = h.matrix();
  const Eigen::Index n = a.rows();
  ComplexMatrix<Real> v = ComplexMatrix<Real>::Identity(n, n);
  const Real threshold = Real(1e-14) * a.norm();

  auto off_mass = [&] {
    Real s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < max_sweeps && off_mass() > threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Real g = std::abs(a(p, q));
        if (g == Real(0)) continue;
        const C e = a(p, q) / g;
        const Real app = a(p, p).real();
        const Real aqq = a(q, q).real();
        const Real tau = (aqq - app) / (2 * g);
        const Real t = (tau >= 0 ? Real(1) : Real(-1)) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        const Real c = 1 / std::sqrt(1 + t * t);
        const Real s = t * c;

        // A <- A V
        for (Eigen::Index k = 0; k < n; ++k) {
          const C akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(e) * akq;
          a(k, q) = s * e * akp + c * akq;
        }
        // A <- V^H A
        for (Eigen::Index k = 0; k < n; ++k) {
          const C apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * e * aqk;
          a(q, k) = s * std::conj(e) * apk + c * aqk;
        }
        a(p, q) = a(q, p) = C(0);
        a(p, p) = C(app - t * g);
        a(q, q) = C(aqq + t * g);

        for (Eigen::Index k = 0; k < n; ++k) {
          const C vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * std::conj(e) * vkq;
          v(k, q) = s * e * vkp + c * vkq;
        }
      }
    }
  }

  HermitianEigen<Real> out;
  out.sweeps = sweep;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[std::size_t(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[std::size_t(i)], order[std::size_t(i)]).real();
    out.vectors.col(i) = v.col(order[std::size_t(i)]);
  }
  return out;
}

/// Spectral radius for hermitian input (max |eigenvalue|).
template <typename Real>
Real operator_norm_upper(const HermitianMatrix<Real>& a) {
  return jacobi_eigen(a).values.cwiseAbs().maxCoeff();
}

/// Upper bound on the spectral norm: exact for hermitian input, Frobenius
/// norm otherwise.
template <typename Real>
Real operator_norm_upper(const ComplexMatrix<Real>& a) {
  require_valid(a);
  if (HermitianMatrix<Real>::is_hermitian(a)) return operator_norm_upper(HermitianMatrix<Real>(a));
  return a.norm();
}

/// e^A = U e^Lambda U^H via the Jacobi eigen-solver.
template <typename Real>
ComplexMatrix<Real> expm_oracle(const HermitianMatrix<Real>& a) {
  const auto eig = jacobi_eigen(a);
  const ComplexMatrix<Real> scaled =
      eig.vectors * eig.values.array().exp().matrix().template cast<std::complex<Real>>().asDiagonal();
  return scaled * eig.vectors.adjoint();
}

/// e^{iA} = U e^{i Lambda} U^H, unitary up to rounding.
template <typename Real>
ComplexMatrix<Real> expm_oracle_fourier(const HermitianMatrix<Real>& a) {
  const auto eig = jacobi_eigen(a);
  ComplexVector<Real> phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::polar(Real(1), eig.values(i));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

/// Scaling and squaring with a degree-16 Taylor polynomial;
/// ceil(log2(max(1, ||A||_F))) + 4 squarings.
template <typename Real>
ComplexMatrix<Real> expm_taylor_squaring(const ComplexMatrix<Real>& a) {
  require_valid(a);
  constexpr int kOrder = 16;
  const Eigen::Index n = a.rows();
  const Real fro = a.norm();
  const int squarings = static_cast<int>(std::ceil(std::log2(std::max(Real(1), fro)))) + 4;
  const ComplexMatrix<Real> x = a / std::ldexp(Real(1), squarings);

  // Horner: I + x(I + x/2(I + x/3(...)))
  ComplexMatrix<Real> e = ComplexMatrix<Real>::Identity(n, n);
  for (int k = kOrder; k >= 1; --k) e = ComplexMatrix<Real>::Identity(n, n) + (x * e) / Real(k);
  for (int i = 0; i < squarings; ++i) e = (e * e).eval();
  return e;
}

/// Reference exponential. Hermitian input takes the eigendecomposition
/// path; anything else goes through scaling and squaring.
template <typename Real>
ComplexMatrix<Real> expm_oracle(const ComplexMatrix<Real>& a) {
  require_valid(a);
  if (hermiticity_defect(a) == Real(0)) return expm_oracle(HermitianMatrix<Real>(a));
  return expm_taylor_squaring(a);
}

/// det(M) by partial-pivot LU.
template <typename Real>
std::complex<Real> determinant(const ComplexMatrix<Real>& m) {
  require_valid(m);
  return m.partialPivLu().determinant();
}

/// (1 - A)^{-1}; throws "resolvent_singular" when
/// |det(1 - A)| <= 1e-12 (1 + ||A||_F)^r.
template <typename Real>
ComplexMatrix<Real> resolvent(const ComplexMatrix<Real>& a) {
  require_valid(a);
  const Eigen::Index n = a.rows();
  const ComplexMatrix<Real> m = ComplexMatrix<Real>::Identity(n, n) - a;
  const auto lu = m.partialPivLu();
  const Real floor = Real(1e-12) * std::pow(1 + a.norm(), Real(n));
  if (!(std::abs(lu.determinant()) > floor))
    throw Error("resolvent_singular", "|det(1-A)| below " + std::to_string(double(floor)));
  return lu.solve(ComplexMatrix<Real>::Identity(n, n));
}

}  // namespace sphexp

#endif  // SPHEXP_LINALG_HPP
