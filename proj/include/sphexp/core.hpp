// sphexp/core.hpp
//
// Dense complex matrix types shared by every backend.
#ifndef SPHEXP_CORE_HPP
#define SPHEXP_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace sphexp {

/// Error carrying a short machine-readable code such as "dim_mismatch".
class Error : public std::runtime_error {
public:
  explicit Error(std::string code, const std::string& detail = {})
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using MatrixXcd = ComplexMatrix<double>;

/// Throws unless `a` is a non-empty square matrix with finite entries.
template <typename Derived>
void require_valid(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() < 1 || a.rows() != a.cols())
    throw Error("dim_mismatch", "matrix must be square with dim >= 1");
  if (!a.allFinite())
    throw Error("non_finite", "matrix has NaN or Inf entries");
}

/// Largest |a_ij - conj(a_ji)|.
template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Hermitian tolerance relative to the largest entry magnitude.
inline constexpr double kHermitianTolerance = 1e-12;

/// A matrix equal to its conjugate transpose.
///
/// Construction accepts inputs hermitian to within kHermitianTolerance
/// (relative to the largest entry) and stores the exact symmetrization
/// (A + A^H) / 2, so diagonal entries are real and a(i,j) == conj(a(j,i))
/// holds bitwise.
template <typename Real>
class HermitianMatrix {
public:
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrix<Real>;

  explicit HermitianMatrix(const Matrix& a) : m_(symmetrize(a)) {}

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  static bool is_hermitian(const Matrix& a) {
    require_valid(a);
    const Real scale = a.cwiseAbs().maxCoeff();
    return hermiticity_defect(a) <= Real(kHermitianTolerance) * scale;
  }

private:
  static Matrix symmetrize(const Matrix& a) {
    if (!is_hermitian(a))
      throw Error("not_hermitian", "defect " + std::to_string(double(hermiticity_defect(a))));
    Matrix s = (a + a.adjoint()) / Real(2);
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, i) = Scalar(s(i, i).real(), Real(0));
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = i + 1; j < s.cols(); ++j) s(j, i) = std::conj(s(i, j));
    return s;
  }

  Matrix m_;
};

enum class Backend { monte_carlo, series, oracle };

inline const char* to_string(Backend b) {
  switch (b) {
    case Backend::monte_carlo: return "monte_carlo";
    case Backend::series: return "series";
    case Backend::oracle: return "oracle";
  }
  return "unknown";
}

/// Result of one exponential evaluation.
template <typename Real>
struct EstimateReport {
  ComplexMatrix<Real> value;
  /// Largest per-entry error estimate: standard error for Monte Carlo,
  /// truncation tail bound for the series, zero for the oracle.
  Real abs_error_estimate = 0;
  /// Per-entry estimate behind abs_error_estimate (same shape as value).
  RealMatrix<Real> entry_error;
  Backend backend = Backend::oracle;
  std::int64_t samples_or_terms = 0;
  std::optional<std::uint64_t> seed;
  double wall_time = 0.0;
  /// True when value estimates exp(iA) rather than exp(A).
  bool fourier = false;
};

}  // namespace sphexp

#endif  // SPHEXP_CORE_HPP
