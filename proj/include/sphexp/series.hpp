// sphexp/series.hpp
//
// Deterministic evaluation of the exponential through complex Gaussian
// moments:
//
//   e^A = sum_j P_j(A) sum_k G_k / (k! (k+j)!),   G_k = k! sum_m A^m h_{k-m},
//
// where h_k is the t^k coefficient of 1/det(1 - tA).
#ifndef SPHEXP_SERIES_HPP
#define SPHEXP_SERIES_HPP

#include "sphexp/charpoly.hpp"
#include "sphexp/core.hpp"
#include "sphexp/linalg.hpp"

#include <chrono>
#include <cmath>
#include <vector>

namespace sphexp {

/// Hard limit on the number of series terms.
inline constexpr int kTruncationCap = 500;

/// h_0..h_kmax from h_k = (1/k) sum_{i=1..k} Tr(A^i) h_{k-i}.
template <typename Real>
std::vector<std::complex<Real>> complete_homogeneous(const ComplexMatrix<Real>& a, int kmax) {
  std::vector<std::complex<Real>> h(std::size_t(kmax) + 1, std::complex<Real>(0));
  h[0] = 1;
  if (kmax == 0) return h;
  const auto traces = power_sums(a, kmax);
  for (int k = 1; k <= kmax; ++k) {
    std::complex<Real> acc(0);
    for (int i = 1; i <= k; ++i) acc += traces[std::size_t(i - 1)] * h[std::size_t(k - i)];
    h[std::size_t(k)] = acc / Real(k);
  }
  return h;
}

/// Gaussian moments of A up to order kmax.
///
/// G[k](a, b) = (1/N) Int dx e^{-|x|^2} <Ax, x>^k x_a conj(x_b), and
/// reduced[k] = G[k] / k! = sum_m A^m h[k-m].
template <typename Real>
struct MomentTable {
  int kmax = 0;
  std::vector<std::complex<Real>> h;
  std::vector<ComplexMatrix<Real>> G;
  std::vector<ComplexMatrix<Real>> reduced;
};

template <typename Real>
MomentTable<Real> build_moment_table(const ComplexMatrix<Real>& a, int kmax) {
  require_valid(a);
  if (kmax < 0) throw Error("index_range", "kmax must be >= 0");
  const Eigen::Index n = a.rows();
  MomentTable<Real> t;
  t.kmax = kmax;
  t.h = complete_homogeneous(a, kmax);

  std::vector<ComplexMatrix<Real>> powers{ComplexMatrix<Real>::Identity(n, n)};
  for (int m = 1; m <= kmax; ++m) powers.push_back(powers.back() * a);

  Real factorial = 1;
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) factorial *= Real(k);
    ComplexMatrix<Real> s = ComplexMatrix<Real>::Zero(n, n);
    for (int m = 0; m <= k; ++m) s += powers[std::size_t(m)] * t.h[std::size_t(k - m)];
    t.G.push_back(s * factorial);
    t.reduced.push_back(std::move(s));
    if (!t.G.back().allFinite()) throw Error("moment_overflow", "G[" + std::to_string(k) + "] is not finite");
  }
  return t;
}

/// Largest |coefficient| of t^1..t^kmax in (sum_k h_k t^k) det(1 - tA),
/// which vanishes exactly.
template <typename Real>
Real generating_function_residual(const MomentTable<Real>& table, const CharPolyCoefficients<Real>& pieces) {
  Real worst = 0;
  for (int deg = 1; deg <= table.kmax; ++deg) {
    std::complex<Real> c(0);
    for (int j = 0; j <= std::min<int>(deg, int(pieces.dim)); ++j)
      c += pieces[std::size_t(j)] * table.h[std::size_t(deg - j)];
    worst = std::max(worst, std::abs(c));
  }
  return worst;
}

struct TruncationPlan {
  int kmax = 0;
  /// Entrywise bound on everything dropped beyond kmax.
  double tail_bound = 0;
  /// Spectral-norm bound the plan was built from.
  double norm_bound = 0;
};

namespace detail {

/// Majorant for the k-th term of the series (all j folded in):
///
///   |(A^m)_ab| <= rho^m,  |h_i| <= C(i + r - 1, r - 1) rho^i,
///   sum_{m=0..k} C(k - m + r - 1, r - 1) = C(k + r, r),
///   1/(k+j)! <= 1/k!,
///
/// so |term_k|_ab <= (sum_j |P_j|) C(k + r, r) rho^k / k!.
/// Successive ratios (k + r + 1) rho / (k + 1)^2 decrease in k, so once a
/// ratio q < 1 the remaining tail is at most t_{K+1} / (1 - q).
inline double log_term_majorant(int k, int r, double rho, double pieces_l1) {
  return std::log(pieces_l1) + std::lgamma(double(k + r + 1)) - std::lgamma(double(r + 1)) +
         double(k) * std::log(rho) - 2.0 * std::lgamma(double(k + 1));
}

inline double tail_after(int kmax, int r, double rho, double pieces_l1) {
  if (rho == 0.0 || pieces_l1 == 0.0) return 0.0;
  const int next = kmax + 1;
  const double ratio = double(next + r + 1) * rho / (double(next + 1) * double(next + 1));
  if (ratio >= 1.0) return HUGE_VAL;
  return std::exp(log_term_majorant(next, r, rho, pieces_l1)) / (1.0 - ratio);
}

inline TruncationPlan plan_from_norm(double rho, int r, double pieces_l1, double target_abs_err) {
  if (!(target_abs_err > 0)) throw Error("index_range", "target_abs_err must be > 0");
  TruncationPlan plan;
  plan.norm_bound = rho;
  for (int k = 0; k <= kTruncationCap; ++k) {
    const double tail = tail_after(k, r, rho, pieces_l1);
    if (tail <= target_abs_err) {
      plan.kmax = k;
      plan.tail_bound = tail;
      return plan;
    }
  }
  throw Error("truncation_cap", "more than " + std::to_string(kTruncationCap) + " terms needed");
}

template <typename Real>
double pieces_l1(const CharPolyCoefficients<Real>& pieces) {
  double s = 0;
  for (const auto& c : pieces.p) s += double(std::abs(c));
  return s;
}

struct SeriesResult {
  int kmax = 0;
  double last_term = 0;  // max entry of the k = kmax contribution
};

/// sum_j P_j sum_{k<=kmax} sum_m A^m h_{k-m} / (k+j)!, evaluated on the
/// scaled matrix B = A / rho so that no factorial or power of rho is ever
/// formed on its own: the weight rho^k / (k+j)! is carried by the recurrence
/// w(k+1, j) = w(k, j) rho / (k+j+1).
template <typename Real>
ComplexMatrix<Real> series_sum(const ComplexMatrix<Real>& a, const CharPolyCoefficients<Real>& pieces,
                               Real rho, int kmax, SeriesResult& info) {
  const Eigen::Index n = a.rows();
  const int r = int(n);
  info.kmax = kmax;
  if (rho == Real(0)) {
    info.last_term = kmax == 0 ? 1.0 : 0.0;
    return ComplexMatrix<Real>::Identity(n, n);
  }
  const ComplexMatrix<Real> b = a / rho;
  const auto h = complete_homogeneous(b, kmax);

  // weight[k][j] = rho^k / (k+j)!
  std::vector<std::vector<Real>> weight(std::size_t(kmax) + 1, std::vector<Real>(std::size_t(r) + 1));
  {
    Real inv_fact = 1;
    for (int j = 0; j <= r; ++j) {
      if (j > 0) inv_fact /= Real(j);
      weight[0][std::size_t(j)] = inv_fact;
    }
    for (int k = 0; k < kmax; ++k)
      for (int j = 0; j <= r; ++j)
        weight[std::size_t(k + 1)][std::size_t(j)] = weight[std::size_t(k)][std::size_t(j)] * rho / Real(k + j + 1);
  }

  // coeff[m] = sum_j P_j sum_{k=m..kmax} h_{k-m} w(k, j); last[m] is the k = kmax slice.
  std::vector<std::complex<Real>> coeff(std::size_t(kmax) + 1, std::complex<Real>(0));
  std::vector<std::complex<Real>> last(std::size_t(kmax) + 1, std::complex<Real>(0));
  for (int k = 0; k <= kmax; ++k) {
    std::complex<Real> pw(0);
    for (int j = 0; j <= r; ++j) pw += pieces[std::size_t(j)] * weight[std::size_t(k)][std::size_t(j)];
    for (int m = 0; m <= k; ++m) {
      const auto c = pw * h[std::size_t(k - m)];
      coeff[std::size_t(m)] += c;
      if (k == kmax) last[std::size_t(m)] = c;
    }
  }

  ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(n, n);
  ComplexMatrix<Real> tail = ComplexMatrix<Real>::Zero(n, n);
  ComplexMatrix<Real> power = ComplexMatrix<Real>::Identity(n, n);
  for (int m = 0; m <= kmax; ++m) {
    if (m > 0) power = (power * b).eval();
    sum += power * coeff[std::size_t(m)];
    tail += power * last[std::size_t(m)];
  }
  info.last_term = double(tail.cwiseAbs().maxCoeff());
  return sum;
}

template <typename Real>
EstimateReport<Real> series_exponential(const ComplexMatrix<Real>& a, Real rho, Real target_abs_err) {
  require_valid(a);
  const auto t0 = std::chrono::steady_clock::now();
  const auto pieces = char_poly_pieces(a);
  const double l1 = pieces_l1(pieces);
  TruncationPlan plan = plan_from_norm(double(rho), int(a.rows()), l1, double(target_abs_err));

  // A posteriori: the last included term must sit below 1% of the target.
  SeriesResult info;
  ComplexMatrix<Real> value = series_sum(a, pieces, rho, plan.kmax, info);
  while (plan.tail_bound > 0 && info.last_term >= 0.01 * double(target_abs_err)) {
    if (plan.kmax + 1 > kTruncationCap)
      throw Error("truncation_cap", "more than " + std::to_string(kTruncationCap) + " terms needed");
    ++plan.kmax;
    plan.tail_bound = tail_after(plan.kmax, int(a.rows()), double(rho), l1);
    value = series_sum(a, pieces, rho, plan.kmax, info);
  }

  EstimateReport<Real> out;
  out.value = std::move(value);
  out.abs_error_estimate = Real(plan.tail_bound);
  out.entry_error = RealMatrix<Real>::Constant(a.rows(), a.cols(), Real(plan.tail_bound));
  out.backend = Backend::series;
  out.samples_or_terms = plan.kmax;
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace detail

/// Smallest kmax whose a-priori tail majorant is within target_abs_err.
template <typename Real>
TruncationPlan plan_truncation(const ComplexMatrix<Real>& a, Real target_abs_err) {
  require_valid(a);
  return detail::plan_from_norm(double(operator_norm_upper(a)), int(a.rows()),
                                detail::pieces_l1(char_poly_pieces(a)), double(target_abs_err));
}

/// The series truncated after exactly kmax terms, without planning.
template <typename Real>
ComplexMatrix<Real> expm_series_fixed(const ComplexMatrix<Real>& a, int kmax) {
  require_valid(a);
  if (kmax < 0) throw Error("index_range", "kmax must be >= 0");
  detail::SeriesResult info;
  return detail::series_sum(a, char_poly_pieces(a), operator_norm_upper(a), kmax, info);
}

/// e^A through the Gaussian-moment series, accurate to target_abs_err
/// entrywise (plus rounding). Throws "truncation_cap" when more than 500
/// terms would be needed.
template <typename Real>
EstimateReport<Real> expm_series(const HermitianMatrix<Real>& a, Real target_abs_err) {
  return detail::series_exponential(a.matrix(), operator_norm_upper(a), target_abs_err);
}

/// General square input; the plan uses the Frobenius norm unless A is hermitian.
template <typename Real>
EstimateReport<Real> expm_series(const ComplexMatrix<Real>& a, Real target_abs_err) {
  return detail::series_exponential(a, operator_norm_upper(a), target_abs_err);
}

/// e^{iA} by the same series; iA has the spectral norm of A.
template <typename Real>
EstimateReport<Real> expm_series_fourier(const HermitianMatrix<Real>& a, Real target_abs_err) {
  const ComplexMatrix<Real> ia = std::complex<Real>(0, 1) * a.matrix();
  auto out = detail::series_exponential(ia, operator_norm_upper(a), target_abs_err);
  out.fourier = true;
  return out;
}

/// Partial sum of sum_j P_j sum_k G_k / k! over all terms of total degree
/// j + k <= kmax, which is exactly 1 + A + ... + A^kmax.
template <typename Real>
ComplexMatrix<Real> resolvent_series(const ComplexMatrix<Real>& a, int kmax) {
  require_valid(a);
  if (kmax < 0) throw Error("index_range", "kmax must be >= 0");
  const auto pieces = char_poly_pieces(a);
  const auto table = build_moment_table(a, kmax);
  ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(a.rows(), a.cols());
  for (int j = 0; j <= std::min<int>(kmax, int(a.rows())); ++j)
    for (int k = 0; k + j <= kmax; ++k) sum += pieces[std::size_t(j)] * table.reduced[std::size_t(k)];
  return sum;
}

/// Max entrywise gap between the degree-kmax resolvent series and
/// (1 - A)^{-1}. Requires spectral norm < 1.
template <typename Real>
Real resolvent_series_check(const HermitianMatrix<Real>& a, int kmax) {
  if (!(operator_norm_upper(a) < Real(1))) throw Error("resolvent_series_divergent", "||A|| >= 1");
  return (resolvent_series(a.matrix(), kmax) - resolvent(a.matrix())).cwiseAbs().maxCoeff();
}

}  // namespace sphexp

#endif  // SPHEXP_SERIES_HPP
