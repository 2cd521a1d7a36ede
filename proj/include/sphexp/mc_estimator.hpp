// sphexp/mc_estimator.hpp
//
// Monte Carlo evaluation of
//
//   (e^A)_ab = 1/Gamma(r) sum_j P_j(A) d^{r-j}/ds^{r-j} [ Int dOmega e^{s <An, n>} n_a conj(n_b) s^r ] at s = 1
//
// with the s-derivative taken in closed form for each sampled direction.
#ifndef SPHEXP_MC_ESTIMATOR_HPP
#define SPHEXP_MC_ESTIMATOR_HPP

#include "sphexp/charpoly.hpp"
#include "sphexp/core.hpp"
#include "sphexp/linalg.hpp"
#include "sphexp/sphere.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

namespace sphexp {

/// Leibniz coefficients of d^{r-j}/ds^{r-j} [e^{s lambda} s^r] at s = 1:
/// coefficient[i] = C(r-j, i) * r!/(r-i)!, multiplying e^lambda lambda^{r-j-i}.
struct DerivativeWeights {
  int r = 0;
  int j = 0;
  std::vector<double> coefficient;

  DerivativeWeights(int r_, int j_) : r(r_), j(j_) {
    if (r < 0 || j < 0 || j > r) throw Error("index_range", "need 0 <= j <= r");
    const int order = r - j;
    coefficient.resize(std::size_t(order) + 1);
    double binom = 1.0;    // C(order, i)
    double falling = 1.0;  // r!/(r-i)!
    for (int i = 0; i <= order; ++i) {
      coefficient[std::size_t(i)] = binom * falling;
      binom = binom * double(order - i) / double(i + 1);
      falling *= double(r - i);
    }
  }

  int order() const { return r - j; }
};

/// d^{r-j}/ds^{r-j} [e^{s lambda} s^r] evaluated at s = 1.
template <typename Real>
std::complex<Real> s_derivative_closed_form(int r, int j, std::complex<Real> lambda) {
  const DerivativeWeights w(r, j);
  // sum_i coefficient[i] lambda^{order-i}, Horner from i = 0 upward in lambda's degree.
  std::complex<Real> poly(0);
  for (int i = 0; i <= w.order(); ++i) poly = poly * lambda + Real(w.coefficient[std::size_t(i)]);
  return std::exp(lambda) * poly;
}

/// The whole j-sum folded into one polynomial:
///   1/Gamma(r) sum_j P_j d^{r-j}/ds^{r-j}[e^{s lambda} s^r]|_1 = e^lambda * sum_d q_d lambda^d.
template <typename Real>
class IntegrandWeight {
public:
  IntegrandWeight(const CharPolyCoefficients<Real>& pieces) {
    const int r = int(pieces.dim);
    q_.assign(std::size_t(r) + 1, std::complex<Real>(0));
    const Real inv_gamma_r = Real(std::exp(-std::lgamma(double(r))));
    for (int j = 0; j <= r; ++j) {
      const DerivativeWeights w(r, j);
      for (int i = 0; i <= w.order(); ++i)
        q_[std::size_t(w.order() - i)] += pieces[std::size_t(j)] * Real(w.coefficient[std::size_t(i)]) * inv_gamma_r;
    }
  }

  std::complex<Real> operator()(std::complex<Real> lambda) const {
    std::complex<Real> poly(0);
    for (auto it = q_.rbegin(); it != q_.rend(); ++it) poly = poly * lambda + *it;
    return std::exp(lambda) * poly;
  }

  /// d/dlambda of the weight.
  std::complex<Real> derivative(std::complex<Real> lambda) const {
    std::complex<Real> poly(0), slope(0);
    for (auto it = q_.rbegin(); it != q_.rend(); ++it) {
      slope = slope * lambda + poly;
      poly = poly * lambda + *it;
    }
    return std::exp(lambda) * (poly + slope);
  }

  /// e^{Re lambda} sum_d |q_d| |lambda|^d: the size of the summands, which
  /// bounds the weight's rounding error in units of eps.
  Real magnitude(std::complex<Real> lambda) const {
    Real total = 0;
    for (auto it = q_.rbegin(); it != q_.rend(); ++it) total = total * std::abs(lambda) + std::abs(*it);
    return std::exp(lambda.real()) * total;
  }

  const std::vector<std::complex<Real>>& coefficients() const { return q_; }

private:
  std::vector<std::complex<Real>> q_;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Core estimator for any square A (hermitian or iA).
template <typename Real>
EstimateReport<Real> monte_carlo_exponential(const ComplexMatrix<Real>& a, std::int64_t samples,
                                             const SamplerConfig& cfg) {
  require_valid(a);
  if (samples < 1) throw Error("index_range", "samples must be >= 1");
  const auto t0 = Clock::now();
  const int r = int(a.rows());
  const IntegrandWeight<Real> weight(char_poly_pieces(a));

  using Acc = RunningMean<Real>;
  const Acc acc = reduce_streams<Acc>(
      cfg, samples,
      [&](int s, std::int64_t n) {
        Acc local(r, r);
        for (std::int64_t i = 0; i < n; ++i) {
          const auto dir = sample_direction<Real>(cfg, s, i, r);
          const std::complex<Real> lambda = dir.dot(a * dir);
          local.add(weight(lambda) * (dir * dir.adjoint()));
        }
        return local;
      },
      [](Acc& x, const Acc& y) { x.merge(y); });

  EstimateReport<Real> out;
  out.value = acc.mean;
  out.entry_error = acc.standard_error();
  out.abs_error_estimate = out.entry_error.maxCoeff();
  out.backend = Backend::monte_carlo;
  out.samples_or_terms = samples;
  out.seed = cfg.seed;
  out.wall_time = seconds_since(t0);
  return out;
}

}  // namespace detail

/// Monte Carlo estimate of e^A; entry_error holds per-entry standard errors.
template <typename Real>
EstimateReport<Real> expm_monte_carlo(const HermitianMatrix<Real>& a, std::int64_t samples,
                                      const SamplerConfig& cfg) {
  return detail::monte_carlo_exponential(a.matrix(), samples, cfg);
}

/// Same estimator applied to iA, i.e. an estimate of the unitary e^{iA}.
template <typename Real>
EstimateReport<Real> expm_fourier_mode(const HermitianMatrix<Real>& a, std::int64_t samples,
                                       const SamplerConfig& cfg) {
  const ComplexMatrix<Real> ia = std::complex<Real>(0, 1) * a.matrix();
  auto out = detail::monte_carlo_exponential(ia, samples, cfg);
  out.fourier = true;
  return out;
}

template <typename Real>
struct WrongFormulaReport {
  ComplexMatrix<Real> wrong_value;     // det(1-A) Int dOmega e^{<An,n>} W
  RealMatrix<Real> wrong_entry_error;
  Real wrong_abs_error = 0;
  Real deviation = 0;                  // max |wrong - e^A|
  Real significance = 0;               // deviation / resolution
  EstimateReport<Real> correct;        // the derivative formula on the same samples
  Real correct_deviation = 0;          // max |correct - e^A|
  Real correct_max_z = 0;              // max_entries |correct - e^A| / entry_error
  bool fails_as_expected = false;      // deviation > 10 * resolution
};

/// Evaluates the naive det(1-A) Int dOmega e^{<An,n>} n_a conj(n_b), which
/// drops the s-derivatives, next to the correct estimator on identical
/// samples, and measures both against the oracle.
///
/// Resolution is the larger of the standard error and a rounding floor of
/// 64 eps max(1, |e^A|).
template <typename Real>
WrongFormulaReport<Real> wrong_formula_demo(const HermitianMatrix<Real>& a, std::int64_t samples,
                                            const SamplerConfig& cfg) {
  if (samples < 1) throw Error("index_range", "samples must be >= 1");
  const auto t0 = detail::Clock::now();
  const ComplexMatrix<Real>& m = a.matrix();
  const int r = int(m.rows());
  const auto pieces = char_poly_pieces(m);
  const std::complex<Real> det = determinant<Real>(ComplexMatrix<Real>::Identity(r, r) - m);
  const IntegrandWeight<Real> weight(pieces);

  struct Pair {
    RunningMean<Real> correct, wrong;
  };
  const Pair acc = reduce_streams<Pair>(
      cfg, samples,
      [&](int s, std::int64_t n) {
        Pair local{RunningMean<Real>(r, r), RunningMean<Real>(r, r)};
        for (std::int64_t i = 0; i < n; ++i) {
          const auto dir = sample_direction<Real>(cfg, s, i, r);
          const ComplexMatrix<Real> w = dir * dir.adjoint();
          const std::complex<Real> lambda = dir.dot(m * dir);
          local.correct.add(weight(lambda) * w);
          local.wrong.add((det * std::exp(lambda)) * w);
        }
        return local;
      },
      [](Pair& x, const Pair& y) {
        x.correct.merge(y.correct);
        x.wrong.merge(y.wrong);
      });

  const ComplexMatrix<Real> exact = expm_oracle(a);
  const Real floor = Real(64) * std::numeric_limits<Real>::epsilon() * std::max(Real(1), exact.cwiseAbs().maxCoeff());

  WrongFormulaReport<Real> out;
  out.wrong_value = acc.wrong.mean;
  out.wrong_entry_error = acc.wrong.standard_error();
  out.wrong_abs_error = out.wrong_entry_error.maxCoeff();
  out.deviation = (out.wrong_value - exact).cwiseAbs().maxCoeff();
  out.significance = out.deviation / std::max(out.wrong_abs_error, floor);
  out.fails_as_expected = out.significance > Real(10);

  out.correct.value = acc.correct.mean;
  out.correct.entry_error = acc.correct.standard_error();
  out.correct.abs_error_estimate = out.correct.entry_error.maxCoeff();
  out.correct.backend = Backend::monte_carlo;
  out.correct.samples_or_terms = samples;
  out.correct.seed = cfg.seed;
  out.correct.wall_time = detail::seconds_since(t0);
  const RealMatrix<Real> err = (out.correct.value - exact).cwiseAbs();
  out.correct_deviation = err.maxCoeff();
  out.correct_max_z = (err.array() / out.correct.entry_error.array().max(floor)).maxCoeff();
  return out;
}

/// Largest per-sample gap between the W-form integrand e^{s Tr(AW)} W_ab and
/// the vector form e^{s <An, n>} n_a conj(n_b) (after the j-sum), over the
/// first `samples` draws of stream 0. The gap is measured in units of
///   1e-15 max(1, |weight|) + 4 r eps ||A||_F |weight'(lambda)|,
/// i.e. 1e-15 relative plus the rounding of lambda itself carried through
/// the weight's slope. Values <= 1 mean the two forms agree.
template <typename Real>
Real integrand_form_discrepancy(const HermitianMatrix<Real>& a, std::int64_t samples,
                                const SamplerConfig& cfg) {
  const ComplexMatrix<Real>& m = a.matrix();
  const int r = int(m.rows());
  const IntegrandWeight<Real> weight(char_poly_pieces(m));
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real lambda_rounding = 4 * Real(r) * eps * m.norm();
  Real worst = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto s = sample_unit_vector<Real>(cfg, 0, i, r);
    const std::complex<Real> trace_form = (m * s.w).trace();
    const std::complex<Real> vector_form = s.n.dot(m * s.n);
    const auto wt = weight(trace_form), wv = weight(vector_form);
    const Real allowance = Real(1e-15) * std::max({Real(1), std::abs(wt), weight.magnitude(trace_form)}) +
                           lambda_rounding * std::abs(weight.derivative(trace_form));
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r; ++y) {
        const auto w_form = wt * s.w(x, y);
        const auto n_form = wv * (s.n(x) * std::conj(s.n(y)));
        worst = std::max(worst, std::abs(w_form - n_form) / allowance);
      }
  }
  return worst;
}

}  // namespace sphexp

#endif  // SPHEXP_MC_ESTIMATOR_HPP
