// sphexp/sphere.hpp
//
// Unitary-invariant sampling on the unit sphere of C^r, exact sphere
// moments, and the deterministic stream reduction used by every Monte
// Carlo estimate in the library.
#ifndef SPHEXP_SPHERE_HPP
#define SPHEXP_SPHERE_HPP

#include "sphexp/core.hpp"
#include "sphexp/philox.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <algorithm>
#include <thread>
#include <vector>

namespace sphexp {

struct SamplerConfig {
  std::uint64_t seed = 0;
  /// Number of independent substreams; fixes how samples are split and
  /// therefore the result.
  int stream_count = 1;
  /// Worker threads. Results do not depend on this value.
  int threads = 1;
};

template <typename Real>
struct SphereSample {
  ComplexVector<Real> n;
  ComplexMatrix<Real> w;  // n n^H
};

namespace detail {

inline PhiloxKey key_of(std::uint64_t seed) noexcept {
  return {std::uint32_t(seed), std::uint32_t(seed >> 32)};
}

inline void check_stream(const SamplerConfig& cfg, std::int64_t stream) {
  if (cfg.stream_count < 1) throw Error("index_range", "stream_count must be >= 1");
  if (stream < 0 || stream >= cfg.stream_count) throw Error("index_range", "stream out of range");
}

}  // namespace detail

/// Standard complex Gaussian vector (E|z_i|^2 = 1) keyed on
/// (seed, stream, index); `attempt` selects a disjoint block range.
template <typename Real>
ComplexVector<Real> gaussian_vector(std::uint64_t seed, std::int64_t stream, std::int64_t index,
                                    int r, std::uint32_t attempt = 0) {
  ComplexVector<Real> z(r);
  const auto key = detail::key_of(seed);
  for (int i = 0; i < r; ++i) {
    const PhiloxCounter ctr{std::uint32_t(std::uint64_t(index)),
                            std::uint32_t(std::uint64_t(index) >> 32), std::uint32_t(stream),
                            attempt * std::uint32_t(r) + std::uint32_t(i)};
    const auto xy = philox_complex_normal(ctr, key);
    z(i) = std::complex<Real>(Real(xy[0]), Real(xy[1]));
  }
  return z;
}

/// Unit vector from the normalized complex Gaussian draw for
/// (seed, stream, index). Identical arguments give bitwise identical output.
template <typename Real>
ComplexVector<Real> sample_direction(const SamplerConfig& cfg, std::int64_t stream,
                                     std::int64_t index, int r) {
  detail::check_stream(cfg, stream);
  if (r < 1) throw Error("index_range", "r must be >= 1");
  for (std::uint32_t attempt = 0;; ++attempt) {
    ComplexVector<Real> z = gaussian_vector<Real>(cfg.seed, stream, index, r, attempt);
    const Real norm = z.norm();
    if (norm > Real(0)) return z / norm;
  }
}

template <typename Real>
SphereSample<Real> sample_unit_vector(const SamplerConfig& cfg, std::int64_t stream,
                                      std::int64_t index, int r) {
  SphereSample<Real> s;
  s.n = sample_direction<Real>(cfg, stream, index, r);
  s.w = s.n * s.n.adjoint();
  return s;
}

/// Powers of n_i (a) and conj(n_i) (b) in a monomial over C^r.
struct MultiIndex {
  std::vector<int> a;
  std::vector<int> b;

  int degree() const {
    return std::accumulate(a.begin(), a.end(), 0) + std::accumulate(b.begin(), b.end(), 0);
  }

  /// prod_i |z_i|^{2 a_i}, the a == b case.
  static MultiIndex modulus(std::vector<int> powers) { return {powers, powers}; }

  template <typename Real>
  std::complex<Real> evaluate(const ComplexVector<Real>& z) const {
    std::complex<Real> v(1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (int k = 0; k < a[i]; ++k) v *= z(Eigen::Index(i));
      for (int k = 0; k < b[i]; ++k) v *= std::conj(z(Eigen::Index(i)));
    }
    return v;
  }
};

/// Exact normalized sphere moment: prod a_i! * Gamma(r) / Gamma(r + N) when
/// a == b (2N = total degree), zero otherwise by phase invariance.
inline double sphere_moment_exact(int r, int total_degree, const MultiIndex& m) {
  if (r < 1) throw Error("index_range", "r must be >= 1");
  if (total_degree % 2 != 0) throw Error("odd_degree_moment_zero");
  if (int(m.a.size()) != r || int(m.b.size()) != r) throw Error("dim_mismatch", "multi-index length != r");
  if (m.degree() != total_degree) throw Error("index_range", "multi-index degree != total_degree");
  if (m.a != m.b) return 0.0;
  const int half = total_degree / 2;
  double log_value = std::lgamma(double(r)) - std::lgamma(double(r + half));
  for (int ai : m.a) log_value += std::lgamma(double(ai) + 1.0);
  return std::exp(log_value);
}

/// prod a_i!, the complex Gaussian moment E prod |z_i|^{2 a_i} with E|z|^2 = 1.
inline double gaussian_moment_exact(const MultiIndex& m) {
  if (m.a != m.b) return 0.0;
  double log_value = 0.0;
  for (int ai : m.a) log_value += std::lgamma(double(ai) + 1.0);
  return std::exp(log_value);
}

/// Mean and spread of a matrix-valued sample, Welford style, mergeable with
/// Chan's update.
template <typename Real>
struct RunningMean {
  std::int64_t count = 0;
  ComplexMatrix<Real> mean;
  RealMatrix<Real> m2;  // sum |x - mean|^2

  RunningMean() = default;
  RunningMean(Eigen::Index rows, Eigen::Index cols)
      : mean(ComplexMatrix<Real>::Zero(rows, cols)), m2(RealMatrix<Real>::Zero(rows, cols)) {}

  template <typename Derived>
  void add(const Eigen::MatrixBase<Derived>& x) {
    ++count;
    const ComplexMatrix<Real> delta = x - mean;
    mean += delta / Real(count);
    m2.array() += (delta.array() * (x - mean).array().conjugate()).real();
  }

  void merge(const RunningMean& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const Real total = Real(count + other.count);
    const ComplexMatrix<Real> delta = other.mean - mean;
    mean += delta * (Real(other.count) / total);
    m2 += other.m2 + delta.cwiseAbs2() * (Real(count) * Real(other.count) / total);
    count += other.count;
  }

  /// Standard error of each entry of the mean.
  RealMatrix<Real> standard_error() const {
    if (count < 2) return RealMatrix<Real>::Zero(mean.rows(), mean.cols());
    return (m2 / (Real(count - 1) * Real(count))).cwiseSqrt();
  }
};

/// Number of samples assigned to `stream` when `samples` are split over
/// `streams` (the first samples % streams streams take one extra).
inline std::int64_t stream_share(std::int64_t samples, int streams, int stream) {
  return samples / streams + (stream < samples % streams ? 1 : 0);
}

/// Runs `per_stream(stream, count)` for every stream and folds the results
/// with `merge(left, right)` over a fixed pairwise tree, so the outcome is
/// independent of the thread count.
template <typename Acc, typename PerStream, typename Merge>
Acc reduce_streams(const SamplerConfig& cfg, std::int64_t samples, PerStream per_stream, Merge merge) {
  if (cfg.stream_count < 1) throw Error("index_range", "stream_count must be >= 1");
  const int streams = cfg.stream_count;
  std::vector<Acc> parts(std::size_t(streams), Acc{});
  const int workers = std::max(1, std::min(cfg.threads, streams));
  auto work = [&](int worker) {
    for (int s = worker; s < streams; s += workers)
      parts[std::size_t(s)] = per_stream(s, stream_share(samples, streams, s));
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
  }
  for (std::size_t width = 1; width < parts.size(); width *= 2)
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) merge(parts[i], parts[i + width]);
  return std::move(parts.front());
}

struct MomentRatioCheck {
  std::vector<int> powers;  // monomial prod |z_i|^{2 powers_i}
  double gaussian_mean = 0, gaussian_se = 0;
  double sphere_mean = 0, sphere_se = 0;
  double ratio = 0, ratio_se = 0;
  double expected_ratio = 0;
  double relative_deviation = 0;
  double z_score = 0;
};

struct GaussianSphereReport {
  int r = 0, half_degree = 0;
  std::int64_t trials = 0;
  std::vector<MomentRatioCheck> checks;
  double max_relative_deviation = 0;
  double max_z_score = 0;
};

/// Monte Carlo check that Gaussian and sphere moments of degree 2N differ
/// by Gamma(N + r) / Gamma(r).
///
/// Monomials are the nonvanishing ones, prod |z_i|^{2 a_i} with sum a_i = N.
/// `monomials` of them are picked deterministically from the seed (the
/// first is always |z_1|^{2N}). The Gaussian side uses an independent key.
inline GaussianSphereReport gaussian_vs_sphere_check(int r, int half_degree, std::int64_t trials,
                                                     const SamplerConfig& cfg, int monomials = 3) {
  if (r < 1 || half_degree < 0 || trials < 2) throw Error("index_range", "need r >= 1, N >= 0, trials >= 2");
  GaussianSphereReport report{r, half_degree, trials, {}, 0, 0};

  std::vector<std::vector<int>> picks;
  {
    std::vector<int> first(std::size_t(r), 0);
    first[0] = half_degree;
    picks.push_back(first);
    const auto key = detail::key_of(cfg.seed ^ 0x5bd1e995u);
    for (int m = 1; m < monomials; ++m) {
      std::vector<int> powers(std::size_t(r), 0);
      for (int unit = 0; unit < half_degree; ++unit) {
        const auto bits = philox4x32_10({std::uint32_t(m), std::uint32_t(unit), 0u, 0u}, key);
        ++powers[bits[0] % std::uint32_t(r)];
      }
      picks.push_back(powers);
    }
  }

  const std::uint64_t gaussian_seed = cfg.seed ^ 0x9E3779B97F4A7C15ull;
  const auto count = Eigen::Index(picks.size());
  using Acc = RunningMean<double>;
  auto merge = [](Acc& x, const Acc& y) { x.merge(y); };

  auto sphere = reduce_streams<Acc>(cfg, trials, [&](int s, std::int64_t n) {
    Acc acc(count, 1);
    ComplexVector<double> vals(count);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto z = sample_direction<double>(cfg, s, i, r);
      for (Eigen::Index m = 0; m < count; ++m) vals(m) = MultiIndex::modulus(picks[std::size_t(m)]).evaluate(z);
      acc.add(vals);
    }
    return acc;
  }, merge);

  auto gauss = reduce_streams<Acc>(cfg, trials, [&](int s, std::int64_t n) {
    Acc acc(count, 1);
    ComplexVector<double> vals(count);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto z = gaussian_vector<double>(gaussian_seed, s, i, r);
      for (Eigen::Index m = 0; m < count; ++m) vals(m) = MultiIndex::modulus(picks[std::size_t(m)]).evaluate(z);
      acc.add(vals);
    }
    return acc;
  }, merge);

  const auto sphere_se = sphere.standard_error();
  const auto gauss_se = gauss.standard_error();
  const double expected = std::exp(std::lgamma(double(half_degree + r)) - std::lgamma(double(r)));
  for (Eigen::Index m = 0; m < count; ++m) {
    MomentRatioCheck c;
    c.powers = picks[std::size_t(m)];
    c.gaussian_mean = gauss.mean(m).real();
    c.gaussian_se = gauss_se(m);
    c.sphere_mean = sphere.mean(m).real();
    c.sphere_se = sphere_se(m);
    c.ratio = c.gaussian_mean / c.sphere_mean;
    c.ratio_se = std::abs(c.ratio) * std::hypot(c.gaussian_se / c.gaussian_mean, c.sphere_se / c.sphere_mean);
    c.expected_ratio = expected;
    c.relative_deviation = std::abs(c.ratio - expected) / expected;
    c.z_score = c.ratio_se > 0 ? std::abs(c.ratio - expected) / c.ratio_se
                               : (c.relative_deviation < 1e-12 ? 0.0 : HUGE_VAL);
    report.max_relative_deviation = std::max(report.max_relative_deviation, c.relative_deviation);
    report.max_z_score = std::max(report.max_z_score, c.z_score);
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace sphexp

#endif  // SPHEXP_SPHERE_HPP
