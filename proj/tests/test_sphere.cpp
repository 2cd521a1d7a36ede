#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_support.hpp"

#include "sphexp/random_matrix.hpp"
#include "sphexp/sphere.hpp"

#include <cstring>

using namespace sphexp;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("samples are unit vectors with rank-one projectors") {
  const SamplerConfig cfg{7, 3};
  for (int r : {1, 2, 5, 16}) {
    for (int s = 0; s < 3; ++s) {
      for (std::int64_t i = 0; i < 200; ++i) {
        const auto smp = sample_unit_vector<double>(cfg, s, i, r);
        CHECK(std::abs(smp.n.norm() - 1.0) <= 1e-14);
        CHECK((smp.w - smp.w.adjoint()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(std::abs(smp.w.trace() - 1.0) <= 1e-14);
        CHECK((smp.w * smp.w - smp.w).cwiseAbs().maxCoeff() <= 1e-13);
      }
    }
  }
}

TEST_CASE("sampling is deterministic in (seed, stream, index, r)") {
  const SamplerConfig cfg{42, 1};
  const auto x = sample_unit_vector<double>(cfg, 0, 7, 2);
  const auto y = sample_unit_vector<double>(cfg, 0, 7, 2);
  CHECK(std::memcmp(x.n.data(), y.n.data(), sizeof(std::complex<double>) * 2) == 0);
  const auto z = sample_unit_vector<double>(cfg, 0, 8, 2);
  CHECK(x.n != z.n);
  CHECK(sample_unit_vector<double>(SamplerConfig{43, 1}, 0, 7, 2).n != x.n);

  CHECK_THROWS_AS(sample_unit_vector<double>(cfg, 1, 0, 2), Error);
  CHECK_THROWS_AS(sample_unit_vector<double>(cfg, 0, 0, 0), Error);
}

TEST_CASE("E[w] = I/r") {
  const int r = 3;
  const SamplerConfig cfg{2024, 1};
  RunningMean<double> acc(r, r);
  for (std::int64_t i = 0; i < 1000000; ++i) acc.add(sample_unit_vector<double>(cfg, 0, i, r).w);
  const MatrixXcd expected = MatrixXcd::Identity(r, r) / 3.0;
  CHECK((acc.mean - expected).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("sphere_moment_exact") {
  CHECK(sphere_moment_exact(3, 2, MultiIndex::modulus({1, 0, 0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sphere_moment_exact(2, 4, MultiIndex::modulus({2, 0})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sphere_moment_exact(2, 2, MultiIndex{{1, 0}, {0, 1}}) == 0.0);
  CHECK(sphere_moment_exact(4, 0, MultiIndex::modulus({0, 0, 0, 0})) == doctest::Approx(1.0));

  try {
    sphere_moment_exact(2, 3, MultiIndex{{2, 0}, {1, 0}});
    FAIL("expected odd_degree_moment_zero");
  } catch (const Error& e) {
    CHECK(e.code() == "odd_degree_moment_zero");
  }
  CHECK_THROWS_AS(sphere_moment_exact(2, 4, MultiIndex::modulus({1, 0})), Error);
}

TEST_CASE("sphere moments against brute-force sampling") {
  const SamplerConfig cfg{99, 1};
  struct Case {
    int r;
    MultiIndex m;
    double tol;
    std::int64_t samples;
  };
  const std::vector<Case> cases{
      {2, MultiIndex::modulus({2, 0}), 1e-3, 10000000},
      {3, MultiIndex::modulus({1, 1, 0}), 2e-3, 1000000},
      {3, MultiIndex::modulus({2, 1, 0}), 2e-3, 1000000},
      {2, MultiIndex{{1, 0}, {0, 1}}, 2e-3, 1000000},
  };
  for (const auto& c : cases) {
    RunningMean<double> acc(1, 1);
    Eigen::Matrix<std::complex<double>, 1, 1> v;
    for (std::int64_t i = 0; i < c.samples; ++i) {
      v(0) = c.m.evaluate(sample_direction<double>(cfg, 0, i, c.r));
      acc.add(v);
    }
    const double exact = sphere_moment_exact(c.r, c.m.degree(), c.m);
    CAPTURE(c.r);
    CAPTURE(exact);
    CHECK(std::abs(acc.mean(0) - exact) <= c.tol);
  }
}

TEST_CASE("gaussian_vs_sphere_check") {
  const SamplerConfig cfg{5, 4};
  {
    const auto rep = gaussian_vs_sphere_check(1, 1, 100000, cfg);
    CHECK(rep.checks.front().expected_ratio == doctest::Approx(1.0));
    CHECK(rep.checks.front().sphere_mean == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.max_z_score <= 3.0);
  }
  for (auto [r, n, expected] : {std::tuple{2, 1, 2.0}, std::tuple{3, 2, 12.0}}) {
    const auto rep = gaussian_vs_sphere_check(r, n, 1000000, cfg);
    CAPTURE(r);
    CAPTURE(n);
    CHECK(rep.checks.front().expected_ratio == doctest::Approx(expected));
    CHECK(rep.max_z_score <= 3.0);
  }
  {
    const auto rep = gaussian_vs_sphere_check(3, 0, 1000, cfg);
    CHECK(rep.max_relative_deviation < 1e-12);
  }
  CHECK_THROWS_AS(gaussian_vs_sphere_check(0, 1, 100, cfg), Error);
}

TEST_CASE("quadratic form statistics are unitary invariant") {
  const int r = 4;
  const auto a = random_hermitian<double>(r, 1.0, 71);
  const MatrixXcd u = random_unitary<double>(r, 72);
  const SamplerConfig cfg{73, 1};
  RunningMean<double> plain(2, 1), rotated(2, 1);
  Eigen::Vector2cd v;
  for (std::int64_t i = 0; i < 100000; ++i) {
    const auto n = sample_direction<double>(cfg, 0, i, r);
    const double x = n.dot(a.matrix() * n).real();
    v << x, x * x;
    plain.add(v);
    const auto un = (u * n).eval();
    const double y = un.dot(a.matrix() * un).real();
    v << y, y * y;
    rotated.add(v);
  }
  const auto se_p = plain.standard_error(), se_r = rotated.standard_error();
  for (int k = 0; k < 2; ++k) {
    const double se = std::hypot(se_p(k), se_r(k));
    CHECK(std::abs(plain.mean(k) - rotated.mean(k)) <= 4 * se);
  }
  // E <An, n> = Tr(A) / r.
  const double expected = a.matrix().trace().real() / r;
  CHECK(std::abs(plain.mean(0).real() - expected) <= 4 * se_p(0));
}

TEST_CASE("stream reduction does not depend on the thread count") {
  const int r = 3;
  auto run = [&](int threads) {
    const SamplerConfig cfg{11, 7, threads};
    return reduce_streams<RunningMean<double>>(
        cfg, 10001,
        [&](int s, std::int64_t n) {
          RunningMean<double> acc(r, r);
          for (std::int64_t i = 0; i < n; ++i) acc.add(sample_unit_vector<double>(cfg, s, i, r).w);
          return acc;
        },
        [](RunningMean<double>& x, const RunningMean<double>& y) { x.merge(y); });
  };
  const auto one = run(1);
  const auto four = run(4);
  CHECK(one.count == 10001);
  CHECK(std::memcmp(one.mean.data(), four.mean.data(), sizeof(std::complex<double>) * 9) == 0);
  CHECK(std::memcmp(one.m2.data(), four.m2.data(), sizeof(double) * 9) == 0);
}

TEST_CASE("running mean merge matches a single pass") {
  const SamplerConfig cfg{3, 1};
  RunningMean<double> whole(2, 2), left(2, 2), right(2, 2);
  for (std::int64_t i = 0; i < 1000; ++i) {
    const auto w = sample_unit_vector<double>(cfg, 0, i, 2).w;
    whole.add(w);
    (i < 300 ? left : right).add(w);
  }
  left.merge(right);
  CHECK((left.mean - whole.mean).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((left.m2 - whole.m2).cwiseAbs().maxCoeff() < 1e-12);
}
