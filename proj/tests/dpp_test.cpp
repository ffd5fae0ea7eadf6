#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "dppbo/dpp.hpp"
#include "dppbo/errors.hpp"
#include "dppbo/rng.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace dppbo;

namespace {

DppKernel diag_kernel(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return DppKernel(v.asDiagonal());
}

}  // namespace

TEST_CASE("kernel validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(DppKernel{bad}, InputError);

  Rng rng(1);
  const DppKernel ok(oracle::random_psd(6, rng));
  CHECK_NOTHROW(ok.validate_psd());

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  const DppKernel k(indef);
  CHECK_THROWS_AS(k.validate_psd(), InputError);
}

TEST_CASE("for_each_subset is lexicographic and complete") {
  std::vector<SubsetSample> seen;
  for_each_subset(4, 2, [&](const SubsetSample& s) { seen.push_back(s); });
  REQUIRE(seen.size() == 6);
  CHECK(seen.front() == SubsetSample{0, 1});
  CHECK(seen[1] == SubsetSample{0, 2});
  CHECK(seen.back() == SubsetSample{2, 3});
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] < seen[i]);
}

TEST_CASE("kdpp_prob examples") {
  CHECK(kdpp_prob(diag_kernel({2.0, 3.0}), {0}) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(kdpp_prob(diag_kernel({2.0, 3.0}), {1}) == doctest::Approx(0.6).epsilon(1e-12));

  const DppKernel eye3(Eigen::MatrixXd::Identity(3, 3));
  for (const SubsetSample& s : {SubsetSample{0, 1}, SubsetSample{0, 2}, SubsetSample{1, 2}}) {
    CHECK(kdpp_prob(eye3, s) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  CHECK(kdpp_prob(diag_kernel({1.0, 0.0}), {1}) == doctest::Approx(0.0));

  const DppKernel big(Eigen::MatrixXd::Identity(26, 26));
  CHECK_THROWS_AS(kdpp_prob(big, {0}), CapacityError);
}

TEST_CASE("kdpp_prob normalizes and matches enumeration on random kernels") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_index(8));
    const Eigen::MatrixXd mat = oracle::random_psd(m, rng);
    const DppKernel kernel(mat);
    for (int k = 1; k <= std::min(m, 4); ++k) {
      const auto ref = oracle::kdpp_distribution(mat, k);
      double total = 0.0;
      for (const auto& [s, p] : ref) {
        const double got = kdpp_prob(kernel, s);
        CHECK(got == doctest::Approx(p).epsilon(1e-9));
        total += got;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("elementary symmetric polynomials") {
  Eigen::VectorXd lam(3);
  lam << 1.0, 2.0, 3.0;
  CHECK(elementary_symmetric(lam, 2) == doctest::Approx(11.0).epsilon(1e-14));
  CHECK(elementary_symmetric(lam, 0) == doctest::Approx(1.0));
  CHECK(elementary_symmetric(Eigen::VectorXd::Ones(4), 2) == doctest::Approx(6.0).epsilon(1e-14));

  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(rng.uniform_index(11));
    Eigen::VectorXd eigs(m);
    for (int i = 0; i < m; ++i) eigs[i] = 3.0 * rng.uniform01();
    for (int k = 0; k <= m; ++k) {
      CHECK(elementary_symmetric(eigs, k) ==
            doctest::Approx(oracle::elementary_symmetric_enum(eigs, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("exact sampler frequencies and determinism") {
  Rng rng(21);
  const DppKernel k23 = diag_kernel({2.0, 3.0});
  int first = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const SubsetSample s = kdpp_sample_exact(k23, 1, rng);
    REQUIRE(s.size() == 1);
    if (s[0] == 0) ++first;
  }
  CHECK(static_cast<double>(first) / n == doctest::Approx(0.4).epsilon(0.05));

  // k = m always returns the full set
  const DppKernel eye5(Eigen::MatrixXd::Identity(5, 5));
  CHECK(kdpp_sample_exact(eye5, 5, rng) == SubsetSample{0, 1, 2, 3, 4});

  // deterministic given the seed
  Rng a(777), b(777);
  const DppKernel rand_k(oracle::random_psd(8, rng));
  for (int i = 0; i < 25; ++i) CHECK(kdpp_sample_exact(rand_k, 3, a) == kdpp_sample_exact(rand_k, 3, b));

  // rank-deficient request is infeasible
  const DppKernel rank1(oracle::random_psd(5, rng, 1));
  CHECK_THROWS_AS(kdpp_sample_exact(rank1, 3, rng), InfeasibleError);
}

TEST_CASE("exact sampler matches enumeration on a random kernel") {
  Rng rng(33);
  const Eigen::MatrixXd mat = oracle::random_psd(5, rng);
  const DppKernel kernel(mat);
  const auto ref = oracle::kdpp_distribution(mat, 2);
  std::map<SubsetSample, double> emp;
  const int n = 40000;
  for (int i = 0; i < n; ++i) emp[kdpp_sample_exact(kernel, 2, rng)] += 1.0 / n;
  CHECK(stats::tv_distance(ref, emp) < 0.02);
}

TEST_CASE("mcmc sampler: initialization, frequencies, implicit kernel") {
  Rng rng(55);
  const Eigen::MatrixXd mat = oracle::random_psd(7, rng);
  const DppKernel kernel(mat);
  SubsetSample greedy = kdpp_greedy_max(kernel, 3);  // pick order
  std::sort(greedy.begin(), greedy.end());
  CHECK(kdpp_sample_mcmc(kernel, 3, 0, rng) == greedy);

  const DppKernel k23 = diag_kernel({2.0, 3.0});
  int first = 0;
  const int chains = 20000;
  for (int i = 0; i < chains; ++i) {
    if (kdpp_sample_mcmc(k23, 1, 50, rng)[0] == 0) ++first;
  }
  CHECK(static_cast<double>(first) / chains == doctest::Approx(0.4).epsilon(0.06));

  // implicit-kernel chain agrees with the explicit one under a shared stream
  auto entry = [&](int i, int j) { return mat(i, j); };
  Rng c1(101), c2(101);
  const SubsetSample init = kdpp_greedy_max(kernel, 3);
  for (int i = 0; i < 10; ++i) {
    CHECK(kdpp_sample_mcmc(kernel, 3, 200, c1) == kdpp_sample_mcmc_fn(entry, 7, 3, 200, init, c2));
  }

  CHECK(kdpp_mcmc_default_steps(7, 3) == static_cast<long>(10.0 * 7 * 3 * std::log(7.0)) + 1);
}

TEST_CASE("greedy MAP examples and approximation sanity") {
  CHECK(kdpp_greedy_max(diag_kernel({3.0, 2.0}), 1) == SubsetSample{0});

  Eigen::MatrixXd m3(3, 3);
  m3 << 2.0, 1.9, 0.0, 1.9, 2.0, 0.0, 0.0, 0.0, 1.5;
  CHECK(kdpp_greedy_max(DppKernel(m3), 2) == SubsetSample{0, 2});

  const DppKernel scaled(3.0 * Eigen::MatrixXd::Identity(6, 6));
  CHECK(kdpp_greedy_max(scaled, 4) == SubsetSample{0, 1, 2, 3});

  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 4 + static_cast<int>(rng.uniform_index(5));
    const int k = 2 + static_cast<int>(rng.uniform_index(3));
    const Eigen::MatrixXd mat = oracle::random_psd(m, rng);
    const auto dets = oracle::subset_dets(mat, k);
    double best = 0.0;
    for (const auto& [s, d] : dets) best = std::max(best, d);
    SubsetSample picked = kdpp_greedy_max(DppKernel(mat), k);
    std::sort(picked.begin(), picked.end());
    const double greedy_det = dets.at(picked);
    CHECK(greedy_det <= best + 1e-9);
    CHECK(greedy_det >= best / std::pow(2.0, k * std::max(1.0, std::log(k))) - 1e-12);
  }
}

TEST_CASE("entropy examples and the expectation identity") {
  CHECK(kdpp_entropy(DppKernel(2.0 * Eigen::MatrixXd::Identity(4, 4)), 2) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));
  CHECK(kdpp_entropy(diag_kernel({1.0, 0.0, 0.0}), 1) == doctest::Approx(0.0));
  CHECK(kdpp_entropy(diag_kernel({2.0, 3.0}), 1) ==
        doctest::Approx(-0.4 * std::log(0.4) - 0.6 * std::log(0.6)).epsilon(1e-12));
  CHECK(kdpp_entropy(diag_kernel({2.0, 3.0}), 1) == doctest::Approx(0.6730).epsilon(1e-4));

  // E[ln det K_S] = -H + ln sum det, by exact enumeration
  Rng rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 3 + static_cast<int>(rng.uniform_index(8));
    const int k = 1 + static_cast<int>(rng.uniform_index(std::min(m, 4)));
    const Eigen::MatrixXd mat = oracle::random_psd(m, rng);
    const auto dets = oracle::subset_dets(mat, k);
    double z = 0.0;
    for (const auto& [s, d] : dets) z += d;
    double expect_logdet = 0.0;
    for (const auto& [s, d] : dets) {
      if (d > 0.0) expect_logdet += (d / z) * std::log(d);
    }
    const double h = kdpp_entropy(DppKernel(mat), k);
    CHECK(h >= 0.0);
    CHECK(expect_logdet == doctest::Approx(-h + std::log(z)).epsilon(1e-9));
  }
}
