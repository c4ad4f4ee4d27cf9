#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "deception/rng.hpp"
#include "deception/stats.hpp"
#include "oracles/t_oracle.hpp"

using namespace deception::stats;

namespace {

std::vector<double> normal_sample(deception::Rng& rng, std::size_t n, double mu, double sd) {
  // Box-Muller keeps the draws tied to the project Rng.
  std::vector<double> out;
  while (out.size() < n) {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(mu + sd * r * std::cos(2 * M_PI * u2));
    if (out.size() < n) out.push_back(mu + sd * r * std::sin(2 * M_PI * u2));
  }
  return out;
}

}  // namespace

TEST_CASE("single-sample example") {
  const std::vector<double> xs{0.6, 0.7, 0.8};
  const auto r = single_sample_ttest(xs, 0.5);
  CHECK(r.statistic == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(r.df == 2.0);
  CHECK(std::abs(r.p_two_tailed - 0.0742) < 1e-4);
  CHECK(std::abs(r.p_two_tailed - oracle::two_tailed_p(r.statistic, r.df)) < 1e-10);
  REQUIRE(r.means.size() == 1);
  CHECK(r.means[0] == doctest::Approx(0.7));
}

TEST_CASE("mean equal to the reference gives p = 1") {
  const std::vector<double> xs{0.4, 0.5, 0.6};
  const auto r = single_sample_ttest(xs, 0.5);
  CHECK(std::abs(r.statistic) < 1e-12);
  CHECK(r.p_two_tailed == doctest::Approx(1.0));
}

TEST_CASE("pooled two-sample example") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6};
  const auto r = two_sample_ttest(a, b, Variance::pooled);
  CHECK(r.statistic == doctest::Approx(-3.6742).epsilon(1e-4));
  CHECK(r.df == 4.0);
  CHECK(std::abs(r.p_two_tailed - 0.0213) < 1e-4);
  CHECK(std::abs(r.p_two_tailed - oracle::two_tailed_p(r.statistic, r.df)) < 1e-10);

  // Equal variances and sizes: Welch has the same statistic and df here.
  const auto w = two_sample_ttest(a, b);
  CHECK(w.statistic == doctest::Approx(r.statistic));
  CHECK(w.df == doctest::Approx(4.0));
}

TEST_CASE("Welch degrees of freedom") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{2.0, 6.0, 10.0};
  const auto r = two_sample_ttest(a, b);
  const double va = 5.0 / 3.0 / 4.0;
  const double vb = 16.0 / 3.0;
  const double df = (va + vb) * (va + vb) / (va * va / 3.0 + vb * vb / 2.0);
  CHECK(r.df == doctest::Approx(df).epsilon(1e-12));
  CHECK(r.statistic == doctest::Approx((2.5 - 6.0) / std::sqrt(va + vb)).epsilon(1e-12));
  CHECK(std::abs(r.p_two_tailed - oracle::two_tailed_p(r.statistic, r.df)) < 1e-10);
}

TEST_CASE("identical samples give t = 0, p = 1") {
  const std::vector<double> a{0.2, 0.4, 0.9, 0.3};
  for (auto v : {Variance::welch, Variance::pooled}) {
    const auto r = two_sample_ttest(a, a, v);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_two_tailed == 1.0);
  }
}

TEST_CASE("insufficient data is rejected") {
  const std::vector<double> one{0.5};
  const std::vector<double> flat{0.5, 0.5, 0.5};
  const std::vector<double> ok{0.1, 0.2};
  CHECK_THROWS_AS(single_sample_ttest(one, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(single_sample_ttest(flat, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(two_sample_ttest(one, ok), std::invalid_argument);
  CHECK_THROWS_AS(two_sample_ttest(flat, flat), std::invalid_argument);
  CHECK_NOTHROW(two_sample_ttest(flat, ok));
}

TEST_CASE("p falls as |t| grows") {
  for (double df : {1.0, 2.0, 3.5, 10.0, 34.0, 120.0}) {
    double prev = 1.0;
    for (double t = 0.05; t <= 8.0; t += 0.05) {
      const double p = student_t_two_tailed_p(t, df);
      CHECK(p < prev);
      CHECK(p == student_t_two_tailed_p(-t, df));
      prev = p;
    }
  }
}

TEST_CASE("tail probability agrees with quadrature") {
  for (double df : {1.0, 2.0, 4.0, 7.3, 19.0, 68.0}) {
    for (double t : {0.1, 0.7, 1.5, 2.1, 3.0, 5.0}) {
      CAPTURE(df);
      CAPTURE(t);
      CHECK(std::abs(student_t_two_tailed_p(t, df) - oracle::two_tailed_p(t, df)) < 1e-10);
    }
  }
}

TEST_CASE("high-mean synthetic data is significant") {
  deception::Rng rng(2024);
  const auto xs = normal_sample(rng, 35, 0.75, 0.1);
  const auto r = single_sample_ttest(xs, 0.5);
  CHECK(r.df == 34.0);
  CHECK(r.p_two_tailed < 1e-6);
  CHECK(std::abs(r.p_two_tailed - oracle::two_tailed_p(r.statistic, r.df)) < 1e-10);

  const auto early = normal_sample(rng, 30, 0.7, 0.15);
  const auto late = normal_sample(rng, 30, 0.45, 0.15);
  CHECK(two_sample_ttest(early, late).p_two_tailed < 0.05);
}

TEST_CASE("randomized datasets match the oracle") {
  deception::Rng rng(77);
  for (int k = 0; k < 20; ++k) {
    const auto n = 3 + rng.below(30);
    const auto a = normal_sample(rng, n, 0.5 + 0.05 * (rng.uniform() - 0.5), 0.2);
    const auto b = normal_sample(rng, 3 + rng.below(30), 0.55, 0.1 + 0.2 * rng.uniform());
    const auto one = single_sample_ttest(a, 0.5);
    const auto two = two_sample_ttest(a, b);
    CHECK(std::abs(one.p_two_tailed - oracle::two_tailed_p(one.statistic, one.df)) < 1e-6);
    CHECK(std::abs(two.p_two_tailed - oracle::two_tailed_p(two.statistic, two.df)) < 1e-6);
  }
}
