#include "deception/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace deception::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("variance needs at least 2 samples");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isnan(t)) throw std::invalid_argument("t statistic is NaN");
  if (t == 0.0) return 1.0;
  const boost::math::students_t dist(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::min(p, 1.0);
}

TestResult single_sample_ttest(std::span<const double> samples, double reference_mean) {
  if (samples.size() < 2) throw std::invalid_argument("t-test needs at least 2 samples");
  const double var = sample_variance(samples);
  if (!(var > 0.0)) throw std::invalid_argument("t-test sample has zero variance");
  const double n = static_cast<double>(samples.size());
  const double m = mean(samples);
  TestResult r;
  r.statistic = (m - reference_mean) / std::sqrt(var / n);
  r.df = n - 1.0;
  r.p_two_tailed = student_t_two_tailed_p(r.statistic, r.df);
  r.means = {m};
  return r;
}

TestResult two_sample_ttest(std::span<const double> a, std::span<const double> b, Variance variant) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("each sample needs at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sample_variance(a);
  const double vb = sample_variance(b);
  if (!(va > 0.0) && !(vb > 0.0)) throw std::invalid_argument("both samples have zero variance");
  const double ma = mean(a);
  const double mb = mean(b);

  TestResult r;
  r.means = {ma, mb};
  if (variant == Variance::pooled) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
    r.statistic = (ma - mb) / std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  } else {
    const double sa = va / na;
    const double sb = vb / nb;
    r.statistic = (ma - mb) / std::sqrt(sa + sb);
    r.df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  }
  r.p_two_tailed = student_t_two_tailed_p(r.statistic, r.df);
  return r;
}

}  // namespace deception::stats
