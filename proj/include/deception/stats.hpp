#pragma once

#include <span>
#include <vector>

namespace deception::stats {

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  std::vector<double> means;
};

enum class Variance { welch, pooled };

double mean(std::span<const double> xs);
// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

// P(|T| >= |t|) for Student's t with df degrees of freedom (df > 0, real).
double student_t_two_tailed_p(double t, double df);

// Throws std::invalid_argument for fewer than 2 samples or zero variance.
TestResult single_sample_ttest(std::span<const double> samples, double reference_mean);

// Throws std::invalid_argument if either side has fewer than 2 samples or
// both sides have zero variance.
TestResult two_sample_ttest(std::span<const double> a, std::span<const double> b,
                            Variance variant = Variance::welch);

}  // namespace deception::stats
