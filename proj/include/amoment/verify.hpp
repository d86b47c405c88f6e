#pragma once

#include <string>
#include <vector>

#include "amoment/estimators.hpp"
#include "amoment/stats.hpp"

namespace amoment {

// One statistical check: passed iff statistic <= threshold. The threshold
// construction (5*sigma_mc, deterministic bound + 5*sigma_mc, KS critical
// value, ...) is recorded in the name.
struct CheckResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  double sigma_mc = 0.0;
  bool passed = false;
  long long samples_used = 0;
  std::uint64_t seed = 0;
};

// || mean of P over uniform-ball draws - I/n ||_F against 5*sigma_mc.
CheckResult check_isotropy_first_moment(int n, long long samples, std::uint64_t seed);

// || mean of P g g^T P - (2 g g^T + ||g||^2 I) / (n(n+2)) ||_F against
// 5*sigma_mc.
CheckResult check_isotropy_second_moment(int n, const Vector& g, long long samples,
                                         std::uint64_t seed);

// KS distance of ||P v||^2 samples from beta(1/2, (n-1)/2) against the
// 0.1%-level critical value. Requires n >= 2.
CheckResult check_beta_law(int n, long long samples, std::uint64_t seed);

// Empirical Pr[||P v||^2 > beta/n] <= C exp(-beta/2) with C fitted at the
// smallest beta; statistic is the worst ratio across the remaining betas.
CheckResult check_tail_assumption(int n, long long samples,
                                  const std::vector<double>& betas, std::uint64_t seed);

// Fraction of seeded trials in which some ball count leaves
// [1/2, 3/2] * (N_total / N); must stay below 1%.
CheckResult check_neighbor_concentration(int N, int N_total, int trials,
                                         std::uint64_t seed);

// Mean over replications of the ideal debiased estimate against the
// gradient-oracle estimate on the same centers, with every center forced to
// exactly `equal_count` = min_count neighbors (the conditioning under which
// the estimator is exactly unbiased).
CheckResult check_unbiasedness_special_case(const TargetFunction& f,
                                            const Measure& measure, const Matrix& X,
                                            double epsilon, int equal_count,
                                            int replications, std::uint64_t seed);

// Variant taking a prepared design; throws if its counts are not all equal
// to its min_count.
CheckResult check_unbiasedness_special_case(const TargetFunction& f,
                                            const Measure& measure,
                                            const SampleDesign& design_template,
                                            int replications, std::uint64_t seed);

// || MC mean of the finite-difference gradient - grad f(x) ||_2 against
// eps * H_f * n / 2 + 5*sigma_mc, single-neighbor draws.
CheckResult check_gradient_bias_bound(const TargetFunction& f, const Measure& measure,
                                      const Vector& x, double epsilon,
                                      long long samples, std::uint64_t seed);

struct RegisteredCheck {
  std::string name;
  bool negative_control = false;  // expected to FAIL
  std::function<CheckResult(std::uint64_t)> run;
};

// The standard suite: the distributional identities at the sizes the
// acceptance protocol uses, the concentration check with its starved
// negative control, the unbiasedness special case and the gradient bias
// bounds.
std::vector<RegisteredCheck> standard_checks();

}  // namespace amoment
