#include "amoment/verify.hpp"

#include <cmath>

#include "amoment/gradients.hpp"
#include "amoment/sampling.hpp"

namespace amoment {

namespace {

// Uniform direction on the sphere; the radial part of a uniform-in-ball
// draw never enters a projection.
Vector unit_direction(CounterRng& rng, int n) {
  Vector u(n);
  for (;;) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] = rng.next_normal();
      norm2 += u[i] * u[i];
    }
    if (norm2 > 0.0) return u / std::sqrt(norm2);
  }
}

}  // namespace

CheckResult check_isotropy_first_moment(int n, long long samples, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("check_isotropy_first_moment: n >= 1 required");
  CounterRng rng(seed, 0x150f1);
  MatrixMoments moments(n, n);
  for (long long k = 0; k < samples; ++k) {
    const Vector u = unit_direction(rng, n);
    moments.add(u * u.transpose());
  }
  CheckResult res;
  res.name = "isotropy_first_moment_n" + std::to_string(n) + " (threshold=5*sigma_mc)";
  res.statistic = (moments.mean() - Matrix::Identity(n, n) / n).norm();
  res.sigma_mc = moments.frobenius_std_error();
  res.threshold = 5.0 * res.sigma_mc;
  res.passed = res.statistic <= res.threshold;
  res.samples_used = samples;
  res.seed = seed;
  return res;
}

CheckResult check_isotropy_second_moment(int n, const Vector& g, long long samples,
                                         std::uint64_t seed) {
  if (g.size() != n) throw std::invalid_argument("check_isotropy_second_moment: dimension mismatch");
  if (!(g.norm() > 0.0)) throw std::invalid_argument("check_isotropy_second_moment: zero vector");
  CounterRng rng(seed, 0x150f2);
  MatrixMoments moments(n, n);
  for (long long k = 0; k < samples; ++k) {
    const Vector u = unit_direction(rng, n);
    const Vector pg = u * u.dot(g);
    moments.add(pg * pg.transpose());
  }
  const Matrix target =
      (2.0 * g * g.transpose() + g.squaredNorm() * Matrix::Identity(n, n)) /
      (static_cast<double>(n) * (n + 2.0));
  CheckResult res;
  res.name = "isotropy_second_moment_n" + std::to_string(n) +
             " (threshold=5*sigma_mc+fp floor)";
  res.statistic = (moments.mean() - target).norm();
  res.sigma_mc = moments.frobenius_std_error();
  // the fp floor covers rounding of the closed-form target, which is the
  // whole statistic in the degenerate n=1 case
  res.threshold = 5.0 * res.sigma_mc + 1e-13 * target.norm();
  res.passed = res.statistic <= res.threshold;
  res.samples_used = samples;
  res.seed = seed;
  return res;
}

CheckResult check_beta_law(int n, long long samples, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("check_beta_law: n >= 2 required (degenerate at n=1)");
  CounterRng rng(seed, 0xbe7a);
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (long long k = 0; k < samples; ++k) {
    const Vector u = unit_direction(rng, n);
    t[static_cast<std::size_t>(k)] = u[0] * u[0];  // ||P e_1||^2
  }
  const double a = 0.5, b = 0.5 * (n - 1);
  const double d = ks_statistic(std::move(t), [a, b](double x) {
    return regularized_incomplete_beta(a, b, x);
  });
  CheckResult res;
  res.name = "beta_law_n" + std::to_string(n) + " (threshold=KS critical, alpha=0.001)";
  res.statistic = d;
  res.threshold = kolmogorov_critical(1e-3) / std::sqrt(static_cast<double>(samples));
  res.sigma_mc = 0.0;
  res.passed = res.statistic <= res.threshold;
  res.samples_used = samples;
  res.seed = seed;
  return res;
}

CheckResult check_tail_assumption(int n, long long samples,
                                  const std::vector<double>& betas, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("check_tail_assumption: n >= 2 required");
  if (betas.empty()) throw std::invalid_argument("check_tail_assumption: empty beta list");
  std::vector<double> sorted = betas;
  std::sort(sorted.begin(), sorted.end());

  CounterRng rng(seed, 0x7a11);
  std::vector<long long> hits(sorted.size(), 0);
  for (long long k = 0; k < samples; ++k) {
    const Vector u = unit_direction(rng, n);
    const double t = u[0] * u[0];
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (t > sorted[i] / n) ++hits[i];
  }
  std::vector<double> p(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    p[i] = static_cast<double>(hits[i]) / samples;

  CheckResult res;
  res.name = "tail_assumption_n" + std::to_string(n) +
             " (threshold=1+5*rel_sigma_mc, C fitted at smallest beta, K=1/2)";
  res.samples_used = samples;
  res.seed = seed;
  const double C = p[0] * std::exp(sorted[0] / 2.0);
  if (!(C > 0.0)) {
    // No exceedances even at the smallest beta; every bound holds vacuously.
    res.statistic = 0.0;
    res.threshold = 1.0;
    res.passed = true;
    return res;
  }
  double worst_ratio = 0.0;
  double worst_rel_se = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double ratio = p[i] * std::exp(sorted[i] / 2.0) / C;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      const double se_i = p[i] > 0.0
          ? std::sqrt(p[i] * (1.0 - p[i]) / samples) / p[i] : 0.0;
      const double se_0 = std::sqrt(p[0] * (1.0 - p[0]) / samples) / p[0];
      worst_rel_se = std::sqrt(se_i * se_i + se_0 * se_0);
    }
  }
  res.statistic = worst_ratio;
  res.sigma_mc = worst_rel_se;
  res.threshold = 1.0 + 5.0 * worst_rel_se;
  res.passed = res.statistic <= res.threshold;
  return res;
}

CheckResult check_neighbor_concentration(int N, int N_total, int trials,
                                         std::uint64_t seed) {
  if (N < 1 || N_total < 1 || trials < 1)
    throw std::invalid_argument("check_neighbor_concentration: positive sizes required");
  const std::vector<double> masses(N, 1.0);
  const double expected = static_cast<double>(N_total) / N;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const std::vector<int> counts =
        ball_choice_counts(N_total, masses, derive_seed(seed, stream_tag::replication, t));
    for (int c : counts) {
      if (c < 0.5 * expected || c > 1.5 * expected) {
        ++failures;
        break;
      }
    }
  }
  CheckResult res;
  res.name = "neighbor_concentration_N" + std::to_string(N) + "_M" +
             std::to_string(N_total) + " (threshold=1% failing trials)";
  res.statistic = static_cast<double>(failures) / trials;
  res.threshold = 0.01;
  res.sigma_mc = std::sqrt(res.statistic * (1.0 - res.statistic) / trials);
  res.passed = res.statistic <= res.threshold;
  res.samples_used = static_cast<long long>(trials) * N_total;
  res.seed = seed;
  return res;
}

CheckResult check_unbiasedness_special_case(const TargetFunction& f,
                                            const Measure& measure, const Matrix& X,
                                            double epsilon, int equal_count,
                                            int replications, std::uint64_t seed) {
  if (!measure.is_uniform())
    throw std::invalid_argument("check_unbiasedness_special_case: uniform measure required");
  if (!f.has_gradient())
    throw std::logic_error("check_unbiasedness_special_case: analytic gradient required");
  const int n = static_cast<int>(X.rows());
  const MomentEstimate oracle = oracle_estimate(f, X);
  MatrixMoments moments(n, n);
  for (int rep = 0; rep < replications; ++rep) {
    const SampleDesign d = make_equal_count_design(
        X, epsilon, equal_count, measure, derive_seed(seed, stream_tag::replication, rep));
    moments.add(ideal_debiased_estimate(f, d).matrix);
  }
  CheckResult res;
  res.name = "unbiasedness_special_case (threshold=5*sigma_mc)";
  res.statistic = (moments.mean() - oracle.matrix).norm();
  res.sigma_mc = moments.frobenius_std_error();
  res.threshold = n == 1 ? std::max(5.0 * res.sigma_mc, 1e-12) : 5.0 * res.sigma_mc;
  res.passed = res.statistic <= res.threshold;
  res.samples_used = static_cast<long long>(replications) * X.cols() * equal_count;
  res.seed = seed;
  return res;
}

CheckResult check_unbiasedness_special_case(const TargetFunction& f,
                                            const Measure& measure,
                                            const SampleDesign& design_template,
                                            int replications, std::uint64_t seed) {
  for (int c : design_template.counts)
    if (c != design_template.min_count)
      throw std::invalid_argument(
          "check_unbiasedness_special_case: unequal neighbor counts supplied");
  return check_unbiasedness_special_case(f, measure, design_template.centers,
                                         design_template.epsilon,
                                         design_template.min_count, replications, seed);
}

CheckResult check_gradient_bias_bound(const TargetFunction& f, const Measure& measure,
                                      const Vector& x, double epsilon,
                                      long long samples, std::uint64_t seed) {
  if (!measure.is_uniform())
    throw std::invalid_argument("check_gradient_bias_bound: uniform measure required");
  if (!f.has_gradient() || !f.hessian_bound)
    throw std::logic_error("check_gradient_bias_bound: gradient and Hessian bound required");
  if (measure.domain().boundary_distance(x) < epsilon)
    throw std::invalid_argument("check_gradient_bias_bound: x too close to the boundary");
  const int n = f.dimension();
  CounterRng rng(seed, 0x6b1a5);
  const double fx = f(x);
  MatrixMoments moments(n, 1);
  Matrix y_neighbors(n, 1);
  Vector fy(1);
  for (long long k = 0; k < samples; ++k) {
    y_neighbors.col(0) = uniform_in_ball(rng, x, epsilon);
    fy[0] = f(y_neighbors.col(0));
    moments.add(fd_gradient_from_values(x, fx, y_neighbors, fy));
  }
  const double deterministic = epsilon * (*f.hessian_bound) * n / 2.0;
  char eps_label[32];
  std::snprintf(eps_label, sizeof(eps_label), "%.3g", epsilon);
  CheckResult res;
  res.name = std::string("gradient_bias_bound_eps") + eps_label +
             " (threshold=eps*Hf*n/2+5*sigma_mc)";
  res.statistic = (Vector(moments.mean()) - f.gradient(x)).norm();
  res.sigma_mc = moments.frobenius_std_error();
  res.threshold = deterministic + 5.0 * res.sigma_mc;
  res.passed = res.statistic <= res.threshold;
  res.samples_used = samples;
  res.seed = seed;
  return res;
}

std::vector<RegisteredCheck> standard_checks() {
  std::vector<RegisteredCheck> checks;
  auto add = [&checks](std::string name, bool control,
                       std::function<CheckResult(std::uint64_t)> run) {
    checks.push_back({std::move(name), control, std::move(run)});
  };

  for (int n : {1, 3, 10}) {
    add("isotropy_first_moment_n" + std::to_string(n), false, [n](std::uint64_t s) {
      return check_isotropy_first_moment(n, 1000000, s);
    });
    add("isotropy_second_moment_n" + std::to_string(n), false, [n](std::uint64_t s) {
      return check_isotropy_second_moment(n, random_vector(n, derive_seed(s, 0x99, n)),
                                          1000000, s);
    });
  }
  for (int n : {2, 5, 10, 50}) {
    add("beta_law_n" + std::to_string(n), false, [n](std::uint64_t s) {
      return check_beta_law(n, 100000, s);
    });
  }
  add("tail_assumption_n20", false, [](std::uint64_t s) {
    return check_tail_assumption(20, 1000000, {2.0, 4.0, 8.0}, s);
  });
  add("neighbor_concentration", false, [](std::uint64_t s) {
    return check_neighbor_concentration(20, 2000, 1000, s);
  });
  // Starved budget: must fail; guards against vacuous thresholds.
  add("neighbor_concentration_starved", true, [](std::uint64_t s) {
    return check_neighbor_concentration(20, 40, 1000, s);
  });
  add("unbiasedness_special_case", false, [](std::uint64_t s) {
    const int n = 5;
    const Measure measure = Measure::uniform(Domain::hypercube(n));
    const Matrix A = random_symmetric(n, derive_seed(s, 0xA, 0));
    const Vector b = random_vector(n, derive_seed(s, 0xB, 0));
    const TargetFunction f = make_quadratic(A, b);
    const Matrix X = sample_centers(measure, 10, derive_seed(s, 0xC, 0));
    const double eps = std::min(1e-2, 0.9 * epsilon_max(X, measure.domain()));
    return check_unbiasedness_special_case(f, measure, X, eps, 8, 10000, s);
  });
  for (auto [label, eps] : {std::pair{"1e-2", 1e-2}, std::pair{"1e-3", 1e-3}}) {
    add(std::string("gradient_bias_eps") + label, false, [eps](std::uint64_t s) {
      const int n = 10;
      const Measure measure = Measure::uniform(Domain::hypercube(n));
      const TargetFunction f = make_quadratic(random_symmetric(n, derive_seed(s, 0xD, 0)),
                                              random_vector(n, derive_seed(s, 0xE, 0)));
      return check_gradient_bias_bound(f, measure, Vector::Zero(n), eps, 100000, s);
    });
  }
  return checks;
}

}  // namespace amoment
