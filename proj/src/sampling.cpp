#include "amoment/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amoment/parallel.hpp"

namespace amoment {

namespace {

double log_ball_volume(int n, double radius) {
  // log of pi^{n/2} r^n / Gamma(n/2 + 1)
  return 0.5 * n * std::log(M_PI) + n * std::log(radius) - std::lgamma(0.5 * n + 1.0);
}

}  // namespace

void SampleDesign::validate(const Domain& domain) const {
  const int N = num_centers();
  const int n = dimension();
  if (epsilon <= 0.0) throw std::logic_error("SampleDesign: epsilon must be positive");
  if (static_cast<int>(counts.size()) != N || static_cast<int>(offsets.size()) != N + 1)
    throw std::logic_error("SampleDesign: counts/offsets size mismatch");
  if (neighbors.rows() != n)
    throw std::logic_error("SampleDesign: neighbor dimension mismatch");
  if (std::accumulate(counts.begin(), counts.end(), 0) != num_neighbors())
    throw std::logic_error("SampleDesign: counts do not sum to the neighbor total");
  for (int s = 0; s < N; ++s) {
    if (offsets[s + 1] - offsets[s] != counts[s])
      throw std::logic_error("SampleDesign: offsets inconsistent with counts");
    if (domain.boundary_distance(centers.col(s)) < epsilon)
      throw std::logic_error("SampleDesign: center outside the epsilon-interior");
    for (int t = s + 1; t < N; ++t)
      if ((centers.col(s) - centers.col(t)).norm() < 2.0 * epsilon)
        throw std::logic_error("SampleDesign: centers closer than 2*epsilon");
  }
  for (int j = 0; j < num_neighbors(); ++j) {
    const int s = assignment[j];
    if (s < 0 || s >= N) throw std::logic_error("SampleDesign: assignment out of range");
    if (j < offsets[s] || j >= offsets[s + 1])
      throw std::logic_error("SampleDesign: neighbors not grouped by center");
    const double d = (neighbors.col(j) - centers.col(s)).norm();
    if (!(d > 0.0 && d < epsilon))
      throw std::logic_error("SampleDesign: neighbor displacement not in (0, epsilon)");
  }
}

Matrix sample_centers(const Measure& measure, int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("sample_centers: N must be >= 1");
  const int n = measure.domain().dimension();
  Matrix X(n, N);
  for (int i = 0; i < N; ++i) {
    CounterRng rng(seed, derive_seed(seed, stream_tag::center, i));
    X.col(i) = measure.draw(rng);
  }
  return X;
}

double epsilon_max(const Matrix& X, const Domain& domain) {
  const int N = static_cast<int>(X.cols());
  if (N == 0) throw std::invalid_argument("epsilon_max: empty point cloud");
  double eps = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    if (!domain.contains(X.col(i)))
      throw std::invalid_argument("epsilon_max: point outside the domain");
    eps = std::min(eps, domain.boundary_distance(X.col(i)));
    for (int j = i + 1; j < N; ++j)
      eps = std::min(eps, 0.5 * (X.col(i) - X.col(j)).norm());
  }
  return eps;
}

bool is_feasible_radius(const Matrix& X, const Domain& domain, double epsilon) {
  const int N = static_cast<int>(X.cols());
  if (N == 0) throw std::invalid_argument("is_feasible_radius: empty point cloud");
  if (!(epsilon > 0.0)) return false;
  for (int i = 0; i < N; ++i) {
    if (!domain.contains(X.col(i)))
      throw std::invalid_argument("is_feasible_radius: point outside the domain");
    if (domain.boundary_distance(X.col(i)) < epsilon) return false;
  }
  // same expression as epsilon_max so the two predicates agree exactly
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      if (0.5 * (X.col(i) - X.col(j)).norm() < epsilon) return false;
  return true;
}

Vector uniform_in_ball(CounterRng& rng, const Vector& center, double radius) {
  const int n = static_cast<int>(center.size());
  Vector y(n);
  for (;;) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      y[i] = rng.next_normal();
      norm2 += y[i] * y[i];
    }
    if (norm2 <= 0.0) continue;
    const double r = radius * std::pow(rng.next_unit_open(), 1.0 / n);
    y = center + (r / std::sqrt(norm2)) * y;
    if ((y - center).norm() > 0.0) return y;
  }
}

std::vector<int> ball_choice_counts(int N_total, const std::vector<double>& masses,
                                    std::uint64_t seed) {
  const int N = static_cast<int>(masses.size());
  std::vector<double> cdf(N);
  double total = 0.0;
  for (int s = 0; s < N; ++s) {
    if (!(masses[s] > 0.0))
      throw std::invalid_argument("ball_choice_counts: ball masses must be positive");
    total += masses[s];
    cdf[s] = total;
  }
  std::vector<int> counts(N, 0);
  CounterRng rng(seed, stream_tag::ball_choice);
  for (int j = 0; j < N_total; ++j) {
    const double u = rng.next_unit() * total;
    const int s = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    ++counts[std::min(s, N - 1)];
  }
  return counts;
}

namespace {

// Per-ball mean density over uniform draws in the ball. The normalization
// and the (common) ball volume cancel in every ratio we form.
std::vector<double> mean_density_per_ball(const Matrix& X, double epsilon,
                                          const Measure& measure, int mc_samples,
                                          std::uint64_t seed) {
  const int N = static_cast<int>(X.cols());
  std::vector<double> mean(N, 1.0);
  if (measure.is_uniform()) return mean;
  for (int s = 0; s < N; ++s) {
    CounterRng rng(seed, derive_seed(seed, stream_tag::ball_mass, s));
    double acc = 0.0;
    for (int k = 0; k < mc_samples; ++k)
      acc += measure.density(uniform_in_ball(rng, X.col(s), epsilon));
    mean[s] = acc / mc_samples;
    if (!(mean[s] > 0.0))
      throw std::runtime_error("sample_neighbors: estimated ball mass is zero");
  }
  return mean;
}

SampleDesign assemble_design(const Matrix& X, double epsilon, const Matrix& points,
                             const std::vector<int>& point_ball, std::uint64_t seed) {
  const int N = static_cast<int>(X.cols());
  const int total = static_cast<int>(points.cols());
  SampleDesign d;
  d.centers = X;
  d.epsilon = epsilon;
  d.seed = seed;
  d.counts.assign(N, 0);
  for (int j = 0; j < total; ++j) ++d.counts[point_ball[j]];
  d.offsets.assign(N + 1, 0);
  std::partial_sum(d.counts.begin(), d.counts.end(), d.offsets.begin() + 1);
  d.neighbors.resize(X.rows(), total);
  d.assignment.resize(total);
  std::vector<int> cursor(d.offsets.begin(), d.offsets.end() - 1);
  for (int j = 0; j < total; ++j) {
    const int s = point_ball[j];
    d.neighbors.col(cursor[s]) = points.col(j);
    d.assignment[cursor[s]] = s;
    ++cursor[s];
  }
  return d;
}

}  // namespace

SampleDesign sample_neighbors(const Matrix& X, double epsilon, int N_total,
                              const Measure& measure, NeighborMode mode,
                              std::uint64_t seed, int threads) {
  const int N = static_cast<int>(X.cols());
  const int n = static_cast<int>(X.rows());
  if (N_total < 1) throw std::invalid_argument("sample_neighbors: N_total must be >= 1");
  if (n != measure.domain().dimension())
    throw std::invalid_argument("sample_neighbors: dimension mismatch");
  const double eps_x = epsilon_max(X, measure.domain());
  if (!(epsilon > 0.0) || epsilon > eps_x)
    throw std::invalid_argument("sample_neighbors: epsilon must lie in (0, epsilon_max(X)]");
  if (epsilon > measure.epsilon_mu())
    throw std::invalid_argument("sample_neighbors: epsilon exceeds the measure's epsilon_mu");

  // Exact sampling from the conditional measure coincides with the
  // two-phase scheme when the measure is uniform: disjoint balls of equal
  // radius carry equal mass.
  const bool two_phase = measure.is_uniform() || mode == NeighborMode::locally_uniform;

  if (two_phase) {
    const std::vector<double> masses =
        mean_density_per_ball(X, epsilon, measure, 2048, derive_seed(seed, stream_tag::ball_mass));
    const std::vector<int> counts = ball_choice_counts(N_total, masses, seed);
    SampleDesign d;
    d.centers = X;
    d.epsilon = epsilon;
    d.seed = seed;
    d.counts = counts;
    d.offsets.assign(N + 1, 0);
    std::partial_sum(counts.begin(), counts.end(), d.offsets.begin() + 1);
    d.neighbors.resize(n, N_total);
    d.assignment.resize(N_total);
    parallel_for(N, threads, [&](int s) {
      CounterRng rng(seed, derive_seed(seed, stream_tag::neighbor, s));
      for (int k = 0; k < counts[s]; ++k) {
        const int col = d.offsets[s] + k;
        d.neighbors.col(col) = uniform_in_ball(rng, X.col(s), epsilon);
        d.assignment[col] = s;
      }
    });
    return d;
  }

  // Exact mode for a non-uniform density: propose uniformly on the union of
  // (equal-volume, disjoint) balls and accept with probability
  // density(y)/bound. Each point owns a stream, so the retry loops stay
  // reproducible under parallelism.
  Matrix points(n, N_total);
  std::vector<int> point_ball(N_total);
  std::vector<char> failed(N_total, 0);
  parallel_for(N_total, threads, [&](int j) {
    CounterRng rng(seed, derive_seed(seed, stream_tag::exact_point, j));
    bool accepted = false;
    for (int attempt = 0; attempt < measure.max_attempts(); ++attempt) {
      const int s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(N)));
      const Vector y = uniform_in_ball(rng, X.col(s), epsilon);
      const double dens = measure.density(y);
      if (dens > measure.density_bound()) {
        failed[j] = 2;
        return;
      }
      if (rng.next_unit() * measure.density_bound() < dens) {
        points.col(j) = y;
        point_ball[j] = s;
        accepted = true;
        break;
      }
    }
    if (!accepted) failed[j] = 1;
  });
  for (int j = 0; j < N_total; ++j) {
    if (failed[j] == 2)
      throw std::runtime_error("sample_neighbors: density exceeds its declared bound");
    if (failed[j] == 1)
      throw std::runtime_error("sample_neighbors: rejection sampler exceeded attempt budget");
  }
  return assemble_design(X, epsilon, points, point_ball, seed);
}

SampleDesign make_equal_count_design(const Matrix& X, double epsilon, int count,
                                     const Measure& measure, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_equal_count_design: count must be >= 1");
  const int N = static_cast<int>(X.cols());
  const double eps_x = epsilon_max(X, measure.domain());
  if (!(epsilon > 0.0) || epsilon > eps_x)
    throw std::invalid_argument("make_equal_count_design: epsilon must lie in (0, epsilon_max(X)]");
  SampleDesign d;
  d.centers = X;
  d.epsilon = epsilon;
  d.seed = seed;
  d.min_count = count;
  d.counts.assign(N, count);
  d.offsets.assign(N + 1, 0);
  std::partial_sum(d.counts.begin(), d.counts.end(), d.offsets.begin() + 1);
  d.neighbors.resize(X.rows(), N * count);
  d.assignment.resize(N * count);
  for (int s = 0; s < N; ++s) {
    CounterRng rng(seed, derive_seed(seed, stream_tag::neighbor, s));
    for (int k = 0; k < count; ++k) {
      d.neighbors.col(d.offsets[s] + k) = uniform_in_ball(rng, X.col(s), epsilon);
      d.assignment[d.offsets[s] + k] = s;
    }
  }
  return d;
}

double ball_mass(const Measure& measure, const Vector& x, double epsilon,
                 int mc_samples, std::uint64_t seed, double* std_err) {
  if (measure.domain().boundary_distance(x) < epsilon)
    throw std::invalid_argument("ball_mass: ball not contained in the domain");
  if (measure.is_uniform()) {
    if (std_err) *std_err = 0.0;
    return std::exp(log_ball_volume(measure.domain().dimension(), epsilon) -
                    measure.domain().log_volume());
  }
  // mu(B) = int_B density / int_D density, both integrals by Monte Carlo.
  CounterRng ball_rng(seed, stream_tag::ball_mass);
  CounterRng dom_rng(seed, derive_seed(seed, stream_tag::ball_mass, 1));
  double num = 0.0, num2 = 0.0, den = 0.0, den2 = 0.0;
  for (int k = 0; k < mc_samples; ++k) {
    const double dn = measure.density(uniform_in_ball(ball_rng, x, epsilon));
    num += dn;
    num2 += dn * dn;
    Vector u(x.size());
    for (int i = 0; i < u.size(); ++i)
      u[i] = measure.domain().lower()[i] +
             (measure.domain().upper()[i] - measure.domain().lower()[i]) * dom_rng.next_unit();
    const double dd = measure.density(u);
    den += dd;
    den2 += dd * dd;
  }
  num /= mc_samples;
  den /= mc_samples;
  if (!(den > 0.0)) throw std::runtime_error("ball_mass: domain integral estimate is zero");
  const double log_ratio = log_ball_volume(measure.domain().dimension(), epsilon) -
                           measure.domain().log_volume();
  const double mass = std::exp(log_ratio) * num / den;
  if (std_err) {
    const double se_num = std::sqrt(std::max(num2 / mc_samples - num * num, 0.0) / mc_samples);
    const double se_den = std::sqrt(std::max(den2 / mc_samples - den * den, 0.0) / mc_samples);
    const double rel = std::sqrt((num > 0 ? se_num / num : 0.0) * (num > 0 ? se_num / num : 0.0) +
                                 (se_den / den) * (se_den / den));
    *std_err = mass * rel;
  }
  return mass;
}

double rho(const SampleDesign& design, const Measure& measure, int mc_samples,
           std::uint64_t seed) {
  const int N = design.num_centers();
  if (measure.is_uniform() || N == 1) return 1.0;
  const std::vector<double> mean = mean_density_per_ball(
      design.centers, design.epsilon, measure, mc_samples, seed);
  const double total = std::accumulate(mean.begin(), mean.end(), 0.0);
  const double lo = *std::min_element(mean.begin(), mean.end());
  return N * lo / total;
}

}  // namespace amoment
