#pragma once

#include <cstdint>
#include <vector>

#include "amoment/domain.hpp"

namespace amoment {

// The two-stage sample the estimators consume: N centers drawn from the
// measure and N_total neighbors drawn from the conditional measure on the
// union of the epsilon-balls, partitioned by center. Neighbor columns are
// grouped by center in index order.
struct SampleDesign {
  Matrix centers;               // n x N
  double epsilon = 0.0;
  Matrix neighbors;             // n x N_total
  std::vector<int> assignment;  // center index per neighbor column, non-decreasing
  std::vector<int> counts;      // neighbors per center, size N
  std::vector<int> offsets;     // prefix sums of counts, size N+1
  int min_count = 1;            // per-center inclusion threshold used downstream
  std::uint64_t seed = 0;

  int dimension() const { return static_cast<int>(centers.rows()); }
  int num_centers() const { return static_cast<int>(centers.cols()); }
  int num_neighbors() const { return static_cast<int>(neighbors.cols()); }

  // Contiguous block of the columns assigned to center s.
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> neighbors_of(int s) const {
    return neighbors.middleCols(offsets[s], counts[s]);
  }

  SampleDesign with_min_count(int m) const {
    SampleDesign d = *this;
    d.min_count = m;
    return d;
  }

  // Checks every structural invariant: 0 < ||y - x_s|| < epsilon, centers
  // 2*epsilon-separated and inside the epsilon-interior, counts consistent.
  // Throws std::logic_error on the first violation.
  void validate(const Domain& domain) const;
};

enum class NeighborMode { exact, locally_uniform };

// N i.i.d. draws from the measure, one counter-based stream per center.
Matrix sample_centers(const Measure& measure, int N, std::uint64_t seed);

// Largest radius for which X is 2*eps-separated and inside the eps-interior:
// min( min_{i<j} ||x_i - x_j||/2, min_i boundary_distance(x_i) ).
double epsilon_max(const Matrix& X, const Domain& domain);

// epsilon <= epsilon_max(X, domain), with early exit; the cheap boundary
// test runs before the quadratic pairwise scan, so resample loops reject
// infeasible clouds in O(N n).
bool is_feasible_radius(const Matrix& X, const Domain& domain, double epsilon);

// Draws N_total neighbors from the conditional measure on the union of
// epsilon-balls (exact mode), or by the two-phase scheme that picks a ball
// with probability proportional to its mass and then samples uniformly
// within it (locally_uniform mode). The two coincide for the uniform
// measure with disjoint interior balls.
SampleDesign sample_neighbors(const Matrix& X, double epsilon, int N_total,
                              const Measure& measure, NeighborMode mode,
                              std::uint64_t seed, int threads = 1);

// Conditioning construction used by the unbiasedness checks: every center
// receives exactly `count` neighbors, uniform in its ball.
SampleDesign make_equal_count_design(const Matrix& X, double epsilon, int count,
                                     const Measure& measure, std::uint64_t seed);

// Probability mass of the epsilon-ball around x. Exact volume ratio for the
// uniform measure; Monte-Carlo for a density, with the standard error
// written to *std_err when requested.
double ball_mass(const Measure& measure, const Vector& x, double epsilon,
                 int mc_samples = 8192, std::uint64_t seed = 0x6d61737365ULL,
                 double* std_err = nullptr);

// rho = N * min_x mu(B_x) / mu(B_X); equals 1 for the uniform measure with
// disjoint balls. For densities the common factors cancel, so only the
// per-ball mean densities are estimated.
double rho(const SampleDesign& design, const Measure& measure,
           int mc_samples = 8192, std::uint64_t seed = 0x72686fULL);

// Uniform point in the open ball of the given radius: isotropic direction
// times radius * U^(1/n). Resamples on (measure-zero) zero displacement.
Vector uniform_in_ball(CounterRng& rng, const Vector& center, double radius);

// One multinomial draw of ball occupation counts given per-ball
// probabilities; the ball-choice phase of the two-phase sampler, exposed
// for the neighbor-concentration check.
std::vector<int> ball_choice_counts(int N_total, const std::vector<double>& masses,
                                    std::uint64_t seed);

}  // namespace amoment
