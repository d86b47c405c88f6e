#pragma once

#include "amoment/functions.hpp"
#include "amoment/gradients.hpp"
#include "amoment/sampling.hpp"

namespace amoment {

enum class EstimatorKind { oracle, naive, debiased, ideal_debiased };

const char* to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& s);

// A symmetric second-moment estimate with its provenance. Oracle estimates
// are PSD; the debiased kinds may be slightly indefinite because of the
// identity subtraction.
struct MomentEstimate {
  Matrix matrix;  // n x n, symmetrized on construction
  EstimatorKind kind = EstimatorKind::oracle;
  int n = 0;
  int N = 0;          // number of centers
  int N_total = 0;    // number of neighbors
  int N_min = 0;      // inclusion threshold
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int included_centers = 0;
};

// Scalar constants of the debiased estimator:
//   prefactor           = (1 + (1 - 2/n)/(1 + 2/n) / N_min)^(-1)
//   identity_denominator = (1 + 2/n) N_min + n + 1 - 2/n
struct DebiasScalars {
  double prefactor;
  double identity_denominator;
};

DebiasScalars debias_scalars(int n, int N_min);

struct DebiasOptions {
  // The estimator divides by the number of centers N even when some are
  // filtered out; dividing by the included count instead is exposed here
  // but off by default.
  bool normalize_by_included = false;
  int threads = 1;
};

// Sample mean of exact gradient outer products over the centers.
MomentEstimate oracle_estimate(const TargetFunction& f, const Matrix& X,
                               std::uint64_t seed = 0);

// Plain mean of finite-difference gradient outer products over all centers,
// no filtering and no debiasing. Biased; kept as the comparison baseline.
MomentEstimate naive_estimate(const TargetFunction& f, const SampleDesign& design,
                              int threads = 1);

// The debiased estimator: centers with fewer than design.min_count
// neighbors are dropped from the sum, each kept center contributes
// g g^T - ||g||^2 / identity_denominator * I with g the finite-difference
// gradient, and the total is scaled by prefactor / N.
MomentEstimate debiased_estimate(const TargetFunction& f, const SampleDesign& design,
                                 const DebiasOptions& options = {});

// Same combination built from the idealized projected gradients; requires
// the analytic gradient and evaluates f nowhere.
MomentEstimate ideal_debiased_estimate(const TargetFunction& f,
                                       const SampleDesign& design,
                                       const DebiasOptions& options = {});

// Monte-Carlo estimates of the measure regularity constants:
//   B'  = n   * sup_x || E_y[P] - I/n ||_2
//   B'' = n^2 * sup_x || E_y[P g g^T P] - (2 g g^T + ||g||^2 I)/(n(n+2)) ||_F
// with the sup taken over a seeded probe set of epsilon-interior points,
// and the assembled total
//   B = 2 B''/N_min + 4 B'(B' + 1) L_f^2 + 2 L_f^2 (1 + sqrt(n))/N_min.
struct BiasConstants {
  double b_prime = 0.0;
  double b_double_prime = 0.0;
  double b_total = 0.0;
  double b_prime_se = 0.0;        // Frobenius-aggregated MC standard error
  double b_double_prime_se = 0.0;
};

BiasConstants bias_constants(const Measure& measure, const TargetFunction& f,
                             double epsilon, int N_min, int mc_samples,
                             int probe_points = 8,
                             std::uint64_t seed = 0xb1a5ULL);

double assemble_bias_total(double b_prime, double b_double_prime, double grad_bound,
                           int n, int N_min);

}  // namespace amoment
