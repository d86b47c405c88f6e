#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "amoment/rng.hpp"

namespace amoment {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Axis-aligned box domain. Default is the centered unit hypercube [-1,1]^n.
class Domain {
 public:
  Domain(Vector lower, Vector upper);
  static Domain hypercube(int n, double lo = -1.0, double hi = 1.0);

  int dimension() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& x) const;
  // Distance to the nearest face; 0 exactly on the boundary.
  double boundary_distance(const Vector& x) const;
  double volume() const;
  double log_volume() const;

 private:
  Vector lower_, upper_;
};

// A probability measure on a Domain. Either the uniform measure or a
// density known up to normalization with a pointwise upper bound, sampled
// by rejection against the uniform proposal.
class Measure {
 public:
  using Density = std::function<double(const Vector&)>;

  static Measure uniform(Domain domain);
  static Measure rejection(Domain domain, Density density, double density_bound,
                           int max_attempts = 1000);

  const Domain& domain() const { return domain_; }
  bool is_uniform() const { return !density_; }
  double density_bound() const { return density_bound_; }
  int max_attempts() const { return max_attempts_; }
  double density(const Vector& x) const;

  // Largest radius at which local near-isotropy is known to hold;
  // infinite for the uniform measure.
  double epsilon_mu() const { return epsilon_mu_; }
  // Sub-exponential tail constant of the projection law, where known
  // (1/2 for the uniform measure).
  std::optional<double> tail_constant() const { return tail_constant_; }

  // One draw from the measure. Throws if the rejection sampler exceeds its
  // attempt budget or observes density(x) > density_bound.
  Vector draw(CounterRng& rng) const;

 private:
  explicit Measure(Domain domain) : domain_(std::move(domain)) {}

  Domain domain_;
  Density density_;  // empty <=> uniform
  double density_bound_ = 1.0;
  int max_attempts_ = 1000;
  double epsilon_mu_ = std::numeric_limits<double>::infinity();
  std::optional<double> tail_constant_;
};

}  // namespace amoment
