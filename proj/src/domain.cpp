#include "amoment/domain.hpp"

#include <cmath>

namespace amoment {

Domain::Domain(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size())
    throw std::invalid_argument("Domain: dimension must be >= 1");
  for (int i = 0; i < lower_.size(); ++i)
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("Domain: lower bound must be < upper bound on every axis");
}

Domain Domain::hypercube(int n, double lo, double hi) {
  return Domain(Vector::Constant(n, lo), Vector::Constant(n, hi));
}

bool Domain::contains(const Vector& x) const {
  if (x.size() != lower_.size()) return false;
  for (int i = 0; i < x.size(); ++i)
    if (x[i] < lower_[i] || x[i] > upper_[i]) return false;
  return true;
}

double Domain::boundary_distance(const Vector& x) const {
  if (x.size() != lower_.size())
    throw std::invalid_argument("boundary_distance: dimension mismatch");
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    d = std::min(d, std::min(x[i] - lower_[i], upper_[i] - x[i]));
  return std::max(d, 0.0);
}

double Domain::volume() const { return std::exp(log_volume()); }

double Domain::log_volume() const {
  double lv = 0.0;
  for (int i = 0; i < lower_.size(); ++i) lv += std::log(upper_[i] - lower_[i]);
  return lv;
}

Measure Measure::uniform(Domain domain) {
  Measure m(std::move(domain));
  m.tail_constant_ = 0.5;
  return m;
}

Measure Measure::rejection(Domain domain, Density density, double density_bound,
                           int max_attempts) {
  if (!density) throw std::invalid_argument("Measure::rejection: null density");
  if (!(density_bound > 0.0))
    throw std::invalid_argument("Measure::rejection: density bound must be positive");
  if (max_attempts < 1)
    throw std::invalid_argument("Measure::rejection: attempt budget must be >= 1");
  Measure m(std::move(domain));
  m.density_ = std::move(density);
  m.density_bound_ = density_bound;
  m.max_attempts_ = max_attempts;
  return m;
}

double Measure::density(const Vector& x) const {
  if (is_uniform()) return domain_.contains(x) ? 1.0 : 0.0;
  return density_(x);
}

Vector Measure::draw(CounterRng& rng) const {
  const int n = domain_.dimension();
  Vector x(n);
  if (is_uniform()) {
    for (int i = 0; i < n; ++i)
      x[i] = domain_.lower()[i] + (domain_.upper()[i] - domain_.lower()[i]) * rng.next_unit();
    return x;
  }
  for (int attempt = 0; attempt < max_attempts_; ++attempt) {
    for (int i = 0; i < n; ++i)
      x[i] = domain_.lower()[i] + (domain_.upper()[i] - domain_.lower()[i]) * rng.next_unit();
    const double d = density_(x);
    if (d > density_bound_)
      throw std::runtime_error("Measure::draw: density exceeds its declared bound");
    if (d < 0.0) throw std::runtime_error("Measure::draw: negative density");
    if (rng.next_unit() * density_bound_ < d) return x;
  }
  throw std::runtime_error("Measure::draw: rejection sampler exceeded attempt budget");
}

}  // namespace amoment
