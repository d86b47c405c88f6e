#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>

#include "amoment/domain.hpp"

namespace amoment {

// Black-box target with optional analytic extras used by the oracles:
// gradient, spectral bound on the Hessian, bound on the gradient norm, the
// closed-form second-moment matrix (uniform measure on [-1,1]^n), and a
// ridge basis when the function is a ridge. Point evaluations are counted;
// the counter is shared across copies and atomic, so evaluation is safe
// from concurrent threads.
class TargetFunction {
 public:
  TargetFunction(int dimension, std::function<double(const Vector&)> eval)
      : dimension_(dimension),
        eval_(std::move(eval)),
        calls_(std::make_shared<std::atomic<long long>>(0)) {}

  int dimension() const { return dimension_; }

  double operator()(const Vector& x) const {
    calls_->fetch_add(1, std::memory_order_relaxed);
    return eval_(x);
  }

  bool has_gradient() const { return static_cast<bool>(grad_); }
  Vector gradient(const Vector& x) const {
    if (!grad_) throw std::logic_error("TargetFunction: no analytic gradient available");
    return grad_(x);
  }

  long long evaluations() const { return calls_->load(std::memory_order_relaxed); }

  void set_gradient(std::function<Vector(const Vector&)> g) { grad_ = std::move(g); }

  std::optional<double> hessian_bound;    // H_f
  std::optional<double> gradient_bound;   // L_f
  std::optional<Matrix> second_moment;    // analytic E[grad grad^T], PSD
  std::optional<Matrix> ridge_basis;      // orthonormal n x r basis, ridges only

 private:
  int dimension_;
  std::function<double(const Vector&)> eval_;
  std::function<Vector(const Vector&)> grad_;
  std::shared_ptr<std::atomic<long long>> calls_;
};

// f(x) = x^T A x / 2 + b^T x on [-1,1]^n with A symmetric. Carries the
// closed form second moment A^2/3 + b b^T, H_f = ||A||_2 and the bound
// L_f <= ||A||_2 sqrt(n) + ||b||_2.
TargetFunction make_quadratic(const Matrix& A, const Vector& b);

// Profiles with exact chain-rule gradients. square and sine act on the
// first ridge coordinate; sum_of_squares uses all of them.
enum class RidgeProfile { square, sine, sum_of_squares };

// f(x) = h(U^T x) for an orthonormal n x r basis U.
TargetFunction make_ridge(const Matrix& U, RidgeProfile profile);

inline long long eval_count(const TargetFunction& f) { return f.evaluations(); }

// Seeded dense generators for instance construction.
Matrix random_symmetric(int n, std::uint64_t seed);
Vector random_vector(int n, std::uint64_t seed);
Matrix random_orthonormal(int n, int r, std::uint64_t seed);

// Max relative error of central differences against the analytic gradient
// over `points` random interior points; the gradient consistency probe.
double gradient_consistency_error(const TargetFunction& f, const Domain& domain,
                                  int points, double h, std::uint64_t seed);

}  // namespace amoment
