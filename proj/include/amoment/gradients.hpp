#pragma once

#include "amoment/functions.hpp"

namespace amoment {

// Rank-1 orthogonal projection onto the direction of y - x, stored as the
// unit direction; applications are O(n) and the dense matrix is never
// formed.
struct Projection {
  Vector direction;  // unit norm

  static Projection from_displacement(const Vector& x, const Vector& y);

  Vector apply(const Vector& v) const { return direction * direction.dot(v); }
  double trace() const { return direction.squaredNorm(); }
};

inline Vector project(const Projection& p, const Vector& v) { return p.apply(v); }

// Finite-difference gradient estimate from secant slopes along random
// directions:
//   (n / m) * sum_y  (f(y) - f(x)) / ||y - x||  *  (y - x) / ||y - x||.
// Evaluates f once at x and once per neighbor.
Vector fd_gradient(const TargetFunction& f, const Vector& x,
                   const Eigen::Ref<const Matrix>& neighbors);

// Same estimate from precomputed values; lets callers own the evaluation
// budget.
Vector fd_gradient_from_values(const Vector& x, double fx,
                               const Eigen::Ref<const Matrix>& neighbors,
                               const Vector& f_neighbors);

// The noiseless surrogate: (n / m) * sum_y P_{x,y} grad_fx. No evaluations
// of f.
Vector ideal_gradient(const Vector& grad_fx, const Vector& x,
                      const Eigen::Ref<const Matrix>& neighbors);

}  // namespace amoment
