#include "amoment/gradients.hpp"

namespace amoment {

Projection Projection::from_displacement(const Vector& x, const Vector& y) {
  Vector d = y - x;
  const double norm = d.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("Projection: zero displacement");
  return Projection{d / norm};
}

Vector fd_gradient(const TargetFunction& f, const Vector& x,
                   const Eigen::Ref<const Matrix>& neighbors) {
  const int m = static_cast<int>(neighbors.cols());
  if (m == 0) throw std::invalid_argument("fd_gradient: empty neighbor list");
  const double fx = f(x);
  Vector fy(m);
  for (int j = 0; j < m; ++j) fy[j] = f(neighbors.col(j));
  return fd_gradient_from_values(x, fx, neighbors, fy);
}

Vector fd_gradient_from_values(const Vector& x, double fx,
                               const Eigen::Ref<const Matrix>& neighbors,
                               const Vector& f_neighbors) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(neighbors.cols());
  if (m == 0) throw std::invalid_argument("fd_gradient: empty neighbor list");
  if (f_neighbors.size() != m)
    throw std::invalid_argument("fd_gradient: value count mismatch");
  Vector acc = Vector::Zero(n);
  for (int j = 0; j < m; ++j) {
    const Vector d = neighbors.col(j) - x;
    const double dist2 = d.squaredNorm();
    if (!(dist2 > 0.0)) throw std::invalid_argument("fd_gradient: zero displacement");
    acc += ((f_neighbors[j] - fx) / dist2) * d;
  }
  return (static_cast<double>(n) / m) * acc;
}

Vector ideal_gradient(const Vector& grad_fx, const Vector& x,
                      const Eigen::Ref<const Matrix>& neighbors) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(neighbors.cols());
  if (m == 0) throw std::invalid_argument("ideal_gradient: empty neighbor list");
  Vector acc = Vector::Zero(n);
  for (int j = 0; j < m; ++j) {
    const Vector d = neighbors.col(j) - x;
    const double dist2 = d.squaredNorm();
    if (!(dist2 > 0.0)) throw std::invalid_argument("ideal_gradient: zero displacement");
    acc += (d.dot(grad_fx) / dist2) * d;
  }
  return (static_cast<double>(n) / m) * acc;
}

}  // namespace amoment
