#include "amoment/functions.hpp"

#include <cmath>

#include "amoment/spectral.hpp"

namespace amoment {

TargetFunction make_quadratic(const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("make_quadratic: dimension mismatch");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("make_quadratic: A must be symmetric");

  auto A_shared = std::make_shared<Matrix>((A + A.transpose()) / 2.0);
  auto b_shared = std::make_shared<Vector>(b);
  TargetFunction f(n, [A_shared, b_shared](const Vector& x) {
    return 0.5 * x.dot(*A_shared * x) + b_shared->dot(x);
  });
  f.set_gradient([A_shared, b_shared](const Vector& x) -> Vector {
    return *A_shared * x + *b_shared;
  });
  f.second_moment = (*A_shared * *A_shared) / 3.0 + b * b.transpose();
  const double a_norm = spectral_norm_symmetric(*A_shared);
  f.hessian_bound = a_norm;
  f.gradient_bound = a_norm * std::sqrt(static_cast<double>(n)) + b.norm();
  return f;
}

TargetFunction make_ridge(const Matrix& U, RidgeProfile profile) {
  const int n = static_cast<int>(U.rows());
  const int r = static_cast<int>(U.cols());
  if (r < 1 || r > n) throw std::invalid_argument("make_ridge: need 1 <= r <= n");
  if ((U.transpose() * U - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("make_ridge: basis is not orthonormal");

  auto U_shared = std::make_shared<Matrix>(U);
  auto h = [profile](const Vector& t) -> double {
    switch (profile) {
      case RidgeProfile::square: return t[0] * t[0];
      case RidgeProfile::sine: return std::sin(t[0]);
      case RidgeProfile::sum_of_squares: return t.squaredNorm();
    }
    return 0.0;
  };
  auto grad_h = [profile](const Vector& t) -> Vector {
    Vector g = Vector::Zero(t.size());
    switch (profile) {
      case RidgeProfile::square: g[0] = 2.0 * t[0]; break;
      case RidgeProfile::sine: g[0] = std::cos(t[0]); break;
      case RidgeProfile::sum_of_squares: g = 2.0 * t; break;
    }
    return g;
  };

  TargetFunction f(n, [U_shared, h](const Vector& x) {
    return h(U_shared->transpose() * x);
  });
  f.set_gradient([U_shared, grad_h](const Vector& x) -> Vector {
    return *U_shared * grad_h(U_shared->transpose() * x);
  });
  f.ridge_basis = U;
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  switch (profile) {
    case RidgeProfile::square:
      f.hessian_bound = 2.0;
      f.gradient_bound = 2.0 * sqrt_n;
      break;
    case RidgeProfile::sine:
      f.hessian_bound = 1.0;
      f.gradient_bound = 1.0;
      break;
    case RidgeProfile::sum_of_squares:
      f.hessian_bound = 2.0;
      f.gradient_bound = 2.0 * sqrt_n;
      break;
  }
  return f;
}

Matrix random_symmetric(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0x5f3759df);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = rng.next_normal();
      A(i, j) = v;
      A(j, i) = v;
    }
  return A;
}

Vector random_vector(int n, std::uint64_t seed) {
  CounterRng rng(seed, 0x85ebca6b);
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = rng.next_normal();
  return b;
}

Matrix random_orthonormal(int n, int r, std::uint64_t seed) {
  CounterRng rng(seed, 0xc2b2ae35);
  Matrix G(n, r);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) G(i, j) = rng.next_normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
  return Q;
}

double gradient_consistency_error(const TargetFunction& f, const Domain& domain,
                                  int points, double h, std::uint64_t seed) {
  if (!f.has_gradient())
    throw std::logic_error("gradient_consistency_error: no analytic gradient");
  const int n = f.dimension();
  CounterRng rng(seed, 0x27d4eb2f);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      const double lo = domain.lower()[i] + h;
      const double hi = domain.upper()[i] - h;
      x[i] = lo + (hi - lo) * rng.next_unit();
    }
    const Vector g = f.gradient(x);
    const double scale = std::max(g.norm(), 1.0);
    for (int i = 0; i < n; ++i) {
      Vector xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd = (f(xp) - f(xm)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / scale);
    }
  }
  return worst;
}

}  // namespace amoment
