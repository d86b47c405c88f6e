#include <doctest.h>

#include <cmath>

#include "amoment/gradients.hpp"
#include "amoment/sampling.hpp"
#include "amoment/stats.hpp"

using namespace amoment;

namespace {

Vector unit(int n, int axis) {
  Vector e = Vector::Zero(n);
  e[axis] = 1.0;
  return e;
}

Matrix ball_cloud(CounterRng& rng, const Vector& center, double radius, int count) {
  Matrix Y(center.size(), count);
  for (int j = 0; j < count; ++j) Y.col(j) = uniform_in_ball(rng, center, radius);
  return Y;
}

}  // namespace

TEST_CASE("projection basics") {
  Vector x = Vector::Zero(2);
  const Projection p = Projection::from_displacement(x, unit(2, 0));
  Vector v(2);
  v << 3.0, 4.0;
  Vector expected(2);
  expected << 3.0, 0.0;
  CHECK((project(p, v) - expected).norm() < 1e-15);
  CHECK(project(p, unit(2, 1)).norm() == 0.0);
  CHECK_THROWS_AS(Projection::from_displacement(x, x), std::invalid_argument);
}

TEST_CASE("projection invariants on random directions") {
  CounterRng rng(7, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5;
    Vector x(n), y(n), v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.next_normal();
      y[i] = rng.next_normal();
      v[i] = rng.next_normal();
    }
    const Projection p = Projection::from_displacement(x, y);
    CHECK(std::abs(p.direction.norm() - 1.0) < 1e-12);
    CHECK(std::abs(p.trace() - 1.0) < 1e-12);
    // idempotence and the dense outer-product oracle
    const Vector once = p.apply(v);
    CHECK((p.apply(once) - once).norm() < 1e-10);
    const Matrix dense = p.direction * p.direction.transpose();
    CHECK((dense * v - once).norm() < 1e-12);
  }
}

TEST_CASE("one-dimensional finite difference secant") {
  const TargetFunction f = make_quadratic(Matrix::Constant(1, 1, 2.0), Vector::Zero(1));
  // f(t) = t^2, x = 0.5, y = 0.6: slope (0.36-0.25)/0.1 = 1.1, true gradient 1.0
  Matrix y(1, 1);
  y << 0.6;
  const Vector g = fd_gradient(f, Vector::Constant(1, 0.5), y);
  CHECK(g[0] == doctest::Approx(1.1).epsilon(1e-12));
  // discrepancy within eps * H_f / 2 = 0.1 * 2 / 2
  CHECK(std::abs(g[0] - 1.0) <= 0.1 + 1e-12);
}

TEST_CASE("linear functions have no curvature term") {
  const int n = 4;
  const Vector b = random_vector(n, 11);
  const TargetFunction f = make_quadratic(Matrix::Zero(n, n), b);
  CounterRng rng(12, 1);
  const Vector x = Vector::Constant(n, 0.1);
  const Matrix Y = ball_cloud(rng, x, 0.3, 9);
  const Vector fd = fd_gradient(f, x, Y);
  // (n/m) sum P b, assembled from explicit projections
  Vector expected = Vector::Zero(n);
  for (int j = 0; j < Y.cols(); ++j)
    expected += Projection::from_displacement(x, Y.col(j)).apply(b);
  expected *= static_cast<double>(n) / Y.cols();
  CHECK((fd - expected).norm() < 1e-12);
}

TEST_CASE("fd gradient concentrates on the true gradient for small radii") {
  const int n = 10;
  const TargetFunction f = make_quadratic(random_symmetric(n, 21), random_vector(n, 22));
  const Vector x = Vector::Zero(n);
  const double eps = 1e-4;
  CounterRng rng(23, 1);
  const int m = 100000;
  MatrixMoments acc(n, 1);
  const double fx = f(x);
  Matrix y(n, 1);
  Vector fy(1);
  for (int k = 0; k < m; ++k) {
    y.col(0) = uniform_in_ball(rng, x, eps);
    fy[0] = f(y.col(0));
    acc.add(fd_gradient_from_values(x, fx, y, fy));
  }
  const double bias_budget = eps * (*f.hessian_bound) * n / 2.0;
  const double sigma = acc.frobenius_std_error();
  CHECK((Vector(acc.mean()) - f.gradient(x)).norm() <= bias_budget + 5.0 * sigma);
}

TEST_CASE("ideal gradient is exact in one dimension") {
  const TargetFunction f = make_quadratic(Matrix::Constant(1, 1, 3.0), Vector::Constant(1, -1.0));
  const Vector x = Vector::Constant(1, 0.2);
  CounterRng rng(31, 1);
  const Matrix Y = ball_cloud(rng, x, 0.1, 5);
  CHECK((ideal_gradient(f.gradient(x), x, Y) - f.gradient(x)).norm() < 1e-14);
}

TEST_CASE("ideal gradient is unbiased because n E[P] = I") {
  const int n = 5;
  const TargetFunction f = make_quadratic(random_symmetric(n, 41), random_vector(n, 42));
  const Vector x = Vector::Constant(n, 0.05);
  const Vector g = f.gradient(x);
  CounterRng rng(43, 1);
  MatrixMoments acc(n, 1);
  Matrix y(n, 1);
  for (int k = 0; k < 1000000; ++k) {
    y.col(0) = uniform_in_ball(rng, x, 0.2);
    acc.add(ideal_gradient(g, x, y));
  }
  CHECK((Vector(acc.mean()) - g).norm() <= 5.0 * acc.frobenius_std_error());
}

TEST_CASE("fd and ideal gradients differ by at most the Taylor budget") {
  // pointwise bound n * H_f * eps / 2 on every design
  const int n = 20;
  const TargetFunction f = make_quadratic(random_symmetric(n, 51), random_vector(n, 52));
  const double eps = 1e-3;
  const double budget = n * (*f.hessian_bound) * eps / 2.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed, 2);
    const Vector x = Vector::Constant(n, -0.1);
    const Matrix Y = ball_cloud(rng, x, eps, 7);
    const Vector fd = fd_gradient(f, x, Y);
    const Vector ideal = ideal_gradient(f.gradient(x), x, Y);
    CHECK((fd - ideal).norm() <= budget + 1e-12);
  }
}

TEST_CASE("unbiasedness of the ideal gradient estimator over replicated designs") {
  // mean over M designs approaches the gradient at the 1/sqrt(M) rate
  const int n = 3;
  const TargetFunction f = make_quadratic(random_symmetric(n, 61), random_vector(n, 62));
  const Vector x = Vector::Zero(n);
  const Vector g = f.gradient(x);
  std::vector<double> logM, logErr;
  for (int M : {100, 1000, 10000, 100000}) {
    ScalarMoments err;
    for (int rep = 0; rep < 4; ++rep) {
      CounterRng rng(derive_seed(63, M, rep), 1);
      Vector mean = Vector::Zero(n);
      Matrix y(n, 1);
      for (int k = 0; k < M; ++k) {
        y.col(0) = uniform_in_ball(rng, x, 0.1);
        mean += ideal_gradient(g, x, y);
      }
      err.add((mean / M - g).norm());
    }
    logM.push_back(std::log10(static_cast<double>(M)));
    logErr.push_back(std::log10(err.mean()));
  }
  const LineFit fit = ols_fit(logM, logErr);
  CHECK(fit.slope > -0.65);
  CHECK(fit.slope < -0.35);
}

TEST_CASE("projection energy has mean 1/n") {
  const int n = 7;
  CounterRng rng(71, 1);
  const Vector x = Vector::Zero(n);
  const Vector v = unit(n, 0);
  ScalarMoments acc;
  for (int k = 0; k < 200000; ++k) {
    const Projection p = Projection::from_displacement(x, uniform_in_ball(rng, x, 1e-3));
    acc.add(p.apply(v).squaredNorm());
  }
  CHECK(std::abs(acc.mean() - 1.0 / n) < 5.0 * acc.std_error());
}

TEST_CASE("gradient estimators reject empty and degenerate input") {
  const TargetFunction f = make_quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector x = Vector::Zero(2);
  CHECK_THROWS_AS(fd_gradient(f, x, Matrix(2, 0)), std::invalid_argument);
  Matrix same(2, 1);
  same.col(0) = x;
  CHECK_THROWS_AS(fd_gradient(f, x, same), std::invalid_argument);
  CHECK_THROWS_AS(ideal_gradient(x, x, same), std::invalid_argument);
}
