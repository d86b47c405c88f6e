#include <doctest.h>

#include <cmath>

#include "amoment/rng.hpp"
#include "amoment/stats.hpp"

using namespace amoment;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("incomplete beta matches closed forms") {
  // I_x(a,1) = x^a and I_x(1,b) = 1-(1-x)^b
  for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
    for (double a : {0.5, 1.0, 2.5, 7.0}) {
      CHECK(regularized_incomplete_beta(a, 1.0, x) ==
            doctest::Approx(std::pow(x, a)).epsilon(1e-10));
      CHECK(regularized_incomplete_beta(1.0, a, x) ==
            doctest::Approx(1.0 - std::pow(1.0 - x, a)).epsilon(1e-10));
    }
    // arcsine law: I_x(1/2,1/2) = (2/pi) asin(sqrt(x))
    CHECK(regularized_incomplete_beta(0.5, 0.5, x) ==
          doctest::Approx(2.0 / kPi * std::asin(std::sqrt(x))).epsilon(1e-10));
  }
}

TEST_CASE("incomplete beta symmetry and edges") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  for (double x : {0.1, 0.35, 0.72}) {
    for (double a : {0.5, 2.0})
      for (double b : {1.5, 4.5}) {
        CHECK(regularized_incomplete_beta(a, b, x) ==
              doctest::Approx(1.0 - regularized_incomplete_beta(b, a, 1.0 - x))
                  .epsilon(1e-10));
      }
  }
  CHECK_THROWS_AS(regularized_incomplete_beta(0.0, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("kolmogorov critical value") {
  // Q is a decreasing tail; the 0.1% point sits just below 1.95.
  CHECK(kolmogorov_q(0.5) > kolmogorov_q(1.0));
  CHECK(kolmogorov_q(1.0) > kolmogorov_q(2.0));
  const double k = kolmogorov_critical(1e-3);
  CHECK(k > 1.94);
  CHECK(k < 1.96);
  CHECK(kolmogorov_q(k) == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("ks statistic on hand-computable samples") {
  auto identity = [](double t) { return t; };
  CHECK(ks_statistic({0.5}, identity) == doctest::Approx(0.5));
  // perfectly spaced sample: D = 1/(2m)
  std::vector<double> grid;
  const int m = 10;
  for (int i = 0; i < m; ++i) grid.push_back((i + 0.5) / m);
  CHECK(ks_statistic(grid, identity) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("ols fit recovers exact lines") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(-0.5 * xi + 2.0);
  const LineFit fit = ols_fit(x, y);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(ols_fit({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("matrix moments track mean and standard error") {
  CounterRng rng(7, 1);
  MatrixMoments acc(2, 2);
  std::vector<Matrix> samples;
  for (int k = 0; k < 500; ++k) {
    Matrix s(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s(i, j) = rng.next_normal();
    samples.push_back(s);
    acc.add(s);
  }
  Matrix mean = Matrix::Zero(2, 2);
  for (const auto& s : samples) mean += s;
  mean /= samples.size();
  CHECK((acc.mean() - mean).cwiseAbs().maxCoeff() < 1e-12);
  Matrix var = Matrix::Zero(2, 2);
  for (const auto& s : samples) var += (s - mean).cwiseProduct(s - mean);
  var /= (samples.size() - 1);
  const Matrix se = (var / samples.size()).cwiseSqrt();
  CHECK((acc.std_error() - se).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("counter rng streams are independent and deterministic") {
  CounterRng a(42, 1), b(42, 1), c(42, 2);
  bool all_equal = true, any_equal_cross = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) all_equal = false;
    if (va == c.next_u64()) any_equal_cross = true;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_cross);

  CounterRng d(123, 9);
  ScalarMoments m;
  for (int i = 0; i < 200000; ++i) m.add(d.next_normal());
  CHECK(std::abs(m.mean()) < 5.0 * m.std_error());
  CHECK(m.variance() == doctest::Approx(1.0).epsilon(0.02));
}
