#pragma once

#include <functional>
#include <vector>

#include "amoment/domain.hpp"

namespace amoment {

// Regularized incomplete beta I_x(a,b), continued fraction (modified Lentz)
// with a 1e-12 stopping tolerance; verification dependency only.
double regularized_incomplete_beta(double a, double b, double x);

inline double beta_cdf(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x);
}

// Asymptotic Kolmogorov tail Q(k) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 k^2).
double kolmogorov_q(double k);

// k with Q(k) = alpha; the two-sided KS critical scale. Divide by sqrt(m)
// for a sample of size m.
double kolmogorov_critical(double alpha);

// Two-sided KS distance between the sample and a reference CDF. Sorts a
// copy of the sample.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Welford accumulator over matrix-valued samples; gives the elementwise
// mean and standard error of the mean.
class MatrixMoments {
 public:
  MatrixMoments(int rows, int cols)
      : mean_(Matrix::Zero(rows, cols)), m2_(Matrix::Zero(rows, cols)) {}

  void add(const Matrix& sample) {
    ++count_;
    const Matrix d1 = sample - mean_;
    mean_ += d1 / count_;
    m2_ += d1.cwiseProduct(sample - mean_);
  }

  long long count() const { return count_; }
  const Matrix& mean() const { return mean_; }

  Matrix std_error() const {
    if (count_ < 2) return Matrix::Constant(mean_.rows(), mean_.cols(), 0.0);
    return (m2_ / (static_cast<double>(count_) * (count_ - 1))).cwiseSqrt();
  }

  // sqrt(sum of squared entry standard errors); the natural scale for a
  // Frobenius-norm statistic of the mean.
  double frobenius_std_error() const { return std_error().norm(); }

 private:
  Matrix mean_, m2_;
  long long count_ = 0;
};

class ScalarMoments {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / count_;
    m2_ += d * (x - mean_);
  }
  long long count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / (count_ - 1) : 0.0; }
  double std_error() const {
    return count_ > 1 ? std::sqrt(variance() / count_) : 0.0;
  }

 private:
  double mean_ = 0.0, m2_ = 0.0;
  long long count_ = 0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of fit residuals
};

LineFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace amoment
