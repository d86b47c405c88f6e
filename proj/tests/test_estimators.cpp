#include <doctest.h>

#include <cmath>

#include "amoment/spectral.hpp"
#include "amoment/stats.hpp"

using namespace amoment;

namespace {

SampleDesign tiny_design(const Measure& m, int N, int count, std::uint64_t seed,
                         double epsilon = 0.0) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Matrix X = sample_centers(m, N, derive_seed(seed, 0x11, attempt));
    const double eps_x = epsilon_max(X, m.domain());
    const double eps = epsilon > 0.0 ? epsilon : 0.5 * eps_x;
    if (eps > eps_x) continue;
    return make_equal_count_design(X, eps, count, m, derive_seed(seed, 0x12, 0));
  }
  throw std::runtime_error("tiny_design: infeasible epsilon");
}

}  // namespace

TEST_CASE("debias scalar constants") {
  SUBCASE("n=2 prefactor collapses to one") {
    const DebiasScalars sc = debias_scalars(2, 7);
    CHECK(sc.prefactor == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sc.identity_denominator == doctest::Approx(2.0 * 7 + 2.0).epsilon(1e-15));
  }
  SUBCASE("n=500, N_min=50 against exact rational arithmetic") {
    const DebiasScalars sc = debias_scalars(500, 50);
    // (1 + (249/251)/50)^-1 = 12550/12799 and (502/500)*50 + 501 - 1/250
    const long double prefactor = 12550.0L / 12799.0L;
    const long double denominator = 137799.0L / 250.0L;
    CHECK(std::abs(sc.prefactor - static_cast<double>(prefactor)) < 1e-15);
    CHECK(std::abs(sc.identity_denominator - static_cast<double>(denominator)) < 1e-12);
  }
  SUBCASE("n=1") {
    const DebiasScalars sc = debias_scalars(1, 4);
    CHECK(sc.prefactor == doctest::Approx(12.0 / 11.0).epsilon(1e-15));
    CHECK(sc.identity_denominator == doctest::Approx(12.0).epsilon(1e-15));
  }
}

TEST_CASE("oracle estimate of a linear function is exact") {
  const int n = 3;
  const Vector b = random_vector(n, 5);
  const TargetFunction f = make_quadratic(Matrix::Zero(n, n), b);
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const MomentEstimate est = oracle_estimate(f, sample_centers(m, 50, 6));
  CHECK((est.matrix - b * b.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(est.kind == EstimatorKind::oracle);
}

TEST_CASE("oracle estimate converges to the closed form") {
  const int n = 5;
  const TargetFunction f = make_quadratic(random_symmetric(n, 7), random_vector(n, 8));
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const int N = 100000;
  const Matrix X = sample_centers(m, N, 9);
  MatrixMoments acc(n, n);
  for (int i = 0; i < N; ++i) {
    const Vector g = f.gradient(X.col(i));
    acc.add(g * g.transpose());
  }
  const MomentEstimate est = oracle_estimate(f, X);
  CHECK((est.matrix - acc.mean()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((est.matrix - *f.second_moment).norm() <= 5.0 * acc.frobenius_std_error());
  // oracle estimates are PSD up to rounding
  const SymmetricEigen eig = symmetric_eigendecompose(est.matrix);
  CHECK(eig.values[n - 1] >= -1e-12 * est.matrix.norm());
}

TEST_CASE("naive estimate of the zero function vanishes") {
  const int n = 3;
  const TargetFunction zero(n, [](const Vector&) { return 0.0; });
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const SampleDesign d = tiny_design(m, 4, 3, 21);
  CHECK(naive_estimate(zero, d).matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("naive estimator bias matches the single-neighbor projection law") {
  // one center, one neighbor: E[naive] = n^2 (2 b b^T + ||b||^2 I) / (n(n+2))
  const int n = 3;
  const Vector b = random_vector(n, 31);
  const TargetFunction f = make_quadratic(Matrix::Zero(n, n), b);
  const Measure m = Measure::uniform(Domain::hypercube(n));
  Matrix X = Matrix::Zero(n, 1);
  MatrixMoments acc(n, n);
  for (int rep = 0; rep < 200000; ++rep) {
    const SampleDesign d =
        sample_neighbors(X, 0.05, 1, m, NeighborMode::locally_uniform,
                         derive_seed(32, 0x99, rep));
    acc.add(naive_estimate(f, d).matrix);
  }
  const double nn = n;
  const Matrix target = nn * nn *
                        (2.0 * b * b.transpose() + b.squaredNorm() * Matrix::Identity(n, n)) /
                        (nn * (nn + 2.0));
  const Matrix se = acc.std_error();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(std::abs(acc.mean()(i, j) - target(i, j)) <= 5.0 * se(i, j));
}

TEST_CASE("one-dimensional naive and debiased estimates differ by the scalar constants") {
  const Measure m = Measure::uniform(Domain::hypercube(1));
  const TargetFunction f = make_quadratic(Matrix::Constant(1, 1, 1.5), Vector::Constant(1, 0.3));
  SampleDesign d = tiny_design(m, 6, 5, 41);
  const MomentEstimate naive = naive_estimate(f, d);
  const MomentEstimate debiased = debiased_estimate(f, d);
  const DebiasScalars sc = debias_scalars(1, d.min_count);
  const double factor = sc.prefactor * (1.0 - 1.0 / sc.identity_denominator);
  CHECK(debiased.matrix(0, 0) ==
        doctest::Approx(naive.matrix(0, 0) * factor).epsilon(1e-13));
}

TEST_CASE("debiased estimate matches an independent scalar reassembly") {
  // independent reassembly from per-center gradients, in long double scalars
  const int n = 4;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 51), random_vector(n, 52));
  SampleDesign d = tiny_design(m, 5, 12, 53);

  Matrix S = Matrix::Zero(n, n);
  double T = 0.0;
  for (int s = 0; s < d.num_centers(); ++s) {
    const Vector g = fd_gradient(f, d.centers.col(s), d.neighbors_of(s));
    S += g * g.transpose();
    T += g.squaredNorm();
  }

  for (int n_min : {5, 10}) {
    SampleDesign dd = d.with_min_count(n_min);
    const MomentEstimate est = debiased_estimate(f, dd);
    CHECK(est.included_centers == 5);  // all counts are 12
    const long double nn = n, mm = n_min;
    const long double pref = 1.0L / (1.0L + (1.0L - 2.0L / nn) / (1.0L + 2.0L / nn) / mm);
    const long double denom = (1.0L + 2.0L / nn) * mm + nn + 1.0L - 2.0L / nn;
    const Matrix expected =
        static_cast<double>(pref) / d.num_centers() *
        (S - T / static_cast<double>(denom) * Matrix::Identity(n, n));
    CHECK((est.matrix - expected).norm() <= 1e-12 * expected.norm());
  }
}

TEST_CASE("filtered centers are dropped from the sum but kept in the normalization") {
  const int n = 3;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 61), random_vector(n, 62));
  // force unequal counts: 8 and 3
  const Matrix X = sample_centers(m, 2, 63);
  const double eps = 0.4 * epsilon_max(X, m.domain());
  SampleDesign d = make_equal_count_design(X, eps, 8, m, 64);
  d.counts = {8, 3};
  d.offsets = {0, 8, 11};
  d.neighbors = d.neighbors.leftCols(11).eval();
  d.assignment.resize(11);
  d.min_count = 5;

  const MomentEstimate verbatim = debiased_estimate(f, d);
  CHECK(verbatim.included_centers == 1);
  DebiasOptions by_included;
  by_included.normalize_by_included = true;
  const MomentEstimate alt = debiased_estimate(f, d, by_included);
  CHECK((alt.matrix - 2.0 * verbatim.matrix).norm() <= 1e-14 * alt.matrix.norm());

  d.min_count = 9;  // nobody qualifies
  CHECK_THROWS_AS(debiased_estimate(f, d), std::runtime_error);
}

TEST_CASE("ideal debiased estimate at n=1 reduces to the oracle") {
  const Measure m = Measure::uniform(Domain::hypercube(1));
  const TargetFunction f = make_quadratic(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 0.7));
  const SampleDesign d = tiny_design(m, 8, 4, 71);
  const MomentEstimate ideal = ideal_debiased_estimate(f, d);
  const MomentEstimate oracle = oracle_estimate(f, d.centers);
  // projections are trivial at n=1 and the scalar constants cancel exactly
  CHECK(std::abs(ideal.matrix(0, 0) - oracle.matrix(0, 0)) < 1e-12);
}

TEST_CASE("debiased and ideal estimates satisfy the deterministic gap bound") {
  for (int n : {2, 5}) {
    const Measure m = Measure::uniform(Domain::hypercube(n));
    const TargetFunction f =
        make_quadratic(random_symmetric(n, 80 + n), random_vector(n, 90 + n));
    const double H = *f.hessian_bound, L = *f.gradient_bound;
    for (double eps : {1e-2, 1e-3}) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SampleDesign d = tiny_design(m, 4, 6, derive_seed(seed, n, 0), eps);
        const MomentEstimate fd = debiased_estimate(f, d);
        const MomentEstimate ideal = ideal_debiased_estimate(f, d);
        const double bound = 0.5 * eps * eps * H * H * n * n + 2.0 * eps * L * H * n * n;
        CHECK((fd.matrix - ideal.matrix).norm() <= bound);
      }
    }
  }
}

TEST_CASE("debiased-to-ideal gap shrinks linearly in epsilon") {
  const int n = 5;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 101), random_vector(n, 102));
  std::vector<double> log_eps, log_gap;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    ScalarMoments gap;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const SampleDesign d = tiny_design(m, 4, 6, derive_seed(seed, 0xE, 1), eps);
      gap.add((debiased_estimate(f, d).matrix - ideal_debiased_estimate(f, d).matrix).norm());
    }
    log_eps.push_back(std::log10(eps));
    log_gap.push_back(std::log10(gap.mean()));
  }
  const LineFit fit = ols_fit(log_eps, log_gap);
  CHECK(fit.slope > 0.8);
  CHECK(fit.slope < 1.2);
}

TEST_CASE("ideal debiased estimator is unbiased under equal counts") {
  const int n = 3;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 111), random_vector(n, 112));
  const Matrix X = sample_centers(m, 5, 113);
  const double eps = 0.3 * epsilon_max(X, m.domain());
  const MomentEstimate oracle = oracle_estimate(f, X);
  MatrixMoments acc(n, n);
  for (int rep = 0; rep < 3000; ++rep) {
    const SampleDesign d =
        make_equal_count_design(X, eps, 6, m, derive_seed(114, 0x7, rep));
    acc.add(ideal_debiased_estimate(f, d).matrix);
  }
  CHECK((acc.mean() - oracle.matrix).norm() <= 5.0 * acc.frobenius_std_error());
}

TEST_CASE("estimates are exactly symmetric and thread-count independent") {
  const int n = 6;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 121), random_vector(n, 122));
  const SampleDesign d = tiny_design(m, 6, 9, 123);
  DebiasOptions serial, parallel;
  parallel.threads = 4;
  const MomentEstimate a = debiased_estimate(f, d, serial);
  const MomentEstimate b = debiased_estimate(f, d, parallel);
  CHECK((a.matrix - a.matrix.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bias constants vanish for the uniform measure") {
  const int n = 4;
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const TargetFunction f = make_quadratic(random_symmetric(n, 131), random_vector(n, 132));
  const BiasConstants bc = bias_constants(m, f, 1e-2, 10, 20000, 3, 133);
  CHECK(bc.b_prime <= 5.0 * bc.b_prime_se);
  CHECK(bc.b_double_prime <= 5.0 * bc.b_double_prime_se);
  CHECK(bc.b_total > 0.0);  // the 2 L^2 (1+sqrt(n))/N_min floor remains
}

TEST_CASE("bias total assembles the displayed combination") {
  // B' = B'' = 0, L = 1, n = 4, N_min = 10 -> 2*1*(1+2)/10
  CHECK(assemble_bias_total(0.0, 0.0, 1.0, 4, 10) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("estimators validate their preconditions") {
  const int n = 2;
  const TargetFunction no_grad(n, [](const Vector& x) { return x.squaredNorm(); });
  const Measure m = Measure::uniform(Domain::hypercube(n));
  const Matrix X = sample_centers(m, 3, 141);
  CHECK_THROWS_AS(oracle_estimate(no_grad, X), std::logic_error);
  const SampleDesign d = tiny_design(m, 3, 2, 142);
  CHECK_THROWS_AS(ideal_debiased_estimate(no_grad, d), std::logic_error);
  SampleDesign starved = d;
  starved.counts[0] = 0;
  starved.offsets = {0, 0, 2, 4};
  CHECK_THROWS_AS(naive_estimate(no_grad, starved), std::invalid_argument);
}
