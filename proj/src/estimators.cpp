#include "amoment/estimators.hpp"

#include <cmath>
#include <optional>

#include "amoment/parallel.hpp"
#include "amoment/spectral.hpp"

namespace amoment {

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::oracle: return "oracle";
    case EstimatorKind::naive: return "naive";
    case EstimatorKind::debiased: return "debiased";
    case EstimatorKind::ideal_debiased: return "ideal_debiased";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
  if (s == "oracle") return EstimatorKind::oracle;
  if (s == "naive") return EstimatorKind::naive;
  if (s == "debiased") return EstimatorKind::debiased;
  if (s == "ideal_debiased") return EstimatorKind::ideal_debiased;
  throw std::invalid_argument("unknown estimator kind: " + s);
}

DebiasScalars debias_scalars(int n, int N_min) {
  if (n < 1 || N_min < 1)
    throw std::invalid_argument("debias_scalars: n and N_min must be >= 1");
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(N_min);
  const double ratio = (1.0 - 2.0 / nn) / (1.0 + 2.0 / nn);
  return DebiasScalars{1.0 / (1.0 + ratio / m),
                       (1.0 + 2.0 / nn) * m + nn + 1.0 - 2.0 / nn};
}

namespace {

void symmetrize(Matrix& M) { M = ((M + M.transpose()) / 2.0).eval(); }

// Deterministic pairwise accumulation in index order (binary-counter
// scheme); the result does not depend on how the per-index terms were
// produced, so the map phase can run on any number of threads.
class PairwiseMatrixSum {
 public:
  void add(Matrix m) {
    std::size_t level = 0;
    for (;;) {
      if (level == levels_.size()) {
        levels_.push_back(std::move(m));
        return;
      }
      if (!levels_[level]) {
        levels_[level] = std::move(m);
        return;
      }
      m += *levels_[level];
      levels_[level].reset();
      ++level;
    }
  }

  Matrix total(int rows, int cols) const {
    Matrix acc = Matrix::Zero(rows, cols);
    for (const auto& part : levels_)
      if (part) acc += *part;
    return acc;
  }

 private:
  std::vector<std::optional<Matrix>> levels_;
};

// Evaluates f at every center and neighbor of the design (the full query
// budget of the algorithm), then forms the per-center finite-difference
// gradients. Gradients of excluded centers are still computed cheaply but
// never used when the caller filters.
std::vector<Vector> fd_gradients_for_design(const TargetFunction& f,
                                            const SampleDesign& design, int threads) {
  const int N = design.num_centers();
  Vector f_centers(N);
  Vector f_neighbors(design.num_neighbors());
  parallel_for(N, threads, [&](int s) {
    f_centers[s] = f(design.centers.col(s));
    for (int j = design.offsets[s]; j < design.offsets[s + 1]; ++j)
      f_neighbors[j] = f(design.neighbors.col(j));
  });
  std::vector<Vector> grads(N);
  parallel_for(N, threads, [&](int s) {
    if (design.counts[s] == 0) {
      grads[s] = Vector::Zero(design.dimension());
      return;
    }
    grads[s] = fd_gradient_from_values(
        design.centers.col(s), f_centers[s], design.neighbors_of(s),
        f_neighbors.segment(design.offsets[s], design.counts[s]));
  });
  return grads;
}

std::vector<Vector> ideal_gradients_for_design(const TargetFunction& f,
                                               const SampleDesign& design, int threads) {
  const int N = design.num_centers();
  std::vector<Vector> grads(N);
  parallel_for(N, threads, [&](int s) {
    if (design.counts[s] == 0) {
      grads[s] = Vector::Zero(design.dimension());
      return;
    }
    grads[s] = ideal_gradient(f.gradient(design.centers.col(s)),
                              design.centers.col(s), design.neighbors_of(s));
  });
  return grads;
}

MomentEstimate debiased_from_gradients(const std::vector<Vector>& grads,
                                       const SampleDesign& design,
                                       EstimatorKind kind,
                                       const DebiasOptions& options) {
  const int n = design.dimension();
  const int N = design.num_centers();
  const DebiasScalars sc = debias_scalars(n, design.min_count);
  PairwiseMatrixSum sum;
  int included = 0;
  for (int s = 0; s < N; ++s) {
    if (design.counts[s] < design.min_count) continue;
    ++included;
    Matrix term = grads[s] * grads[s].transpose();
    term.diagonal().array() -= grads[s].squaredNorm() / sc.identity_denominator;
    sum.add(std::move(term));
  }
  if (included == 0)
    throw std::runtime_error("debiased_estimate: no center has min_count neighbors");
  const double denom = options.normalize_by_included ? included : N;
  MomentEstimate est;
  est.matrix = (sc.prefactor / denom) * sum.total(n, n);
  symmetrize(est.matrix);
  est.kind = kind;
  est.n = n;
  est.N = N;
  est.N_total = design.num_neighbors();
  est.N_min = design.min_count;
  est.epsilon = design.epsilon;
  est.seed = design.seed;
  est.included_centers = included;
  return est;
}

}  // namespace

MomentEstimate oracle_estimate(const TargetFunction& f, const Matrix& X,
                               std::uint64_t seed) {
  if (!f.has_gradient())
    throw std::logic_error("oracle_estimate: analytic gradient required");
  const int n = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  if (N == 0) throw std::invalid_argument("oracle_estimate: empty center set");
  PairwiseMatrixSum sum;
  for (int s = 0; s < N; ++s) {
    const Vector g = f.gradient(X.col(s));
    sum.add(g * g.transpose());
  }
  MomentEstimate est;
  est.matrix = sum.total(n, n) / N;
  symmetrize(est.matrix);
  est.kind = EstimatorKind::oracle;
  est.n = n;
  est.N = N;
  est.seed = seed;
  est.included_centers = N;
  return est;
}

MomentEstimate naive_estimate(const TargetFunction& f, const SampleDesign& design,
                              int threads) {
  const int N = design.num_centers();
  for (int s = 0; s < N; ++s)
    if (design.counts[s] == 0)
      throw std::invalid_argument("naive_estimate: center with zero neighbors");
  const std::vector<Vector> grads = fd_gradients_for_design(f, design, threads);
  PairwiseMatrixSum sum;
  for (int s = 0; s < N; ++s) sum.add(grads[s] * grads[s].transpose());
  MomentEstimate est;
  est.matrix = sum.total(design.dimension(), design.dimension()) / N;
  symmetrize(est.matrix);
  est.kind = EstimatorKind::naive;
  est.n = design.dimension();
  est.N = N;
  est.N_total = design.num_neighbors();
  est.N_min = design.min_count;
  est.epsilon = design.epsilon;
  est.seed = design.seed;
  est.included_centers = N;
  return est;
}

MomentEstimate debiased_estimate(const TargetFunction& f, const SampleDesign& design,
                                 const DebiasOptions& options) {
  const std::vector<Vector> grads = fd_gradients_for_design(f, design, options.threads);
  return debiased_from_gradients(grads, design, EstimatorKind::debiased, options);
}

MomentEstimate ideal_debiased_estimate(const TargetFunction& f,
                                       const SampleDesign& design,
                                       const DebiasOptions& options) {
  if (!f.has_gradient())
    throw std::logic_error("ideal_debiased_estimate: analytic gradient required");
  const std::vector<Vector> grads = ideal_gradients_for_design(f, design, options.threads);
  return debiased_from_gradients(grads, design, EstimatorKind::ideal_debiased, options);
}

double assemble_bias_total(double b_prime, double b_double_prime, double grad_bound,
                           int n, int N_min) {
  const double l2 = grad_bound * grad_bound;
  return 2.0 * b_double_prime / N_min + 4.0 * b_prime * (b_prime + 1.0) * l2 +
         2.0 * l2 * (1.0 + std::sqrt(static_cast<double>(n))) / N_min;
}

BiasConstants bias_constants(const Measure& measure, const TargetFunction& f,
                             double epsilon, int N_min, int mc_samples,
                             int probe_points, std::uint64_t seed) {
  if (!f.has_gradient())
    throw std::logic_error("bias_constants: analytic gradient required");
  if (!f.gradient_bound)
    throw std::logic_error("bias_constants: gradient bound required");
  const int n = f.dimension();
  const double nn = static_cast<double>(n);

  // Probe points from the epsilon-interior.
  std::vector<Vector> probes;
  CounterRng probe_rng(seed, stream_tag::probe);
  int attempts = 0;
  while (static_cast<int>(probes.size()) < probe_points) {
    const Vector x = measure.draw(probe_rng);
    if (measure.domain().boundary_distance(x) >= epsilon) probes.push_back(x);
    if (++attempts > 1000 * probe_points)
      throw std::runtime_error("bias_constants: cannot place probes in the epsilon-interior");
  }

  BiasConstants out;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& x = probes[p];
    const Vector g = f.gradient(x);
    const Matrix gg = g * g.transpose();
    Matrix mean_p = Matrix::Zero(n, n);
    Matrix m2_p = Matrix::Zero(n, n);
    Matrix mean_pgg = Matrix::Zero(n, n);
    Matrix m2_pgg = Matrix::Zero(n, n);
    CounterRng rng(seed, derive_seed(seed, stream_tag::probe, 1000 + p));
    for (int k = 1; k <= mc_samples; ++k) {
      Vector y;
      if (measure.is_uniform()) {
        y = uniform_in_ball(rng, x, epsilon);
      } else {
        // y | x follows the conditional measure on the ball.
        for (;;) {
          y = uniform_in_ball(rng, x, epsilon);
          const double dens = measure.density(y);
          if (dens > measure.density_bound())
            throw std::runtime_error("bias_constants: density exceeds its declared bound");
          if (rng.next_unit() * measure.density_bound() < dens) break;
        }
      }
      const Projection proj = Projection::from_displacement(x, y);
      const Matrix P = proj.direction * proj.direction.transpose();
      const Vector pg = proj.apply(g);
      const Matrix PggP = pg * pg.transpose();
      // Welford update, elementwise.
      const Matrix d1 = P - mean_p;
      mean_p += d1 / k;
      m2_p += d1.cwiseProduct(P - mean_p);
      const Matrix d2 = PggP - mean_pgg;
      mean_pgg += d2 / k;
      m2_pgg += d2.cwiseProduct(PggP - mean_pgg);
    }
    const Matrix target2 = (2.0 * gg + g.squaredNorm() * Matrix::Identity(n, n)) /
                           (nn * (nn + 2.0));
    const double bp = nn * spectral_norm_symmetric(mean_p - Matrix::Identity(n, n) / nn);
    const double bpp = nn * nn * (mean_pgg - target2).norm();
    const double se_p =
        nn * std::sqrt(m2_p.sum() / mc_samples / std::max(mc_samples - 1, 1));
    const double se_pgg =
        nn * nn * std::sqrt(m2_pgg.sum() / mc_samples / std::max(mc_samples - 1, 1));
    if (bp > out.b_prime) {
      out.b_prime = bp;
      out.b_prime_se = se_p;
    }
    if (bpp > out.b_double_prime) {
      out.b_double_prime = bpp;
      out.b_double_prime_se = se_pgg;
    }
  }
  out.b_total = assemble_bias_total(out.b_prime, out.b_double_prime,
                                    *f.gradient_bound, n, N_min);
  return out;
}

}  // namespace amoment
