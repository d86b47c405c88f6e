#include "amoment/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace amoment {

namespace {

double off_diagonal_norm(const Matrix& M) {
  double acc = 0.0;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (i != j) acc += M(i, j) * M(i, j);
  return std::sqrt(acc);
}

void sign_normalize(Matrix& V) {
  for (int c = 0; c < V.cols(); ++c) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, c));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (V(arg, c) < 0.0) V.col(c) = -V.col(c);
  }
}

bool lex_less(const Matrix& V, int a, int b) {
  for (int i = 0; i < V.rows(); ++i) {
    if (V(i, a) < V(i, b)) return true;
    if (V(i, a) > V(i, b)) return false;
  }
  return false;
}

}  // namespace

SymmetricEigen symmetric_eigendecompose(const Matrix& M_in) {
  const int n = static_cast<int>(M_in.rows());
  if (M_in.cols() != n) throw std::invalid_argument("symmetric_eigendecompose: square input required");
  if (!M_in.allFinite()) throw std::invalid_argument("symmetric_eigendecompose: non-finite entries");
  Matrix M = (M_in + M_in.transpose()) / 2.0;
  Matrix V = Matrix::Identity(n, n);
  const double target = 1e-12 * M.norm();

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(M) > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = M(p, q);
        if (apq == 0.0) continue;
        const double app = M(p, p), aqq = M(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = M(k, p), mkq = M(k, q);
          M(k, p) = c * mkp - s * mkq;
          M(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = M(p, k), mqk = M(q, k);
          M(p, k) = c * mpk - s * mqk;
          M(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  sign_normalize(V);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (M(a, a) != M(b, b)) return M(a, a) > M(b, b);
    return lex_less(V, a, b);
  });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int c = 0; c < n; ++c) {
    out.values[c] = M(order[c], order[c]);
    out.vectors.col(c) = V.col(order[c]);
  }
  return out;
}

double spectral_norm_symmetric(const Matrix& M) {
  const SymmetricEigen eig = symmetric_eigendecompose(M);
  double best = 0.0;
  for (int i = 0; i < eig.values.size(); ++i)
    best = std::max(best, std::abs(eig.values[i]));
  return best;
}

ActiveSubspace eigendecompose(const MomentEstimate& est, int r) {
  const int n = est.n;
  if (r < 0) r = n;
  if (r < 1 || r > n) throw std::invalid_argument("eigendecompose: need 1 <= r <= n");
  const SymmetricEigen eig = symmetric_eigendecompose(est.matrix);
  ActiveSubspace as;
  as.eigenvalues = eig.values;
  as.eigenvectors = eig.vectors;
  as.basis = eig.vectors.leftCols(r);
  as.r = r;
  return as;
}

namespace {

void require_orthonormal(const Matrix& U, const char* who) {
  const int r = static_cast<int>(U.cols());
  if ((U.transpose() * U - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument(std::string(who) + ": basis not orthonormal");
}

}  // namespace

Vector principal_angles(const Matrix& U, const Matrix& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols())
    throw std::invalid_argument("principal_angles: dimension mismatch");
  require_orthonormal(U, "principal_angles");
  require_orthonormal(V, "principal_angles");
  const Matrix W = U.transpose() * V;
  const SymmetricEigen eig = symmetric_eigendecompose(W.transpose() * W);
  const int r = static_cast<int>(U.cols());
  Vector angles(r);
  // eigenvalues descend => singular values descend => angles ascend
  for (int i = 0; i < r; ++i) {
    const double sigma = std::sqrt(std::clamp(eig.values[i], 0.0, 1.0));
    angles[i] = std::acos(sigma);
  }
  return angles;
}

double principal_angle(const Matrix& U, const Matrix& V) {
  const Vector angles = principal_angles(U, V);
  return angles[angles.size() - 1];
}

SubspaceReport subspace_recovery_report(const TargetFunction& f,
                                        const MomentEstimate& est, int r) {
  if (!f.ridge_basis)
    throw std::logic_error("subspace_recovery_report: function has no ridge basis");
  if (r >= est.n) throw std::invalid_argument("subspace_recovery_report: need r < n");
  if (r < 1) throw std::invalid_argument("subspace_recovery_report: need r >= 1");
  if (f.ridge_basis->cols() != r)
    throw std::invalid_argument("subspace_recovery_report: r does not match the ridge basis");
  const ActiveSubspace as = eigendecompose(est, r);
  SubspaceReport report;
  report.eigenvalues = as.eigenvalues;
  report.r = r;
  report.principal_angles_rad = principal_angles(as.basis, *f.ridge_basis);
  report.principal_angle_rad = report.principal_angles_rad[r - 1];
  report.eigen_gap = as.eigenvalues[r - 1] - as.eigenvalues[r];
  return report;
}

}  // namespace amoment
