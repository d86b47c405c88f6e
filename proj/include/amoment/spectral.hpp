#pragma once

#include "amoment/estimators.hpp"
#include "amoment/functions.hpp"

namespace amoment {

// Full spectrum of a moment estimate. Eigenvalues descending; eigenvector
// columns orthonormal, sign-normalized so the largest-magnitude component
// of each is positive; equal eigenvalues ordered by lexicographic
// comparison of their (normalized) eigenvectors.
struct ActiveSubspace {
  Vector eigenvalues;   // length n, descending
  Matrix eigenvectors;  // n x n, columns
  Matrix basis;         // n x r, leading columns
  int r = 0;
};

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns
};

// Cyclic Jacobi on the symmetrized input; sweeps until
// off(M) <= 1e-12 * ||M||_F.
SymmetricEigen symmetric_eigendecompose(const Matrix& M);

double spectral_norm_symmetric(const Matrix& M);

ActiveSubspace eigendecompose(const MomentEstimate& est, int r = -1);

// Largest principal angle between the column spans, in [0, pi/2].
double principal_angle(const Matrix& U, const Matrix& V);
// All r principal angles, ascending.
Vector principal_angles(const Matrix& U, const Matrix& V);

struct SubspaceReport {
  Vector eigenvalues;
  int r = 0;
  double principal_angle_rad = 0.0;
  Vector principal_angles_rad;
  double eigen_gap = 0.0;
};

// Compares the estimated leading-r subspace against the known ridge basis.
SubspaceReport subspace_recovery_report(const TargetFunction& f,
                                        const MomentEstimate& est, int r);

}  // namespace amoment
