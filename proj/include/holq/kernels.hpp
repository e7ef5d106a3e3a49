#pragma once

#include "holq/tensor.hpp"

namespace holq {

/// Relative pivot tolerance shared by every factorization: a factorization
/// of X fails when a required pivot falls below kRankTol * ||X||_F.
inline constexpr double kRankTol = 1e-12;

struct LqFactors {
  Matrix l;  ///< p x p lower triangular, positive diagonal
  Matrix q;  ///< p x n, orthonormal rows
};

struct RqFactors {
  Matrix r;  ///< p x p upper triangular, positive diagonal
  Matrix z;  ///< p x n, orthonormal rows
};

struct SvdFactors {
  Matrix u;  ///< p x p orthogonal
  Vector d;  ///< min(p, n) singular values, descending
  Matrix v;  ///< n x min(p, n), orthonormal columns
};

struct PolarFactors {
  Matrix p;  ///< symmetric positive definite
  Matrix w;  ///< orthonormal rows
};

/// Scale-separated LQ: X = ell * L * Q with det L = 1 and ||Q||_F = 1, so
/// Q Q^T = I / p. L minimizes ||L~^{-1} X|| over unit-determinant lower
/// triangular matrices and ell is the minimum.
struct NormalizedLq {
  double ell = 0.0;
  Matrix l;
  Matrix q;
};

/// Scale-separated polar decomposition: X = ell * P * W with tr P = 1 and
/// ||W||_F = 1, so W W^T = I / p. P minimizes tr(P~^{-1} X X^T) over
/// unit-trace positive definite matrices.
struct NormalizedPolar {
  double ell = 0.0;
  Matrix p;
  Matrix w;
};

/// Minimizer over unit-diagonal lower triangular matrices and the row
/// orthogonal remainder: X = L * remainder.
struct UnitDiagFactors {
  Matrix l;
  Matrix remainder;
};

/// X = L Q for a p x n matrix of full row rank, p <= n. Throws
/// RankDeficientError otherwise.
LqFactors lq(const Matrix& x);

/// X = R Z for a p x n matrix of full row rank, p <= n.
RqFactors rq(const Matrix& x);

/// Lower Cholesky factor. Throws NotPositiveDefiniteError.
Matrix cholesky(const Matrix& s);

/// X = U diag(d) V^T. Each column of U has its largest-magnitude entry
/// positive (first such row on ties).
SvdFactors svd(const Matrix& x);

/// Left polar decomposition X = P W via the SVD: P = U D U^T, W = U V^T.
PolarFactors polar(const Matrix& x);

NormalizedLq normalized_lq(const Matrix& x);
NormalizedPolar normalized_polar(const Matrix& x);

/// Unit-determinant positive diagonal D minimizing ||D^{-1} X||:
/// D_ii = (S_ii / geomean(S_11, ..., S_pp))^{1/2} with S = X X^T.
/// Throws RankDeficientError on a zero row.
Matrix diag_minimizer(const Matrix& x);

/// Unit-diagonal lower triangular L minimizing ||L^{-1} X||, from the LQ
/// X = L0 Q0 as L = L0 F^{-1} with F = diag(L0); remainder = F Q0.
UnitDiagFactors unit_diag_minimizer(const Matrix& x);

/// log |det L| for a triangular matrix.
double log_det_triangular(const Matrix& l);

/// Frobenius condition number ||L||_F ||L^{-1}||_F of a lower triangular
/// matrix (an upper bound on p times the 2-norm condition number).
double cond_lower(const Matrix& l);

}  // namespace holq
