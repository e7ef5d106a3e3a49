#pragma once

#include "holq/holq.hpp"

namespace holq {

/// X = ell * (U_1, ..., U_K, I) . [(D_1, ..., D_K, I) . V]
///
/// U_k orthogonal, D_k positive diagonal with unit determinant stored as
/// the descending vector of its diagonal, V scaled all-orthonormal with
/// ||V|| = 1. The last mode is the sample mode and has no U or D.
struct IsvdDecomposition {
  double ell = 0.0;
  std::vector<Matrix> u;
  std::vector<Vector> d;
  Tensor core;
  Diagnostics diagnostics;

  Tensor reconstruct() const;
};

/// Core rotation of a HOLQ: L_k = U_k D_k W_k^T and V = (W_1^T, ..., I) . Q.
IsvdDecomposition isvd(const Tensor& t, const SolverOptions& opts = {});

/// Same rotation applied to an existing HOLQ.
IsvdDecomposition isvd_from_holq(const HolqDecomposition& d);

struct HooiOptions {
  double tol = 1e-10;
  std::size_t max_iter = 200;
};

/// Best multilinear rank-(r_1, ..., r_K) approximation (V_1, ..., V_K, I) . S.
struct HooiResult {
  std::vector<Matrix> factors;  ///< p_k x r_k, orthonormal columns
  Tensor core;                  ///< r_1 x ... x r_K x n
  double residual = 0.0;        ///< ||X - (V_1, ..., V_K, I) . S||
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> fit_history;  ///< ||S|| after initialization and after each sweep

  Tensor reconstruct() const;
};

/// Truncated HOSVD used as HOOI's starting point. `ranks` covers every mode
/// but the last.
HooiResult truncated_hosvd(const Tensor& t, std::span<const std::size_t> ranks);

HooiResult hooi(const Tensor& t, std::span<const std::size_t> ranks, const HooiOptions& opts = {});

struct TruncatedIsvd {
  std::vector<std::size_t> ranks;
  double ell = 0.0;
  std::vector<Matrix> u;  ///< p_k x r_k, orthonormal columns
  std::vector<Vector> d;  ///< r_k values, descending, product 1
  Tensor core;            ///< r_1 x ... x r_K x n, scaled all-orthonormal
  double residual = 0.0;
  double hooi_residual = 0.0;
  Diagnostics diagnostics;

  Tensor reconstruct() const;
};

/// Low-rank ISVD: an ISVD of the HOOI core, rotated back with U_k = V_k W_k.
TruncatedIsvd truncated_isvd(const Tensor& t, std::span<const std::size_t> ranks,
                             const SolverOptions& opts = {}, const HooiOptions& hooi_opts = {});

}  // namespace holq
