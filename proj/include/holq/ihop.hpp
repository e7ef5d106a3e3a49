#pragma once

#include "holq/holq.hpp"

namespace holq {

/// X = ell * (P_1, ..., P_K, I) . W with P_k symmetric positive definite and
/// tr P_k = 1, ell = ||(P_1^{-1}, ..., P_K^{-1}, I) . X||, ||W|| = 1.
struct IhopDecomposition {
  double ell = 0.0;
  std::vector<Matrix> p;        ///< empty for the sample mode
  std::vector<Matrix> factors;  ///< lower Cholesky factors of P_k, unit Frobenius norm
  Tensor core;
  Diagnostics diagnostics;

  Tensor reconstruct() const;
};

/// Block coordinate descent for the IHOP. The last mode is the sample mode.
/// The variant in `opts` selects the update; identity-scaled factors
/// I / sqrt(p_k) start the iteration unless `opts.init` says otherwise.
/// Stationarity is measured as the largest factor change over a sweep.
IhopDecomposition ihop(const Tensor& t, const SolverOptions& opts = {});

/// ihop with the plain variant forced.
IhopDecomposition ihop_plain(const Tensor& t, SolverOptions opts = {});

}  // namespace holq
