#include "holq/spectral.hpp"

#include "holq/error.hpp"
#include "holq/kernels.hpp"

#include <cmath>
#include <string>

namespace holq {

namespace {

std::vector<Matrix> diagonals(const std::vector<Vector>& d) {
  std::vector<Matrix> out;
  for (const auto& v : d) out.push_back(v.asDiagonal());
  return out;
}

std::vector<Matrix> transposed(const std::vector<Matrix>& mats) {
  std::vector<Matrix> out;
  for (const auto& m : mats) out.push_back(m.transpose());
  return out;
}

void check_ranks(const Tensor& t, std::span<const std::size_t> ranks) {
  if (t.order() < 2 || ranks.size() != t.order() - 1) {
    throw DimensionError("expected one rank per non-sample mode (" +
                         std::to_string(t.order() == 0 ? 0 : t.order() - 1) + "), got " +
                         std::to_string(ranks.size()));
  }
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    if (ranks[k] < 1 || ranks[k] > t.dim(k)) {
      throw DimensionError("rank " + std::to_string(ranks[k]) + " for mode " + std::to_string(k) +
                           " is outside [1, " + std::to_string(t.dim(k)) + "]");
    }
  }
}

Matrix leading_left_vectors(const Matrix& m, std::size_t r) {
  return svd(m).u.leftCols(static_cast<Eigen::Index>(r));
}

}  // namespace

Tensor IsvdDecomposition::reconstruct() const {
  return ell * tucker_mult(u, tucker_mult(diagonals(d), core));
}

Tensor HooiResult::reconstruct() const { return tucker_mult(factors, core); }

Tensor TruncatedIsvd::reconstruct() const {
  return ell * tucker_mult(u, tucker_mult(diagonals(d), core));
}

IsvdDecomposition isvd_from_holq(const HolqDecomposition& h) {
  const std::size_t order = h.core.order();
  if (order < 2 || h.constraints.back() != ModeConstraint::Identity)
    throw Error("isvd: the last mode must be the identity-constrained sample mode");
  IsvdDecomposition out;
  out.ell = h.ell;
  out.diagnostics = h.diagnostics;
  std::vector<Matrix> rotations;
  for (std::size_t k = 0; k + 1 < order; ++k) {
    if (h.constraints[k] != ModeConstraint::Unrestricted)
      throw Error("isvd: mode " + std::to_string(k) + " is not unrestricted");
    auto f = svd(h.factors[k]);
    out.u.push_back(std::move(f.u));
    out.d.push_back(std::move(f.d));
    rotations.push_back(f.v.transpose());
  }
  out.core = tucker_mult(rotations, h.core);
  return out;
}

IsvdDecomposition isvd(const Tensor& t, const SolverOptions& opts) {
  return isvd_from_holq(holq(t, opts));
}

HooiResult truncated_hosvd(const Tensor& t, std::span<const std::size_t> ranks) {
  check_ranks(t, ranks);
  HooiResult out;
  for (std::size_t k = 0; k < ranks.size(); ++k)
    out.factors.push_back(leading_left_vectors(unfold(t, k), ranks[k]));
  out.core = tucker_mult(transposed(out.factors), t);
  out.residual = frob_norm(t - out.reconstruct());
  out.fit_history.push_back(frob_norm(out.core));
  return out;
}

HooiResult hooi(const Tensor& t, std::span<const std::size_t> ranks, const HooiOptions& opts) {
  HooiResult out = truncated_hosvd(t, ranks);
  const std::size_t modes = ranks.size();
  for (std::size_t sweep = 1; sweep <= opts.max_iter; ++sweep) {
    for (std::size_t k = 0; k < modes; ++k) {
      std::vector<Matrix> projections = transposed(out.factors);
      projections[k] = Matrix();
      const Tensor y = tucker_mult(projections, t);
      out.factors[k] = leading_left_vectors(unfold(y, k), ranks[k]);
    }
    out.core = tucker_mult(transposed(out.factors), t);
    const double fit = frob_norm(out.core);
    const double prev = out.fit_history.back();
    out.fit_history.push_back(fit);
    out.iterations = sweep;
    if (prev == 0.0 || std::abs(fit - prev) <= opts.tol * prev) {
      out.converged = true;
      break;
    }
  }
  out.residual = frob_norm(t - out.reconstruct());
  return out;
}

TruncatedIsvd truncated_isvd(const Tensor& t, std::span<const std::size_t> ranks,
                             const SolverOptions& opts, const HooiOptions& hooi_opts) {
  const HooiResult h = hooi(t, ranks, hooi_opts);
  IsvdDecomposition inner = isvd(h.core, opts);

  TruncatedIsvd out;
  out.ranks.assign(ranks.begin(), ranks.end());
  out.ell = inner.ell;
  out.d = std::move(inner.d);
  out.diagnostics = std::move(inner.diagnostics);
  out.core = std::move(inner.core);
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    Matrix u = h.factors[k] * inner.u[k];
    // Same column sign convention as the svd kernel; the matching core slice
    // flips with the column so the product is unchanged.
    Vector signs = Vector::Ones(u.cols());
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      Eigen::Index arg = 0;
      u.col(j).cwiseAbs().maxCoeff(&arg);
      if (u(arg, j) < 0) {
        signs(j) = -1.0;
        u.col(j) *= -1.0;
      }
    }
    if ((signs.array() < 0).any())
      out.core = mode_product(out.core, signs.asDiagonal().toDenseMatrix(), k);
    out.u.push_back(std::move(u));
  }
  out.hooi_residual = h.residual;
  out.residual = frob_norm(t - out.reconstruct());
  return out;
}

}  // namespace holq
