#include "holq/ihop.hpp"

#include "holq/error.hpp"
#include "holq/kernels.hpp"

#include <cmath>
#include <string>

namespace holq {

namespace {

Matrix initial_factor(const SolverOptions& opts, std::size_t k, std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  if (opts.init.empty() || opts.init[k].size() == 0)
    return Matrix::Identity(n, n) / std::sqrt(static_cast<double>(p));
  const Matrix& m = opts.init[k];
  if (m.rows() != n || m.cols() != n)
    throw DimensionError("initial factor of mode " + std::to_string(k) + " has the wrong size");
  if (!m.isLowerTriangular(0.0) || !(m.diagonal().array() > 0).all())
    throw Error("initial factor of mode " + std::to_string(k) +
                " must be lower triangular with positive diagonal");
  return m / m.norm();
}

}  // namespace

Tensor IhopDecomposition::reconstruct() const { return ell * tucker_mult(p, core); }

IhopDecomposition ihop(const Tensor& t, const SolverOptions& opts) {
  opts.validate();
  if (t.order() < 2) throw DimensionError("ihop: needs at least one mode besides the sample mode");
  const std::size_t modes = t.order() - 1;
  if (!opts.init.empty() && opts.init.size() != t.order())
    throw DimensionError("ihop: initial factors must cover every mode");

  std::vector<Matrix> factors(t.order());
  for (std::size_t k = 0; k < modes; ++k) factors[k] = initial_factor(opts, k, t.dim(k));

  Tensor r = tucker_solve_lower(factors, t);
  double ell = frob_norm(r);
  if (!(ell > 0)) throw RankDeficientError("ihop: input tensor is zero");
  r /= ell;
  const double ell0 = ell;

  IhopDecomposition out;
  Diagnostics& diag = out.diagnostics;
  diag.variant = opts.variant;
  diag.init = opts.init.empty() ? "identity" : "user";
  diag.criterion_history.push_back(ell);

  double change = 0.0;
  for (std::size_t sweep = 1; sweep <= opts.max_iter; ++sweep) {
    change = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
      Matrix next;
      if (opts.variant == Variant::Orthogonalized) {
        auto pol = polar(factors[k] * unfold(r, k));
        Matrix l = cholesky(pol.p);
        r = fold(l.transpose() * pol.w, k, r.shape());
        const double l_norm = l.norm();
        const double r_norm = frob_norm(r);
        ell *= l_norm * r_norm;
        next = l / l_norm;
        r /= r_norm;
      } else {
        Tensor y = t;
        for (std::size_t j = 0; j < modes; ++j)
          if (j != k) y = mode_solve_lower(y, factors[j], j);
        Matrix l = cholesky(polar(unfold(y, k)).p);
        next = l / l.norm();
      }
      change = std::max(change, (next - factors[k]).norm());
      factors[k] = std::move(next);
    }
    if (opts.variant == Variant::Plain) {
      r = tucker_solve_lower(factors, t);
      ell = frob_norm(r);
      r /= ell;
    }
    diag.iterations = sweep;
    diag.criterion_history.push_back(ell);

    for (std::size_t k = 0; k < modes; ++k) {
      const double cond = cond_lower(factors[k]);
      if (!(cond <= opts.blowup_cond)) {
        throw ExistenceError("IHOP may not exist: factor of mode " + std::to_string(k) +
                             " reached condition number " + std::to_string(cond) +
                             " at sweep " + std::to_string(sweep));
      }
    }
    if (!(ell > ell0 * 1e-14))
      throw ExistenceError("IHOP may not exist: scale collapsed toward zero");
    if (opts.on_sweep) opts.on_sweep(sweep, factors, ell);

    const double prev = diag.criterion_history[diag.criterion_history.size() - 2];
    if (std::abs(prev - ell) / prev < opts.tol && change < opts.core_tol) {
      diag.converged = true;
      break;
    }
  }
  diag.residual = change;

  std::vector<Matrix> inverses(t.order());
  out.p.resize(t.order());
  for (std::size_t k = 0; k < modes; ++k) {
    out.p[k] = factors[k] * factors[k].transpose();
    Matrix l_inv = Matrix::Identity(factors[k].rows(), factors[k].cols());
    factors[k].triangularView<Eigen::Lower>().solveInPlace(l_inv);
    inverses[k] = l_inv.transpose() * l_inv;
  }
  out.core = tucker_mult(inverses, t);
  out.ell = frob_norm(out.core);
  out.core /= out.ell;
  out.factors = std::move(factors);
  return out;
}

IhopDecomposition ihop_plain(const Tensor& t, SolverOptions opts) {
  opts.variant = Variant::Plain;
  return ihop(t, opts);
}

}  // namespace holq
