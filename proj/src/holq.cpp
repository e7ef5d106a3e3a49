#include "holq/holq.hpp"

#include "holq/error.hpp"
#include "holq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace holq {

char to_char(ModeConstraint c) {
  switch (c) {
    case ModeConstraint::Unrestricted: return 'u';
    case ModeConstraint::Diagonal: return 'd';
    case ModeConstraint::UnitDiagCholesky: return 'c';
    case ModeConstraint::Identity: return 'i';
  }
  return '?';
}

std::optional<ModeConstraint> constraint_from_char(char c) {
  switch (c) {
    case 'u': return ModeConstraint::Unrestricted;
    case 'd': return ModeConstraint::Diagonal;
    case 'c': return ModeConstraint::UnitDiagCholesky;
    case 'i': return ModeConstraint::Identity;
    default: return std::nullopt;
  }
}

std::string to_string(ModeConstraint c) {
  switch (c) {
    case ModeConstraint::Unrestricted: return "unrestricted";
    case ModeConstraint::Diagonal: return "diagonal";
    case ModeConstraint::UnitDiagCholesky: return "unit_diag_cholesky";
    case ModeConstraint::Identity: return "identity";
  }
  return "unknown";
}

std::vector<ModeConstraint> parse_constraints(std::string_view letters) {
  std::vector<ModeConstraint> out;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const char ch = letters[i];
    if (ch == ' ' || ch == '\t') continue;
    auto c = constraint_from_char(ch);
    if (!c) {
      throw ParseError("unknown constraint letter '" + std::string(1, ch) + "' at position " +
                       std::to_string(i) + " (expected one of u, d, c, i)");
    }
    out.push_back(*c);
  }
  return out;
}

std::string to_string(Variant v) {
  return v == Variant::Orthogonalized ? "orthogonalized" : "plain";
}

void SolverOptions::validate() const {
  if (!(tol > 0)) throw Error("solver tolerance must be positive");
  if (max_iter < 1) throw Error("max_iter must be at least 1");
  if (!(blowup_cond > 1)) throw Error("blowup_cond must exceed 1");
  if (!(core_tol > 0)) throw Error("core_tol must be positive");
}

Matrix HolqDecomposition::factor(std::size_t k) const {
  if (factors.at(k).size() == 0) {
    const auto p = static_cast<Eigen::Index>(core.dim(k));
    return Matrix::Identity(p, p);
  }
  return factors[k];
}

Tensor HolqDecomposition::reconstruct() const { return ell * tucker_mult(factors, core); }

Tensor HorqDecomposition::reconstruct() const { return r * tucker_mult(factors, core); }

double CoreReport::max() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

CoreReport check_core(const Tensor& core, std::span<const ModeConstraint> constraints) {
  if (constraints.size() != core.order())
    throw DimensionError("check_core: one constraint per mode is required");
  CoreReport report;
  for (std::size_t k = 0; k < core.order(); ++k) {
    if (constraints[k] == ModeConstraint::Identity) {
      report.residuals.push_back(0.0);
      continue;
    }
    const Matrix g = mode_gram(core, k);
    const double inv_p = 1.0 / static_cast<double>(core.dim(k));
    switch (constraints[k]) {
      case ModeConstraint::Unrestricted:
        report.residuals.push_back((g - inv_p * Matrix::Identity(g.rows(), g.cols())).norm());
        break;
      case ModeConstraint::Diagonal:
        report.residuals.push_back((g.diagonal().array() - inv_p).matrix().norm());
        break;
      case ModeConstraint::UnitDiagCholesky: {
        Matrix off = g;
        off.diagonal().setZero();
        report.residuals.push_back(off.norm());
        break;
      }
      case ModeConstraint::Identity: break;
    }
  }
  return report;
}

double criterion(const Tensor& t, std::span<const Matrix> factors) {
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (factors[k].size() == 0) continue;
    if ((factors[k].diagonal().array() == 0.0).any())
      throw RankDeficientError("criterion: factor of mode " + std::to_string(k) + " is singular");
  }
  return frob_norm(tucker_solve_lower(factors, t));
}

namespace {

struct State {
  double ell = 0.0;
  std::vector<Matrix> factors;
  Tensor core;
};

bool is_lower(const Matrix& m) {
  return m.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0;
}

Matrix admit_init(const Matrix& m, ModeConstraint c, std::size_t mode, std::size_t p) {
  const auto n = static_cast<Eigen::Index>(p);
  if (c == ModeConstraint::Identity) return Matrix();
  if (m.size() == 0) return Matrix::Identity(n, n);
  const std::string where = "initial factor of mode " + std::to_string(mode);
  if (m.rows() != n || m.cols() != n) throw DimensionError(where + " has the wrong size");
  if (!is_lower(m) || !(m.diagonal().array() > 0).all())
    throw Error(where + " must be lower triangular with positive diagonal");
  Matrix out = m;
  switch (c) {
    case ModeConstraint::Unrestricted:
      out /= std::exp(log_det_triangular(out) / static_cast<double>(p));
      break;
    case ModeConstraint::Diagonal:
      if (!out.isDiagonal(0.0)) throw Error(where + " must be diagonal");
      out /= std::exp(log_det_triangular(out) / static_cast<double>(p));
      break;
    case ModeConstraint::UnitDiagCholesky:
      if (!out.diagonal().isOnes(1e-12)) throw Error(where + " must have unit diagonal");
      out.diagonal().setOnes();
      break;
    case ModeConstraint::Identity: break;
  }
  return out;
}

// Block update of mode k that rewrites the factor and the core together.
void update_orthogonalized(State& s, std::size_t k, ModeConstraint c) {
  const Shape& shape = s.core.shape();
  const double p = static_cast<double>(shape[k]);
  switch (c) {
    case ModeConstraint::Unrestricted: {
      auto [l, z] = lq(unfold(s.core, k));
      Matrix lk = s.factors[k].triangularView<Eigen::Lower>() * l;
      const double scale = std::exp(log_det_triangular(lk) / p);
      const double z_norm = z.norm();
      s.ell *= scale * z_norm;
      s.factors[k] = lk / scale;
      s.core = fold(z / z_norm, k, shape);
      break;
    }
    case ModeConstraint::Diagonal: {
      const Vector f = mode_gram(s.core, k).diagonal().cwiseSqrt();
      if (!(f.minCoeff() > kRankTol)) {
        throw RankDeficientError("mode " + std::to_string(k) + " has a zero slice");
      }
      Tensor scaled = mode_product(s.core, f.cwiseInverse().asDiagonal().toDenseMatrix(), k);
      const double scaled_norm = frob_norm(scaled);
      const double scale = std::exp(f.array().log().mean());
      s.ell *= scale * scaled_norm;
      const Vector d = s.factors[k].diagonal().cwiseProduct(f) / scale;
      s.factors[k] = d.asDiagonal();
      s.core = scaled / scaled_norm;
      break;
    }
    case ModeConstraint::UnitDiagCholesky: {
      auto [l, z] = lq(unfold(s.core, k));
      const Vector f = l.diagonal();
      Matrix lk = s.factors[k].triangularView<Eigen::Lower>() * (l * f.cwiseInverse().asDiagonal());
      lk.diagonal().setOnes();
      Matrix fz = f.asDiagonal() * z;
      const double fz_norm = fz.norm();
      s.ell *= fz_norm;
      s.factors[k] = std::move(lk);
      s.core = fold(fz / fz_norm, k, shape);
      break;
    }
    case ModeConstraint::Identity: break;
  }
}

// Block update of mode k from the data whitened along every other mode.
void update_plain(State& s, const Tensor& t, std::size_t k, ModeConstraint c) {
  Tensor y = t;
  for (std::size_t j = 0; j < t.order(); ++j) {
    if (j == k || s.factors[j].size() == 0) continue;
    y = mode_solve_lower(y, s.factors[j], j);
  }
  const Matrix yk = unfold(y, k);
  switch (c) {
    case ModeConstraint::Unrestricted: s.factors[k] = normalized_lq(yk).l; break;
    case ModeConstraint::Diagonal: s.factors[k] = diag_minimizer(yk); break;
    case ModeConstraint::UnitDiagCholesky: s.factors[k] = unit_diag_minimizer(yk).l; break;
    case ModeConstraint::Identity: break;
  }
}

void check_divergence(const State& s, double ell0, std::size_t sweep, const SolverOptions& opts) {
  for (std::size_t k = 0; k < s.factors.size(); ++k) {
    if (s.factors[k].size() == 0) continue;
    const double cond = cond_lower(s.factors[k]);
    if (!(cond <= opts.blowup_cond)) {
      throw ExistenceError("HOLQ may not exist: factor of mode " + std::to_string(k) +
                           " reached condition number " + std::to_string(cond) + " at sweep " +
                           std::to_string(sweep) + " (limit " + std::to_string(opts.blowup_cond) +
                           ")");
    }
  }
  if (!(s.ell > ell0 * 1e-14)) {
    throw ExistenceError("HOLQ may not exist: scale collapsed toward zero at sweep " +
                         std::to_string(sweep));
  }
}

}  // namespace

HolqDecomposition holq_junior(const Tensor& t, std::span<const ModeConstraint> constraints,
                              const SolverOptions& opts) {
  opts.validate();
  if (constraints.size() != t.order()) {
    throw DimensionError("holq_junior: got " + std::to_string(constraints.size()) +
                         " constraints for an order-" + std::to_string(t.order()) + " tensor");
  }
  if (!opts.init.empty() && opts.init.size() != t.order())
    throw DimensionError("holq_junior: initial factors must cover every mode");

  State s;
  s.factors.resize(t.order());
  for (std::size_t k = 0; k < t.order(); ++k) {
    s.factors[k] = admit_init(opts.init.empty() ? Matrix() : opts.init[k], constraints[k], k,
                              t.dim(k));
  }
  s.core = tucker_solve_lower(s.factors, t);
  s.ell = frob_norm(s.core);
  if (!(s.ell > 0)) throw RankDeficientError("holq: input tensor is zero");
  s.core /= s.ell;

  HolqDecomposition out;
  out.constraints.assign(constraints.begin(), constraints.end());
  Diagnostics& diag = out.diagnostics;
  diag.variant = opts.variant;
  diag.init = opts.init.empty() ? "identity" : "user";
  diag.criterion_history.push_back(s.ell);

  const bool any_active = std::any_of(constraints.begin(), constraints.end(),
                                      [](auto c) { return c != ModeConstraint::Identity; });
  const double ell0 = s.ell;
  double residual = check_core(s.core, constraints).max();

  if (!any_active) {
    diag.converged = true;
  }
  for (std::size_t sweep = 1; any_active && sweep <= opts.max_iter; ++sweep) {
    for (std::size_t k = 0; k < t.order(); ++k) {
      if (constraints[k] == ModeConstraint::Identity) continue;
      if (opts.variant == Variant::Orthogonalized) {
        update_orthogonalized(s, k, constraints[k]);
      } else {
        update_plain(s, t, k, constraints[k]);
      }
    }
    if (opts.variant == Variant::Plain) {
      s.core = tucker_solve_lower(s.factors, t);
      s.ell = frob_norm(s.core);
      s.core /= s.ell;
    }
    diag.iterations = sweep;
    diag.criterion_history.push_back(s.ell);
    check_divergence(s, ell0, sweep, opts);
    if (opts.on_sweep) opts.on_sweep(sweep, s.factors, s.ell);

    const double prev = diag.criterion_history[diag.criterion_history.size() - 2];
    const double change = std::abs(prev - s.ell) / prev;
    residual = check_core(s.core, constraints).max();
    if (change < opts.tol && residual < opts.core_tol) {
      diag.converged = true;
      break;
    }
  }
  diag.residual = residual;

  out.ell = s.ell;
  out.factors = std::move(s.factors);
  out.core = std::move(s.core);
  return out;
}

HolqDecomposition holq(const Tensor& t, const SolverOptions& opts) {
  if (t.order() < 2) throw DimensionError("holq: needs at least one mode besides the sample mode");
  std::vector<ModeConstraint> constraints(t.order(), ModeConstraint::Unrestricted);
  constraints.back() = ModeConstraint::Identity;
  return holq_junior(t, constraints, opts);
}

HorqDecomposition horq(const HolqDecomposition& d) {
  HorqDecomposition out;
  std::vector<Matrix> rotations(d.factors.size());
  double scale = 1.0;
  for (std::size_t k = 0; k < d.factors.size(); ++k) {
    if (d.constraints[k] == ModeConstraint::Identity) {
      out.factors.emplace_back();
      continue;
    }
    if (d.constraints[k] != ModeConstraint::Unrestricted)
      throw Error("horq: factor of mode " + std::to_string(k) + " is not unrestricted");
    auto [r, z] = rq(d.factors[k]);
    const double det_root = std::exp(log_det_triangular(r) / static_cast<double>(r.rows()));
    out.factors.push_back(r / det_root);
    scale *= det_root;
    rotations[k] = std::move(z);
  }
  Tensor rotated = tucker_mult(rotations, d.core);
  const double norm = frob_norm(rotated);
  out.r = d.ell * scale * norm;
  out.core = rotated / norm;
  return out;
}

}  // namespace holq
