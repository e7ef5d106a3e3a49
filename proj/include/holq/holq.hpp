#pragma once

#include "holq/tensor.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace holq {

/// Factor class of one mode.
///
///   Unrestricted      lower triangular, positive diagonal, det 1
///   Diagonal          positive diagonal, det 1
///   UnitDiagCholesky  lower triangular with unit diagonal
///   Identity          fixed to I
enum class ModeConstraint { Unrestricted, Diagonal, UnitDiagCholesky, Identity };

/// One-letter code used on the command line: u, d, c, i.
char to_char(ModeConstraint c);
std::optional<ModeConstraint> constraint_from_char(char c);
std::string to_string(ModeConstraint c);

/// Parses a run of constraint letters ("uui"); whitespace is ignored.
std::vector<ModeConstraint> parse_constraints(std::string_view letters);

enum class Variant {
  Orthogonalized,  ///< updates factors and core together (default)
  Plain,           ///< recomputes the partially whitened data for every mode
};

std::string to_string(Variant v);

/// Called after every completed sweep with the current factors and the
/// criterion value.
using SweepObserver =
    std::function<void(std::size_t sweep, const std::vector<Matrix>& factors, double criterion)>;

struct SolverOptions {
  double tol = 1e-10;             ///< relative criterion change that ends the iteration
  std::size_t max_iter = 500;     ///< sweep cap
  Variant variant = Variant::Orthogonalized;
  double blowup_cond = 1e12;      ///< factor condition number that signals divergence
  double core_tol = 1e-9;         ///< stationarity residual required at exit
  std::vector<Matrix> init;       ///< initial factors per mode; empty means identity
  SweepObserver on_sweep;

  void validate() const;
};

struct Diagnostics {
  std::size_t iterations = 0;
  bool converged = false;
  /// Criterion after initialization and after each sweep.
  std::vector<double> criterion_history;
  /// Largest stationarity residual at exit.
  double residual = 0.0;
  Variant variant = Variant::Orthogonalized;
  std::string init = "identity";
};

/// X = ell * (L_1, ..., L_K) . Q with ||Q|| = 1.
struct HolqDecomposition {
  double ell = 0.0;
  /// One factor per mode. Identity-constrained modes hold an empty matrix.
  std::vector<Matrix> factors;
  Tensor core;
  std::vector<ModeConstraint> constraints;
  Diagnostics diagnostics;

  /// Factor of mode k, with identity modes materialized.
  Matrix factor(std::size_t k) const;
  Tensor reconstruct() const;
};

/// X = r * (R_1, ..., R_K) . Z with unit-determinant upper triangular R_k.
struct HorqDecomposition {
  double r = 0.0;
  std::vector<Matrix> factors;  ///< empty for identity modes
  Tensor core;

  Tensor reconstruct() const;
};

/// ||(L_1^{-1}, ..., L_K^{-1}) . t|| by triangular solves. Empty factors
/// stand for the identity.
double criterion(const Tensor& t, std::span<const Matrix> factors);

/// HOLQ with the last mode treated as the sample mode (fixed to identity)
/// and every other mode unrestricted. Requires order >= 2.
HolqDecomposition holq(const Tensor& t, const SolverOptions& opts = {});

/// HOLQ junior: one constraint per mode of `t`.
HolqDecomposition holq_junior(const Tensor& t, std::span<const ModeConstraint> constraints,
                              const SolverOptions& opts = {});

/// HORQ from a HOLQ whose factors are all unrestricted or identity.
HorqDecomposition horq(const HolqDecomposition& d);

/// Per-mode stationarity residuals of a core:
///   Unrestricted      ||Q_(k) Q_(k)^T - I/p_k||_F
///   Diagonal          ||diag(Q_(k) Q_(k)^T) - 1/p_k||_2
///   UnitDiagCholesky  ||offdiag(Q_(k) Q_(k)^T)||_F
///   Identity          0
struct CoreReport {
  std::vector<double> residuals;
  double max() const;
};

CoreReport check_core(const Tensor& core, std::span<const ModeConstraint> constraints);

}  // namespace holq
