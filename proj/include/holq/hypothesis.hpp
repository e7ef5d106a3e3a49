#pragma once

#include "holq/holq.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace holq {

/// Observed modes merged into one mode of a hypothesis, first listed mode
/// varying fastest, with the constraint on the merged factor.
struct ModeGroup {
  std::vector<std::size_t> modes;  ///< 0-based observed modes
  ModeConstraint constraint = ModeConstraint::Unrestricted;

  bool operator==(const ModeGroup&) const = default;
};

/// A separable covariance model for a tensor of known order: the observed
/// modes are permuted into group order, each group is merged into a single
/// mode, and the merged tensor gets one constraint per mode.
struct HypothesisSpec {
  std::vector<ModeGroup> groups;

  bool operator==(const HypothesisSpec&) const = default;

  /// Every observed mode, in group order. A bijection on 0..order-1 for a
  /// valid spec.
  std::vector<std::size_t> permutation() const;
  std::vector<ModeConstraint> constraints() const;
  std::size_t order() const;  ///< number of observed modes covered

  /// Throws DimensionError unless the groups cover 0..order-1 exactly once.
  void validate(std::size_t observed_order) const;

  /// Shape after the plan is applied.
  Shape shape(const Shape& observed) const;
  /// Permute and merge `t` into the hypothesis shape.
  Tensor apply(const Tensor& t) const;

  /// Canonical text: single-mode groups as letters, merged ones as (jk)x.
  std::string to_string() const;
};

/// Parses the hypothesis mini-language. Each letter u, d, c or i takes the
/// next unused observed mode; "(jk)x" merges 1-based observed modes j and k
/// (more digits merge more modes, commas may separate them) under
/// constraint x. Whitespace is cosmetic. The result is validated against
/// `observed_order`.
HypothesisSpec parse_hypothesis(std::string_view text, std::size_t observed_order);

/// Plain one-group-per-mode spec.
HypothesisSpec separable_hypothesis(std::span<const ModeConstraint> constraints);

/// Structural nesting of h0 in h1: every h1 group is a union of h0 groups
/// and its class contains the Kronecker product of their classes.
/// Identity < Diagonal < Unrestricted and Identity < UnitDiagCholesky <
/// Unrestricted; a merged group of Diagonal (or UnitDiagCholesky) parts
/// stays in that class. Other pairs are reported as not nested.
bool is_nested(const HypothesisSpec& h0, const HypothesisSpec& h1);

}  // namespace holq
