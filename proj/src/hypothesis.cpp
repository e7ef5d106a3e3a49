#include "holq/hypothesis.hpp"

#include "holq/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace holq {

std::vector<std::size_t> HypothesisSpec::permutation() const {
  std::vector<std::size_t> perm;
  for (const auto& g : groups) perm.insert(perm.end(), g.modes.begin(), g.modes.end());
  return perm;
}

std::vector<ModeConstraint> HypothesisSpec::constraints() const {
  std::vector<ModeConstraint> out;
  for (const auto& g : groups) out.push_back(g.constraint);
  return out;
}

std::size_t HypothesisSpec::order() const { return permutation().size(); }

void HypothesisSpec::validate(std::size_t observed_order) const {
  if (groups.empty()) throw DimensionError("hypothesis has no modes");
  std::vector<bool> seen(observed_order, false);
  for (const auto& g : groups) {
    if (g.modes.empty()) throw DimensionError("hypothesis has an empty mode group");
    for (auto m : g.modes) {
      if (m >= observed_order) {
        throw DimensionError("hypothesis refers to mode " + std::to_string(m + 1) +
                             " but the tensor has " + std::to_string(observed_order) + " modes");
      }
      if (seen[m]) throw DimensionError("hypothesis uses mode " + std::to_string(m + 1) + " twice");
      seen[m] = true;
    }
  }
  for (std::size_t m = 0; m < observed_order; ++m) {
    if (!seen[m]) {
      throw DimensionError("hypothesis \"" + to_string() + "\" does not cover mode " +
                           std::to_string(m + 1) + " of " + std::to_string(observed_order));
    }
  }
}

Shape HypothesisSpec::shape(const Shape& observed) const {
  validate(observed.size());
  Shape out;
  for (const auto& g : groups) {
    std::size_t size = 1;
    for (auto m : g.modes) size *= observed[m];
    out.push_back(size);
  }
  return out;
}

Tensor HypothesisSpec::apply(const Tensor& t) const {
  Shape merged = shape(t.shape());
  const auto perm = permutation();
  bool identity = true;
  for (std::size_t i = 0; i < perm.size(); ++i) identity = identity && perm[i] == i;
  if (identity) {
    if (merged == t.shape()) return t;
    return Tensor(std::move(merged), std::vector<double>(t.data().begin(), t.data().end()));
  }
  Tensor p = permute_modes(t, perm);
  return Tensor(std::move(merged), std::vector<double>(p.data().begin(), p.data().end()));
}

std::string HypothesisSpec::to_string() const {
  std::string out;
  for (const auto& g : groups) {
    if (!out.empty()) out += ' ';
    if (g.modes.size() > 1) {
      bool wide = false;
      for (auto m : g.modes) wide = wide || m + 1 > 9;
      out += '(';
      for (std::size_t i = 0; i < g.modes.size(); ++i) {
        if (wide && i > 0) out += ',';
        out += std::to_string(g.modes[i] + 1);
      }
      out += ')';
    }
    out += to_char(g.constraint);
  }
  return out;
}

HypothesisSpec parse_hypothesis(std::string_view text, std::size_t observed_order) {
  HypothesisSpec spec;
  std::set<std::size_t> used;
  auto fail = [&](std::size_t pos, const std::string& what) -> ParseError {
    return ParseError("hypothesis \"" + std::string(text) + "\", position " +
                      std::to_string(pos + 1) + ": " + what);
  };
  auto next_free = [&]() {
    std::size_t m = 0;
    while (used.count(m)) ++m;
    return m;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    ModeGroup group;
    if (ch == '(') {
      const std::size_t open = i++;
      const auto close = text.find(')', i);
      if (close == std::string_view::npos) throw fail(open, "unclosed '('");
      const std::string_view inner = text.substr(i, close - i);
      const bool commas = inner.find(',') != std::string_view::npos;
      std::size_t j = 0;
      while (j < inner.size()) {
        const char c = inner[j];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
          ++j;
          continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c))) throw fail(i + j, "expected a mode number");
        std::size_t value = 0;
        std::size_t start = j;
        if (commas) {
          while (j < inner.size() && std::isdigit(static_cast<unsigned char>(inner[j])))
            value = value * 10 + static_cast<std::size_t>(inner[j++] - '0');
        } else {
          value = static_cast<std::size_t>(inner[j++] - '0');
        }
        if (value == 0) throw fail(i + start, "modes are numbered from 1");
        if (!used.insert(value - 1).second)
          throw fail(i + start, "mode " + std::to_string(value) + " is used twice");
        group.modes.push_back(value - 1);
      }
      if (group.modes.size() < 2) throw fail(open, "a merged group needs at least two modes");
      i = close + 1;
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      if (i == text.size()) throw fail(close, "missing constraint letter after ')'");
    } else {
      group.modes.push_back(next_free());
      used.insert(group.modes.back());
    }
    const auto c = constraint_from_char(text[i]);
    if (!c) {
      throw fail(i, "unknown constraint letter '" + std::string(1, text[i]) +
                        "' (expected one of u, d, c, i)");
    }
    group.constraint = *c;
    spec.groups.push_back(std::move(group));
    ++i;
  }
  try {
    spec.validate(observed_order);
  } catch (const DimensionError& e) {
    throw ParseError(std::string(e.what()));
  }
  return spec;
}

HypothesisSpec separable_hypothesis(std::span<const ModeConstraint> constraints) {
  HypothesisSpec spec;
  for (std::size_t k = 0; k < constraints.size(); ++k) spec.groups.push_back({{k}, constraints[k]});
  return spec;
}

namespace {

bool contains(ModeConstraint outer, ModeConstraint part) {
  using C = ModeConstraint;
  switch (outer) {
    case C::Unrestricted: return true;
    case C::Diagonal: return part == C::Diagonal || part == C::Identity;
    case C::UnitDiagCholesky: return part == C::UnitDiagCholesky || part == C::Identity;
    case C::Identity: return part == C::Identity;
  }
  return false;
}

}  // namespace

bool is_nested(const HypothesisSpec& h0, const HypothesisSpec& h1) {
  const std::size_t order = h0.order();
  if (h1.order() != order) return false;
  try {
    h0.validate(order);
    h1.validate(order);
  } catch (const DimensionError&) {
    return false;
  }
  std::vector<std::size_t> owner(order);
  for (std::size_t g = 0; g < h0.groups.size(); ++g)
    for (auto m : h0.groups[g].modes) owner[m] = g;

  for (const auto& outer : h1.groups) {
    std::set<std::size_t> parts;
    for (auto m : outer.modes) parts.insert(owner[m]);
    std::size_t covered = 0;
    for (auto g : parts) {
      covered += h0.groups[g].modes.size();
      if (!contains(outer.constraint, h0.groups[g].constraint)) return false;
    }
    // every part must lie entirely inside this h1 group
    if (covered != outer.modes.size()) return false;
  }
  return true;
}

}  // namespace holq
