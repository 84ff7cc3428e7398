// Copyright 2026 The Crossing Scenarios Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace crossing {

using FeatureId = std::uint32_t;
using GroupId = std::uint32_t;
using ValueIndex = std::uint32_t;

class ScenarioSpace;
struct Scenario;

/// Set of value indices of one feature. Features carry at most 64 values.
class ValueSet {
 public:
  static constexpr ValueIndex kCapacity = 64;

  constexpr ValueSet() = default;
  ValueSet(std::initializer_list<ValueIndex> indices);
  static constexpr ValueSet from_bits(std::uint64_t bits) {
    ValueSet s;
    s.bits_ = bits;
    return s;
  }
  /// {0, ..., count - 1}
  static ValueSet all(ValueIndex count);

  bool contains(ValueIndex i) const { return i < kCapacity && ((bits_ >> i) & 1U) != 0; }
  bool empty() const { return bits_ == 0; }
  unsigned size() const { return static_cast<unsigned>(std::popcount(bits_)); }
  std::uint64_t bits() const { return bits_; }
  /// Index of the highest member; set must be nonempty.
  ValueIndex max() const { return static_cast<ValueIndex>(63 - std::countl_zero(bits_)); }
  std::vector<ValueIndex> indices() const;

  ValueSet operator&(ValueSet rhs) const { return from_bits(bits_ & rhs.bits_); }
  ValueSet operator|(ValueSet rhs) const { return from_bits(bits_ | rhs.bits_); }
  ValueSet complement(ValueIndex count) const { return from_bits(~bits_ & all(count).bits_); }
  bool operator==(const ValueSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

class ConstraintExpr;

struct AlwaysTrue {
  bool operator==(const AlwaysTrue&) const = default;
};

struct Allow {
  FeatureId feature = 0;
  ValueSet values;
  bool operator==(const Allow&) const = default;
};

/// True iff at least one (feature, value set) atom matches.
struct AtLeastOne {
  std::vector<Allow> atoms;
  bool operator==(const AtLeastOne&) const = default;
};

struct AllOf {
  std::vector<ConstraintExpr> args;
};

struct AnyOf {
  std::vector<ConstraintExpr> args;
};

struct Negation {
  std::shared_ptr<const ConstraintExpr> operand;
};

/// Boolean predicate over a scenario's value indices. Immutable.
class ConstraintExpr {
 public:
  using Node = std::variant<AlwaysTrue, Allow, AtLeastOne, AllOf, AnyOf, Negation>;

  ConstraintExpr() : node_(AlwaysTrue{}) {}
  explicit ConstraintExpr(Node node) : node_(std::move(node)) {}

  static ConstraintExpr always() { return ConstraintExpr(); }
  static ConstraintExpr allow(FeatureId feature, ValueSet values) { return ConstraintExpr(Allow{feature, values}); }
  static ConstraintExpr at_least_one(std::vector<Allow> atoms) { return ConstraintExpr(AtLeastOne{std::move(atoms)}); }
  static ConstraintExpr all_of(std::vector<ConstraintExpr> args) { return ConstraintExpr(AllOf{std::move(args)}); }
  static ConstraintExpr any_of(std::vector<ConstraintExpr> args) { return ConstraintExpr(AnyOf{std::move(args)}); }
  static ConstraintExpr negate(ConstraintExpr operand) {
    return ConstraintExpr(Negation{std::make_shared<const ConstraintExpr>(std::move(operand))});
  }

  const Node& node() const { return node_; }

  friend bool operator==(const ConstraintExpr& lhs, const ConstraintExpr& rhs);

 private:
  Node node_;
};

/// Structural problems of an expression against a space: dangling features,
/// out-of-range value indices, empty and/or lists. Empty means usable.
std::vector<std::string> check_constraint(const ConstraintExpr& expr, const ScenarioSpace& space);

/// Evaluates expr on a scenario. Throws std::invalid_argument on a dangling
/// feature reference.
bool eval(const ConstraintExpr& expr, const Scenario& scenario, const ScenarioSpace& space);

/// Expression with feature ids resolved to positions, for evaluation in
/// enumeration loops.
class CompiledConstraint {
 public:
  CompiledConstraint() = default;
  CompiledConstraint(const ConstraintExpr& expr, const ScenarioSpace& space);

  bool operator()(std::span<const ValueIndex> assignment) const;
  bool accepts_everything() const { return nodes_.empty(); }

 private:
  enum class Op : std::uint8_t { kTrue, kAllow, kAtLeastOne, kAnd, kOr, kNot };
  struct Node {
    Op op;
    std::uint32_t position;          // kAllow
    std::uint64_t bits;              // kAllow
    std::uint32_t first, count;      // children / atoms range in child_index_
  };
  std::uint32_t compile(const ConstraintExpr& expr, const ScenarioSpace& space);
  bool eval_node(std::uint32_t index, std::span<const ValueIndex> assignment) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> child_index_;
  std::uint32_t root_ = 0;
};

/// Canonical equivalent of expr: negations pushed down to Allow (as set
/// complements), nested and/or flattened, Allows on one feature merged
/// (intersection under and, union under or), or-lists of atoms folded into
/// a single AtLeastOne, full-domain Allows dropped. Unsatisfiable Allows are
/// kept (see is_trivially_false).
ConstraintExpr normalize(const ConstraintExpr& expr, const ScenarioSpace& space);

/// True for an expression that normalize left as an Allow with an empty set,
/// or an And containing one.
bool is_trivially_false(const ConstraintExpr& expr);

/// Per-position decomposition of a conjunctive constraint:
///   AND_j (value_j in allowed[j])  [AND  OR_j (value_j in at_least_one[j])]
struct ProductForm {
  std::vector<ValueSet> allowed;
  std::optional<std::vector<ValueSet>> at_least_one;
};

/// Product form of the normalized expression, or nullopt when its shape is
/// not a conjunction of Allows plus at most one AtLeastOne.
std::optional<ProductForm> product_form(const ConstraintExpr& expr, const ScenarioSpace& space);

/// Feature ids pinned to a single value by the normalized expression.
std::vector<FeatureId> fixed_features(const ConstraintExpr& expr, const ScenarioSpace& space);
/// Feature ids whose values the normalized expression restricts to a proper subset.
std::vector<FeatureId> restricted_features(const ConstraintExpr& expr, const ScenarioSpace& space);

nlohmann::json constraint_to_json(const ConstraintExpr& expr);
/// Throws DocumentError naming the offending path.
ConstraintExpr constraint_from_json(const nlohmann::json& doc, const std::string& path = "constraint");

/// Constraint presets of the builtin profiles and staged variants, keyed by profile id.
std::map<std::string, ConstraintExpr> profile_presets();

}  // namespace crossing
