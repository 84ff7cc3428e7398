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

#include "crossing/constraints.hpp"

#include <algorithm>
#include <stdexcept>

#include "crossing/errors.hpp"
#include "crossing/feature_model.hpp"

namespace crossing {

using nlohmann::json;

ValueSet::ValueSet(std::initializer_list<ValueIndex> indices) {
  for (ValueIndex i : indices) {
    if (i >= kCapacity) throw std::out_of_range("value index exceeds ValueSet capacity");
    bits_ |= std::uint64_t{1} << i;
  }
}

ValueSet ValueSet::all(ValueIndex count) {
  if (count >= kCapacity) return from_bits(~std::uint64_t{0});
  return from_bits((std::uint64_t{1} << count) - 1);
}

std::vector<ValueIndex> ValueSet::indices() const {
  std::vector<ValueIndex> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<ValueIndex>(std::countr_zero(b)));
  return out;
}

bool operator==(const ConstraintExpr& lhs, const ConstraintExpr& rhs) {
  if (lhs.node_.index() != rhs.node_.index()) return false;
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        const auto& b = std::get<T>(rhs.node_);
        if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          return a.args == b.args;
        } else if constexpr (std::is_same_v<T, Negation>) {
          return *a.operand == *b.operand;
        } else {
          return a == b;
        }
      },
      lhs.node_);
}

// ---------------------------------------------------------------------------
// structure checks and evaluation

namespace {

void check_allow(const Allow& allow, const ScenarioSpace& space, std::vector<std::string>& problems) {
  auto pos = space.position_of(allow.feature);
  if (!pos) {
    problems.push_back("constraint references unknown feature " + std::to_string(allow.feature));
    return;
  }
  ValueIndex n = space.features()[*pos].value_count();
  if ((allow.values.bits() & ~ValueSet::all(n).bits()) != 0) {
    problems.push_back("constraint value index out of range for feature " + std::to_string(allow.feature));
  }
}

void check_node(const ConstraintExpr& expr, const ScenarioSpace& space, std::vector<std::string>& problems) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Allow>) {
          check_allow(node, space, problems);
        } else if constexpr (std::is_same_v<T, AtLeastOne>) {
          if (node.atoms.empty()) problems.push_back("atLeastOne with no atoms");
          for (const auto& atom : node.atoms) check_allow(atom, space, problems);
        } else if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          if (node.args.empty()) problems.push_back(std::is_same_v<T, AllOf> ? "empty and-list" : "empty or-list");
          for (const auto& arg : node.args) check_node(arg, space, problems);
        } else if constexpr (std::is_same_v<T, Negation>) {
          if (!node.operand) {
            problems.push_back("not without operand");
          } else {
            check_node(*node.operand, space, problems);
          }
        }
      },
      expr.node());
}

}  // namespace

std::vector<std::string> check_constraint(const ConstraintExpr& expr, const ScenarioSpace& space) {
  std::vector<std::string> problems;
  check_node(expr, space, problems);
  return problems;
}

CompiledConstraint::CompiledConstraint(const ConstraintExpr& expr, const ScenarioSpace& space) {
  if (std::holds_alternative<AlwaysTrue>(expr.node())) return;
  root_ = compile(expr, space);
}

std::uint32_t CompiledConstraint::compile(const ConstraintExpr& expr, const ScenarioSpace& space) {
  auto allow_node = [&](const Allow& allow) {
    auto pos = space.position_of(allow.feature);
    if (!pos) throw std::invalid_argument("constraint references unknown feature " + std::to_string(allow.feature));
    nodes_.push_back({Op::kAllow, static_cast<std::uint32_t>(*pos), allow.values.bits(), 0, 0});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  };
  auto with_children = [&](Op op, std::vector<std::uint32_t> children) {
    auto first = static_cast<std::uint32_t>(child_index_.size());
    child_index_.insert(child_index_.end(), children.begin(), children.end());
    nodes_.push_back({op, 0, 0, first, static_cast<std::uint32_t>(children.size())});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  };

  return std::visit(
      [&](const auto& node) -> std::uint32_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AlwaysTrue>) {
          nodes_.push_back({Op::kTrue, 0, 0, 0, 0});
          return static_cast<std::uint32_t>(nodes_.size() - 1);
        } else if constexpr (std::is_same_v<T, Allow>) {
          return allow_node(node);
        } else if constexpr (std::is_same_v<T, AtLeastOne>) {
          std::vector<std::uint32_t> children;
          for (const auto& atom : node.atoms) children.push_back(allow_node(atom));
          return with_children(Op::kAtLeastOne, std::move(children));
        } else if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          std::vector<std::uint32_t> children;
          for (const auto& arg : node.args) children.push_back(compile(arg, space));
          return with_children(std::is_same_v<T, AllOf> ? Op::kAnd : Op::kOr, std::move(children));
        } else {
          std::vector<std::uint32_t> children{compile(*node.operand, space)};
          return with_children(Op::kNot, std::move(children));
        }
      },
      expr.node());
}

bool CompiledConstraint::eval_node(std::uint32_t index, std::span<const ValueIndex> assignment) const {
  const Node& n = nodes_[index];
  switch (n.op) {
    case Op::kTrue:
      return true;
    case Op::kAllow:
      return ((n.bits >> assignment[n.position]) & 1U) != 0;
    case Op::kAtLeastOne:
    case Op::kOr:
      for (std::uint32_t c = 0; c < n.count; ++c) {
        if (eval_node(child_index_[n.first + c], assignment)) return true;
      }
      return false;
    case Op::kAnd:
      for (std::uint32_t c = 0; c < n.count; ++c) {
        if (!eval_node(child_index_[n.first + c], assignment)) return false;
      }
      return true;
    case Op::kNot:
      return !eval_node(child_index_[n.first], assignment);
  }
  return false;
}

bool CompiledConstraint::operator()(std::span<const ValueIndex> assignment) const {
  if (nodes_.empty()) return true;
  return eval_node(root_, assignment);
}

bool eval(const ConstraintExpr& expr, const Scenario& scenario, const ScenarioSpace& space) {
  check_scenario(scenario, space);
  return CompiledConstraint(expr, space)(scenario.assignment);
}

// ---------------------------------------------------------------------------
// normalization

namespace {

class Normalizer {
 public:
  explicit Normalizer(const ScenarioSpace& space) : space_(space) {
    if (space.features().empty()) throw std::invalid_argument("cannot normalize against an empty space");
  }

  ConstraintExpr run(const ConstraintExpr& expr) const { return simplify(push_negations(expr, false)); }

 private:
  ValueIndex domain(FeatureId f) const {
    auto pos = space_.position_of(f);
    if (!pos) throw std::invalid_argument("constraint references unknown feature " + std::to_string(f));
    return space_.features()[*pos].value_count();
  }

  ConstraintExpr falsum() const { return ConstraintExpr::allow(space_.features().front().id, ValueSet()); }

  ConstraintExpr push_negations(const ConstraintExpr& expr, bool negated) const {
    return std::visit(
        [&](const auto& node) -> ConstraintExpr {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, AlwaysTrue>) {
            return negated ? falsum() : ConstraintExpr::always();
          } else if constexpr (std::is_same_v<T, Allow>) {
            ValueIndex n = domain(node.feature);
            return ConstraintExpr::allow(node.feature, negated ? node.values.complement(n) : node.values & ValueSet::all(n));
          } else if constexpr (std::is_same_v<T, AtLeastOne>) {
            std::vector<ConstraintExpr> args;
            for (const auto& atom : node.atoms) args.push_back(push_negations(ConstraintExpr(atom), negated));
            return negated ? ConstraintExpr::all_of(std::move(args)) : ConstraintExpr::any_of(std::move(args));
          } else if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
            std::vector<ConstraintExpr> args;
            for (const auto& arg : node.args) args.push_back(push_negations(arg, negated));
            bool conjunction = std::is_same_v<T, AllOf> != negated;
            return conjunction ? ConstraintExpr::all_of(std::move(args)) : ConstraintExpr::any_of(std::move(args));
          } else {
            return push_negations(*node.operand, !negated);
          }
        },
        expr.node());
  }

  static bool is_true(const ConstraintExpr& e) { return std::holds_alternative<AlwaysTrue>(e.node()); }
  static bool is_false(const ConstraintExpr& e) {
    const auto* allow = std::get_if<Allow>(&e.node());
    return allow && allow->values.empty();
  }

  static std::vector<Allow> sorted_atoms(const std::map<FeatureId, ValueSet>& by_feature) {
    std::vector<Allow> atoms;
    for (const auto& [f, s] : by_feature) atoms.push_back({f, s});
    return atoms;
  }

  ConstraintExpr simplify(const ConstraintExpr& expr) const {
    if (const auto* allow = std::get_if<Allow>(&expr.node())) {
      if (allow->values == ValueSet::all(domain(allow->feature))) return ConstraintExpr::always();
      return expr;
    }
    if (const auto* all = std::get_if<AllOf>(&expr.node())) return simplify_and(*all);
    if (const auto* any = std::get_if<AnyOf>(&expr.node())) return simplify_or(*any);
    return expr;  // AlwaysTrue; AtLeastOne and Negation are gone after push_negations
  }

  ConstraintExpr simplify_and(const AllOf& node) const {
    std::vector<ConstraintExpr> pending;
    for (const auto& arg : node.args) pending.push_back(simplify(arg));

    std::map<FeatureId, ValueSet> allowed;
    std::vector<ConstraintExpr> rest;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const ConstraintExpr& e = pending[i];
      if (is_true(e)) continue;
      if (const auto* nested = std::get_if<AllOf>(&e.node())) {
        pending.insert(pending.end(), nested->args.begin(), nested->args.end());
        continue;
      }
      if (const auto* allow = std::get_if<Allow>(&e.node())) {
        auto [it, inserted] = allowed.emplace(allow->feature, allow->values);
        if (!inserted) it->second = it->second & allow->values;
        continue;
      }
      rest.push_back(e);
    }
    for (const auto& [f, s] : allowed) {
      if (s.empty()) return ConstraintExpr::allow(f, s);
    }

    // Atoms of an AtLeastOne can only match inside the conjunction's own Allow sets.
    std::vector<ConstraintExpr> others;
    for (auto& e : rest) {
      const auto* alo = std::get_if<AtLeastOne>(&e.node());
      if (!alo) {
        others.push_back(std::move(e));
        continue;
      }
      std::map<FeatureId, ValueSet> atoms;
      bool satisfied = false;
      for (const auto& atom : alo->atoms) {
        ValueSet s = atom.values;
        if (auto it = allowed.find(atom.feature); it != allowed.end()) {
          if ((it->second & s) == it->second) satisfied = true;
          s = s & it->second;
        }
        if (!s.empty()) atoms[atom.feature] = atoms[atom.feature] | s;
      }
      if (satisfied) continue;
      if (atoms.empty()) return falsum();
      if (atoms.size() == 1) {
        const auto [f, s] = *atoms.begin();
        auto [it, inserted] = allowed.emplace(f, s);
        if (!inserted) it->second = it->second & s;
        if (it->second.empty()) return ConstraintExpr::allow(f, it->second);
        continue;
      }
      others.push_back(ConstraintExpr::at_least_one(sorted_atoms(atoms)));
    }

    std::vector<ConstraintExpr> out;
    for (const auto& [f, s] : allowed) {
      if (s != ValueSet::all(domain(f))) out.push_back(ConstraintExpr::allow(f, s));
    }
    out.insert(out.end(), others.begin(), others.end());
    if (out.empty()) return ConstraintExpr::always();
    if (out.size() == 1) return out.front();
    return ConstraintExpr::all_of(std::move(out));
  }

  ConstraintExpr simplify_or(const AnyOf& node) const {
    std::vector<ConstraintExpr> pending;
    for (const auto& arg : node.args) pending.push_back(simplify(arg));

    std::map<FeatureId, ValueSet> atoms;
    std::vector<ConstraintExpr> rest;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const ConstraintExpr& e = pending[i];
      if (is_true(e)) return ConstraintExpr::always();
      if (is_false(e)) continue;
      if (const auto* nested = std::get_if<AnyOf>(&e.node())) {
        pending.insert(pending.end(), nested->args.begin(), nested->args.end());
        continue;
      }
      if (const auto* allow = std::get_if<Allow>(&e.node())) {
        atoms[allow->feature] = atoms[allow->feature] | allow->values;
        continue;
      }
      if (const auto* alo = std::get_if<AtLeastOne>(&e.node())) {
        for (const auto& atom : alo->atoms) atoms[atom.feature] = atoms[atom.feature] | atom.values;
        continue;
      }
      rest.push_back(e);
    }
    for (const auto& [f, s] : atoms) {
      if (s == ValueSet::all(domain(f))) return ConstraintExpr::always();
    }

    std::vector<ConstraintExpr> out;
    if (atoms.size() == 1) {
      out.push_back(ConstraintExpr::allow(atoms.begin()->first, atoms.begin()->second));
    } else if (atoms.size() > 1) {
      out.push_back(ConstraintExpr::at_least_one(sorted_atoms(atoms)));
    }
    out.insert(out.end(), rest.begin(), rest.end());
    if (out.empty()) return falsum();
    if (out.size() == 1) return out.front();
    return ConstraintExpr::any_of(std::move(out));
  }

  const ScenarioSpace& space_;
};

std::vector<Allow> top_level_allows(const ConstraintExpr& normalized) {
  std::vector<Allow> out;
  if (const auto* allow = std::get_if<Allow>(&normalized.node())) out.push_back(*allow);
  if (const auto* all = std::get_if<AllOf>(&normalized.node())) {
    for (const auto& arg : all->args) {
      if (const auto* allow = std::get_if<Allow>(&arg.node())) out.push_back(*allow);
    }
  }
  return out;
}

}  // namespace

ConstraintExpr normalize(const ConstraintExpr& expr, const ScenarioSpace& space) { return Normalizer(space).run(expr); }

bool is_trivially_false(const ConstraintExpr& expr) {
  if (const auto* allow = std::get_if<Allow>(&expr.node())) return allow->values.empty();
  if (const auto* alo = std::get_if<AtLeastOne>(&expr.node())) return alo->atoms.empty();
  if (const auto* all = std::get_if<AllOf>(&expr.node())) {
    return std::any_of(all->args.begin(), all->args.end(), [](const ConstraintExpr& e) { return is_trivially_false(e); });
  }
  return false;
}

std::optional<ProductForm> product_form(const ConstraintExpr& expr, const ScenarioSpace& space) {
  ConstraintExpr normalized = normalize(expr, space);
  ProductForm form;
  for (const auto& f : space.features()) form.allowed.push_back(ValueSet::all(f.value_count()));

  auto apply_allow = [&](const Allow& allow) {
    auto pos = *space.position_of(allow.feature);
    form.allowed[pos] = form.allowed[pos] & allow.values;
  };
  auto apply_alo = [&](const AtLeastOne& alo) {
    if (form.at_least_one) return false;
    form.at_least_one.emplace(space.feature_count());
    for (const auto& atom : alo.atoms) {
      auto pos = *space.position_of(atom.feature);
      (*form.at_least_one)[pos] = (*form.at_least_one)[pos] | atom.values;
    }
    return true;
  };

  const auto& node = normalized.node();
  if (std::holds_alternative<AlwaysTrue>(node)) return form;
  if (const auto* allow = std::get_if<Allow>(&node)) {
    apply_allow(*allow);
    return form;
  }
  if (const auto* alo = std::get_if<AtLeastOne>(&node)) {
    apply_alo(*alo);
    return form;
  }
  if (const auto* all = std::get_if<AllOf>(&node)) {
    for (const auto& arg : all->args) {
      if (const auto* allow = std::get_if<Allow>(&arg.node())) {
        apply_allow(*allow);
      } else if (const auto* atoms = std::get_if<AtLeastOne>(&arg.node())) {
        if (!apply_alo(*atoms)) return std::nullopt;
      } else {
        return std::nullopt;
      }
    }
    return form;
  }
  return std::nullopt;
}

std::vector<FeatureId> fixed_features(const ConstraintExpr& expr, const ScenarioSpace& space) {
  std::vector<FeatureId> out;
  for (const auto& allow : top_level_allows(normalize(expr, space))) {
    if (allow.values.size() == 1) out.push_back(allow.feature);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<FeatureId> restricted_features(const ConstraintExpr& expr, const ScenarioSpace& space) {
  std::vector<FeatureId> out;
  for (const auto& allow : top_level_allows(normalize(expr, space))) out.push_back(allow.feature);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// documents

namespace {

json values_to_json(ValueSet values) { return values.indices(); }

ValueSet values_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array()) throw DocumentError("expected an array of value indices", path);
  ValueSet s;
  for (const auto& item : doc) {
    if (!item.is_number_unsigned() || item.get<std::uint64_t>() >= ValueSet::kCapacity) {
      throw DocumentError("value index must be an integer in [0, 64)", path);
    }
    s = s | ValueSet{item.get<ValueIndex>()};
  }
  return s;
}

FeatureId feature_from_json(const json& doc, const std::string& path) {
  if (!doc.is_number_unsigned()) throw DocumentError("feature must be a non-negative integer", path);
  return doc.get<FeatureId>();
}

}  // namespace

json constraint_to_json(const ConstraintExpr& expr) {
  return std::visit(
      [](const auto& node) -> json {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AlwaysTrue>) {
          return {{"op", "true"}};
        } else if constexpr (std::is_same_v<T, Allow>) {
          return {{"op", "allow"}, {"feature", node.feature}, {"values", values_to_json(node.values)}};
        } else if constexpr (std::is_same_v<T, AtLeastOne>) {
          json atoms = json::array();
          for (const auto& atom : node.atoms) atoms.push_back(json::array({atom.feature, values_to_json(atom.values)}));
          return {{"op", "atLeastOne"}, {"atoms", atoms}};
        } else if constexpr (std::is_same_v<T, AllOf> || std::is_same_v<T, AnyOf>) {
          json args = json::array();
          for (const auto& arg : node.args) args.push_back(constraint_to_json(arg));
          return {{"op", std::is_same_v<T, AllOf> ? "and" : "or"}, {"args", args}};
        } else {
          return {{"op", "not"}, {"arg", constraint_to_json(*node.operand)}};
        }
      },
      expr.node());
}

ConstraintExpr constraint_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw DocumentError("expected a constraint object", path);
  auto op_it = doc.find("op");
  if (op_it == doc.end() || !op_it->is_string()) throw DocumentError("missing op", path + ".op");
  const std::string op = op_it->get<std::string>();

  auto field = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) throw DocumentError("missing field", path + "." + key);
    return *it;
  };

  if (op == "true") return ConstraintExpr::always();
  if (op == "allow") {
    return ConstraintExpr::allow(feature_from_json(field("feature"), path + ".feature"),
                                 values_from_json(field("values"), path + ".values"));
  }
  if (op == "atLeastOne") {
    const json& atoms = field("atoms");
    if (!atoms.is_array()) throw DocumentError("expected an array", path + ".atoms");
    std::vector<Allow> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string at = path + ".atoms[" + std::to_string(i) + "]";
      if (!atoms[i].is_array() || atoms[i].size() != 2) throw DocumentError("expected [feature, [values]]", at);
      out.push_back({feature_from_json(atoms[i][0], at), values_from_json(atoms[i][1], at)});
    }
    return ConstraintExpr::at_least_one(std::move(out));
  }
  if (op == "and" || op == "or") {
    const json& args = field("args");
    if (!args.is_array()) throw DocumentError("expected an array", path + ".args");
    std::vector<ConstraintExpr> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
      out.push_back(constraint_from_json(args[i], path + ".args[" + std::to_string(i) + "]"));
    }
    return op == "and" ? ConstraintExpr::all_of(std::move(out)) : ConstraintExpr::any_of(std::move(out));
  }
  if (op == "not") return ConstraintExpr::negate(constraint_from_json(field("arg"), path + ".arg"));
  throw DocumentError("unknown op '" + op + "'", path + ".op");
}

std::map<std::string, ConstraintExpr> profile_presets() {
  std::map<std::string, ConstraintExpr> out;
  for (const auto& p : builtin_profile_catalog()) out.emplace(p.id, p.constraint);
  return out;
}

}  // namespace crossing
