#pragma once

#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "loglin/hierarchy.hpp"

namespace loglin {

/// Single-variable type-membership constraint, `Var = type`.
struct Constraint {
  int var;
  int type;
};

/// Relational atom `pred(V1, ..., Vk)`. Arguments are always variables.
struct Atom {
  int pred;
  std::vector<int> args;
};

using Conjunct = std::variant<Atom, Constraint>;

/// Definite clause; the head is always an atom.
struct Clause {
  Atom head;
  std::vector<Conjunct> body;
  std::size_t var_count = 0;            // clause-local variable ids are 0..var_count-1
  std::vector<std::string> var_names;   // for display and fresh renaming
  int line = 0;
};

struct PredicateInfo {
  std::string name;
  int arity;
};

/// A validated constraint logic program: type hierarchy plus clauses in
/// declaration order. Immutable after loading; safe to share read-only.
struct Program {
  TypeHierarchy types;
  std::vector<PredicateInfo> preds;
  std::unordered_map<std::string, int> pred_ids;
  std::vector<Clause> clauses;

  int pred_id(const std::string& name) const {
    auto it = pred_ids.find(name);
    return it == pred_ids.end() ? -1 : it->second;
  }
};

/// Conjunction of atoms and constraints; variable ids are goal-local.
struct Goal {
  std::vector<Conjunct> conjuncts;
  std::vector<std::string> var_names;

  bool empty() const { return conjuncts.empty(); }
};

/// Human-readable rendering with the goal's own variable names.
std::string render_goal(const Goal& g, const Program& p);

/// Rendering with variables normalized to V0, V1, ... in first-occurrence
/// order; equal keys identify goals that differ only by variable names.
std::string canonical_goal_key(const Goal& g, const Program& p);

}  // namespace loglin
