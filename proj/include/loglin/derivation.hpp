#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "loglin/program.hpp"

namespace loglin {

/// One entry of a solved constraint store: variable class -> type.
struct StoreEntry {
  int var;
  int type;

  friend bool operator==(const StoreEntry&, const StoreEntry&) = default;
};

/// Atom occurrence inside a derivation node (argument ids are tree-local).
struct NodeAtom {
  int pred;
  std::vector<int> args;

  friend bool operator==(const NodeAtom&, const NodeAtom&) = default;
};

/// State of a derivation after k resolution steps: the atoms still to be
/// reduced plus the solved store accumulated so far. `clause` is the index
/// of the clause applied to reach this node (-1 for the root).
struct TreeNode {
  std::vector<NodeAtom> atoms;
  std::vector<StoreEntry> store;  // sorted by variable id
  int clause = -1;

  bool terminal() const { return atoms.empty(); }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// A successful derivation. Nodes form a chain: nodes[0] is the root state,
/// each following node results from one resolution step on the leftmost atom
/// plus constraint solving, and the last node carries the answer store.
struct ProofTree {
  Goal root;
  std::vector<std::string> var_names;  // tree-local variable id -> name
  std::vector<TreeNode> nodes;

  std::size_t depth() const { return nodes.size() - 1; }
};

struct EnumLimits {
  int max_depth = 20;
  std::size_t max_trees = 10000;
};

struct Enumeration {
  std::vector<ProofTree> trees;
  bool truncated = false;  // true when max_trees cut the search short
};

/// Solves a conjunction of type constraints: intersects the constraints on
/// each variable via glb. Returns the solved store (one entry per
/// constrained variable, sorted by id) or nullopt when unsatisfiable.
std::optional<std::vector<StoreEntry>> solve(const std::vector<Constraint>& store,
                                             const TypeHierarchy& h);

/// Depth-first enumeration of all proof trees for `g`: leftmost atom
/// selection, clauses tried in program order, constraints absorbed into the
/// store as soon as they appear. A branch is abandoned when its store
/// becomes unsatisfiable or its depth exceeds max_depth. Deterministic.
Enumeration enumerate_proof_trees(const Program& p, const Goal& g, const EnumLimits& lim = {});

/// The terminal solved store (the answer) of a complete proof tree.
const std::vector<StoreEntry>& answer(const ProofTree& t);

std::string render_store(const ProofTree& t, const std::vector<StoreEntry>& store,
                         const Program& p);
std::string render_node(const ProofTree& t, std::size_t node, const Program& p);

}  // namespace loglin
