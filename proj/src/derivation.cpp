#include "loglin/derivation.hpp"

#include <algorithm>

namespace loglin {

namespace {

constexpr int kUnconstrained = -2;

// Mutable state of one derivation branch. Branches copy the whole state, so
// no undo bookkeeping is needed; the structures stay tiny at the depths the
// enumerator allows.
struct DerivState {
  std::vector<NodeAtom> atoms;       // remaining goal atoms
  std::vector<int> parent;           // union-find over variables
  std::vector<int> vclass_type;      // constraint type at class roots
  std::vector<std::string> names;
  std::vector<TreeNode> chain;

  int find(int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  }

  int fresh(std::string name) {
    int id = static_cast<int>(parent.size());
    parent.push_back(id);
    vclass_type.push_back(kUnconstrained);
    names.push_back(std::move(name));
    return id;
  }

  bool constrain(const TypeHierarchy& h, int v, int type) {
    int r = find(v);
    int cur = vclass_type[static_cast<std::size_t>(r)];
    int merged = cur == kUnconstrained ? type : h.glb(cur, type);
    if (merged == kBottom) return false;
    vclass_type[static_cast<std::size_t>(r)] = merged;
    return true;
  }

  // Aliases two variables (repeated head variables); smaller id stays the
  // representative so names remain stable along the chain.
  bool unite(const TypeHierarchy& h, int a, int b) {
    int ra = find(a);
    int rb = find(b);
    if (ra == rb) return true;
    if (ra > rb) std::swap(ra, rb);
    int ta = vclass_type[static_cast<std::size_t>(ra)];
    int tb = vclass_type[static_cast<std::size_t>(rb)];
    int merged = ta == kUnconstrained ? tb
                 : tb == kUnconstrained ? ta
                                        : h.glb(ta, tb);
    if (merged == kBottom) return false;
    parent[static_cast<std::size_t>(rb)] = ra;
    vclass_type[static_cast<std::size_t>(ra)] = merged;
    return true;
  }

  TreeNode snapshot(int clause) {
    TreeNode node;
    node.clause = clause;
    node.atoms.reserve(atoms.size());
    for (const NodeAtom& a : atoms) {
      NodeAtom out{a.pred, a.args};
      for (int& v : out.args) v = find(v);
      node.atoms.push_back(std::move(out));
    }
    for (int v = 0; v < static_cast<int>(parent.size()); ++v) {
      if (find(v) != v) continue;
      int t = vclass_type[static_cast<std::size_t>(v)];
      if (t != kUnconstrained) node.store.push_back({v, t});
    }
    return node;
  }
};

struct Enumerator {
  const Program& program;
  EnumLimits limits;
  Enumeration result;

  void dfs(DerivState& state, int depth) {
    if (result.truncated) return;
    if (state.atoms.empty()) {
      if (result.trees.size() == limits.max_trees) {
        result.truncated = true;
        return;
      }
      ProofTree t;
      t.var_names = state.names;
      t.nodes = state.chain;
      result.trees.push_back(std::move(t));
      return;
    }
    if (depth >= limits.max_depth) return;

    const NodeAtom goal_atom = state.atoms.front();
    for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
      if (result.truncated) return;
      const Clause& cl = program.clauses[ci];
      if (cl.head.pred != goal_atom.pred) continue;
      DerivState next = state;
      if (!apply(next, cl, goal_atom)) continue;
      next.chain.push_back(next.snapshot(static_cast<int>(ci)));
      dfs(next, depth + 1);
    }
  }

  // Resolves the leftmost atom with `cl`: head parameters bind to the goal
  // atom's arguments (repeats alias them), body-local variables are
  // standardized apart by indexed renaming, and body constraints are solved
  // into the store immediately.
  bool apply(DerivState& state, const Clause& cl, const NodeAtom& goal_atom) {
    std::vector<int> subst(cl.var_count, -1);
    for (std::size_t k = 0; k < cl.head.args.size(); ++k) {
      int hv = cl.head.args[k];
      int actual = goal_atom.args[k];
      if (subst[static_cast<std::size_t>(hv)] == -1) {
        subst[static_cast<std::size_t>(hv)] = actual;
      } else if (!state.unite(program.types, subst[static_cast<std::size_t>(hv)], actual)) {
        return false;
      }
    }
    auto lookup = [&](int clause_var) {
      int& slot = subst[static_cast<std::size_t>(clause_var)];
      if (slot == -1)
        slot = state.fresh(cl.var_names[static_cast<std::size_t>(clause_var)] + "'" +
                           std::to_string(state.parent.size()));
      return slot;
    };

    std::vector<NodeAtom> body_atoms;
    for (const Conjunct& c : cl.body) {
      if (std::holds_alternative<Constraint>(c)) {
        const Constraint& cn = std::get<Constraint>(c);
        if (!state.constrain(program.types, lookup(cn.var), cn.type)) return false;
      } else {
        const Atom& a = std::get<Atom>(c);
        NodeAtom na{a.pred, {}};
        na.args.reserve(a.args.size());
        for (int v : a.args) na.args.push_back(lookup(v));
        body_atoms.push_back(std::move(na));
      }
    }

    std::vector<NodeAtom> new_atoms;
    new_atoms.reserve(body_atoms.size() + state.atoms.size() - 1);
    new_atoms.insert(new_atoms.end(), body_atoms.begin(), body_atoms.end());
    new_atoms.insert(new_atoms.end(), state.atoms.begin() + 1, state.atoms.end());
    state.atoms = std::move(new_atoms);
    return true;
  }
};

}  // namespace

std::optional<std::vector<StoreEntry>> solve(const std::vector<Constraint>& store,
                                             const TypeHierarchy& h) {
  std::vector<StoreEntry> solved;
  for (const Constraint& c : store) {
    auto it = std::find_if(solved.begin(), solved.end(),
                           [&](const StoreEntry& e) { return e.var == c.var; });
    if (it == solved.end()) {
      solved.push_back({c.var, c.type});
    } else {
      it->type = h.glb(it->type, c.type);
      if (it->type == kBottom) return std::nullopt;
    }
  }
  std::sort(solved.begin(), solved.end(),
            [](const StoreEntry& a, const StoreEntry& b) { return a.var < b.var; });
  return solved;
}

Enumeration enumerate_proof_trees(const Program& p, const Goal& g, const EnumLimits& lim) {
  Enumerator en{p, lim, {}};

  DerivState root;
  for (const std::string& n : g.var_names) root.fresh(n);
  for (const Conjunct& c : g.conjuncts) {
    if (std::holds_alternative<Atom>(c)) {
      const Atom& a = std::get<Atom>(c);
      root.atoms.push_back({a.pred, a.args});
    } else {
      const Constraint& cn = std::get<Constraint>(c);
      if (!root.constrain(p.types, cn.var, cn.type)) return std::move(en.result);
    }
  }
  root.chain.push_back(root.snapshot(-1));
  en.dfs(root, 0);

  for (ProofTree& t : en.result.trees) t.root = g;
  return std::move(en.result);
}

const std::vector<StoreEntry>& answer(const ProofTree& t) { return t.nodes.back().store; }

std::string render_store(const ProofTree& t, const std::vector<StoreEntry>& store,
                         const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (i) out += " & ";
    out += t.var_names[static_cast<std::size_t>(store[i].var)];
    out += " = ";
    out += p.types.name(store[i].type);
  }
  return out;
}

std::string render_node(const ProofTree& t, std::size_t node, const Program& p) {
  const TreeNode& n = t.nodes[node];
  std::string out;
  for (std::size_t i = 0; i < n.atoms.size(); ++i) {
    if (i) out += " & ";
    const NodeAtom& a = n.atoms[i];
    out += p.preds[static_cast<std::size_t>(a.pred)].name;
    if (!a.args.empty()) {
      out += '(';
      for (std::size_t k = 0; k < a.args.size(); ++k) {
        if (k) out += ", ";
        out += t.var_names[static_cast<std::size_t>(a.args[k])];
      }
      out += ')';
    }
  }
  std::string store = render_store(t, n.store, p);
  if (!store.empty()) {
    if (!out.empty()) out += " & ";
    out += store;
  }
  if (out.empty()) out = "true";
  return out;
}

}  // namespace loglin
