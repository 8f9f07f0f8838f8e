#include "loglin/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "loglin/parser.hpp"

namespace loglin {

namespace {

int pattern_var_count(const std::vector<PatternNode>& chain) {
  int mx = -1;
  for (const PatternNode& n : chain) {
    for (const NodeAtom& a : n.atoms)
      for (int v : a.args) mx = std::max(mx, v);
    for (const StoreEntry& e : n.store) mx = std::max(mx, e.var);
  }
  return mx + 1;
}

// Searches the admissible variable numberings (atom arguments force theirs;
// same-type store entries permute) and keeps the minimal serialization.
// Store entries render sorted by type name, indexed variables first.
//
// Permuting two same-type store variables can only change a rendered
// string if something below tells them apart. A store variable outside the
// atoms never re-enters an atom, so the only channels are a refined type
// at a deeper node or disappearance through aliasing; variables that keep
// their type in every deeper store are interchangeable and need no
// branching. That keeps wide same-type stores (common in terminal
// answers) linear instead of factorial.
struct Canonicalizer {
  const std::vector<PatternNode>& chain;
  const Program& prog;

  std::map<int, int> idx;  // raw variable -> canonical index
  int next = 0;
  std::vector<std::vector<StoreEntry>> ordered;  // chosen store order, raw ids
  std::string best;
  std::vector<PatternNode> best_chain;
  bool have_best = false;
  long leaves = 0;

  static constexpr long kMaxLeaves = 100000;

  explicit Canonicalizer(const std::vector<PatternNode>& c, const Program& p)
      : chain(c), prog(p) {
    ordered.assign(chain.size(), {});
  }

  void run() { node(0); }

  bool distinguishable_below(std::size_t l, const StoreEntry& entry) const {
    for (std::size_t m = l + 1; m < chain.size(); ++m) {
      for (const NodeAtom& a : chain[m].atoms)
        for (int v : a.args)
          if (v == entry.var) return true;
      bool present_same_type = false;
      for (const StoreEntry& e : chain[m].store)
        if (e.var == entry.var) {
          if (e.type != entry.type) return true;  // refined by a deeper meet
          present_same_type = true;
          break;
        }
      if (!present_same_type) return true;  // merged away by aliasing
    }
    return false;
  }

  void node(std::size_t l) {
    if (l == chain.size()) {
      finish();
      return;
    }
    std::vector<int> assigned;
    for (const NodeAtom& a : chain[l].atoms)
      for (int v : a.args)
        if (!idx.count(v)) {
          idx[v] = next++;
          assigned.push_back(v);
        }

    std::vector<StoreEntry> entries = chain[l].store;
    std::stable_sort(entries.begin(), entries.end(), [&](const StoreEntry& a,
                                                         const StoreEntry& b) {
      return prog.types.name(a.type) < prog.types.name(b.type);
    });
    std::vector<std::vector<StoreEntry>> groups;
    for (const StoreEntry& e : entries) {
      if (groups.empty() || groups.back().front().type != e.type) groups.emplace_back();
      groups.back().push_back(e);
    }
    group(l, groups, 0);

    for (auto it = assigned.rbegin(); it != assigned.rend(); ++it) {
      idx.erase(*it);
      --next;
    }
  }

  void group(std::size_t l, const std::vector<std::vector<StoreEntry>>& groups,
             std::size_t gi) {
    if (gi == groups.size()) {
      node(l + 1);
      return;
    }
    std::vector<StoreEntry> indexed, recurring, transient_;
    for (const StoreEntry& e : groups[gi]) {
      if (idx.count(e.var))
        indexed.push_back(e);
      else if (distinguishable_below(l, e))
        recurring.push_back(e);
      else
        transient_.push_back(e);
    }
    std::sort(indexed.begin(), indexed.end(),
              [&](const StoreEntry& a, const StoreEntry& b) { return idx[a.var] < idx[b.var]; });
    std::size_t base = ordered[l].size();
    ordered[l].insert(ordered[l].end(), indexed.begin(), indexed.end());
    std::vector<char> used(recurring.size(), 0);
    perm(l, groups, gi, recurring, transient_, used, recurring.size());
    ordered[l].resize(base);
  }

  void perm(std::size_t l, const std::vector<std::vector<StoreEntry>>& groups, std::size_t gi,
            const std::vector<StoreEntry>& recurring, const std::vector<StoreEntry>& transient_,
            std::vector<char>& used, std::size_t remaining) {
    if (remaining == 0) {
      std::size_t mark = ordered[l].size();
      for (const StoreEntry& e : transient_) {
        idx[e.var] = next++;
        ordered[l].push_back(e);
      }
      group(l, groups, gi + 1);
      for (auto it = transient_.rbegin(); it != transient_.rend(); ++it) {
        idx.erase(it->var);
        --next;
      }
      ordered[l].resize(mark);
      return;
    }
    for (std::size_t k = 0; k < recurring.size(); ++k) {
      if (used[k]) continue;
      used[k] = 1;
      idx[recurring[k].var] = next++;
      ordered[l].push_back(recurring[k]);
      perm(l, groups, gi, recurring, transient_, used, remaining - 1);
      ordered[l].pop_back();
      idx.erase(recurring[k].var);
      --next;
      used[k] = 0;
    }
  }

  std::string render_label(std::size_t l) {
    std::string out;
    bool first = true;
    auto sep = [&] {
      if (!first) out += " & ";
      first = false;
    };
    for (const NodeAtom& a : chain[l].atoms) {
      sep();
      out += prog.preds[static_cast<std::size_t>(a.pred)].name;
      if (!a.args.empty()) {
        out += '(';
        for (std::size_t k = 0; k < a.args.size(); ++k) {
          if (k) out += ',';
          out += 'V';
          out += std::to_string(idx[a.args[k]]);
        }
        out += ')';
      }
    }
    for (const StoreEntry& e : ordered[l]) {
      sep();
      out += 'V';
      out += std::to_string(idx[e.var]);
      out += '=';
      out += prog.types.name(e.type);
    }
    return out;
  }

  void finish() {
    if (++leaves > kMaxLeaves)
      throw ValidationError("pattern canonicalization: too many equivalent orderings");
    std::string s;
    for (std::size_t l = chain.size(); l-- > 0;) {
      std::string label = render_label(l);
      std::string wrapped = "[" + label;
      if (!s.empty()) wrapped += (label.empty() ? "" : " ") + s;
      wrapped += "]";
      s = std::move(wrapped);
    }
    if (have_best && s >= best) return;
    best = s;
    have_best = true;
    best_chain.clear();
    for (std::size_t l = 0; l < chain.size(); ++l) {
      PatternNode n;
      for (const NodeAtom& a : chain[l].atoms) {
        NodeAtom out{a.pred, a.args};
        for (int& v : out.args) v = idx[v];
        n.atoms.push_back(std::move(out));
      }
      for (const StoreEntry& e : ordered[l]) n.store.push_back({idx[e.var], e.type});
      best_chain.push_back(std::move(n));
    }
  }
};

// Chain-vs-chain embedding with one consistent variable bijection across
// all levels; store entries are matched as a set with backtracking over
// same-type choices.
struct Matcher {
  const std::vector<PatternNode>& chain;
  const ProofTree& tree;
  std::size_t anchor;
  std::vector<int> p2t, t2p;
  std::vector<std::pair<int, int>> trail;

  bool bind(int pv, int tv) {
    int& fwd = p2t[static_cast<std::size_t>(pv)];
    if (fwd != -1) return fwd == tv;
    if (t2p[static_cast<std::size_t>(tv)] != -1) return false;
    fwd = tv;
    t2p[static_cast<std::size_t>(tv)] = pv;
    trail.emplace_back(pv, tv);
    return true;
  }

  void rollback(std::size_t mark) {
    while (trail.size() > mark) {
      auto [pv, tv] = trail.back();
      trail.pop_back();
      p2t[static_cast<std::size_t>(pv)] = -1;
      t2p[static_cast<std::size_t>(tv)] = -1;
    }
  }

  bool level(std::size_t l) {
    if (l == chain.size()) return true;
    const PatternNode& pn = chain[l];
    const TreeNode& tn = tree.nodes[anchor + l];
    if (pn.atoms.size() != tn.atoms.size() || pn.store.size() != tn.store.size()) return false;
    std::size_t mark = trail.size();
    for (std::size_t i = 0; i < pn.atoms.size(); ++i) {
      if (pn.atoms[i].pred != tn.atoms[i].pred ||
          pn.atoms[i].args.size() != tn.atoms[i].args.size()) {
        rollback(mark);
        return false;
      }
      for (std::size_t k = 0; k < pn.atoms[i].args.size(); ++k)
        if (!bind(pn.atoms[i].args[k], tn.atoms[i].args[k])) {
          rollback(mark);
          return false;
        }
    }
    if (store(l, 0)) return true;
    rollback(mark);
    return false;
  }

  bool store(std::size_t l, std::size_t k) {
    const PatternNode& pn = chain[l];
    const TreeNode& tn = tree.nodes[anchor + l];
    if (k == pn.store.size()) return level(l + 1);
    const StoreEntry& e = pn.store[k];
    int bound = p2t[static_cast<std::size_t>(e.var)];
    if (bound != -1) {
      for (const StoreEntry& te : tn.store)
        if (te.var == bound) return te.type == e.type && store(l, k + 1);
      return false;
    }
    for (const StoreEntry& te : tn.store) {
      if (te.type != e.type || t2p[static_cast<std::size_t>(te.var)] != -1) continue;
      std::size_t mark = trail.size();
      bind(e.var, te.var);
      if (store(l, k + 1)) return true;
      rollback(mark);
    }
    return false;
  }
};

bool match_at(const PropertyPattern& pat, const ProofTree& t, std::size_t anchor) {
  if (anchor + pat.chain.size() > t.nodes.size()) return false;
  Matcher m{pat.chain, t, anchor,
            std::vector<int>(static_cast<std::size_t>(pattern_var_count(pat.chain)), -1),
            std::vector<int>(t.var_names.size(), -1),
            {}};
  return m.level(0);
}

}  // namespace

PropertyPattern canonical_pattern(const std::vector<PatternNode>& raw, const Program& p) {
  if (raw.empty()) throw std::invalid_argument("empty pattern chain");
  Canonicalizer c(raw, p);
  c.run();
  return PropertyPattern{std::move(c.best_chain), std::move(c.best)};
}

std::string serialize(const PropertyPattern& pat) { return pat.canon; }

namespace {

struct PatternParser {
  const std::string& s;
  const Program& prog;
  std::size_t i = 0;
  std::map<std::string, int> vars;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(0, "pattern: " + msg);
  }

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i;
  }
  std::string ident() {
    skip_ws();
    if (i >= s.size() || std::isalpha(static_cast<unsigned char>(s[i])) == 0)
      fail("expected an identifier");
    std::size_t b = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) != 0 || s[i] == '_'))
      ++i;
    return s.substr(b, i - b);
  }
  int var(const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int id = static_cast<int>(vars.size());
    vars.emplace(name, id);
    return id;
  }

  void node(std::vector<PatternNode>& chain) {
    expect('[');
    PatternNode n;
    while (true) {
      char c = peek();
      if (c == '[' || c == ']' || c == '\0') break;
      conjunct(n);
      if (peek() == '&') {
        ++i;
        continue;
      }
      break;
    }
    for (std::size_t a = 0; a < n.store.size(); ++a)
      for (std::size_t b = a + 1; b < n.store.size(); ++b)
        if (n.store[a].var == n.store[b].var)
          fail("duplicate store constraint for one variable");
    chain.push_back(std::move(n));
    if (peek() == '[') node(chain);
    expect(']');
  }

  void conjunct(PatternNode& n) {
    std::string id = ident();
    if (std::isupper(static_cast<unsigned char>(id[0]))) {
      expect('=');
      std::string ty = ident();
      int t = prog.types.id_of(ty);
      if (t < 0) fail("unknown type '" + ty + "'");
      n.store.push_back({var(id), t});
      return;
    }
    int pred = prog.pred_id(id);
    if (pred < 0) fail("unknown predicate '" + id + "'");
    NodeAtom a{pred, {}};
    if (peek() == '(') {
      ++i;
      a.args.push_back(var(ident()));
      while (peek() == ',') {
        ++i;
        a.args.push_back(var(ident()));
      }
      expect(')');
    }
    if (static_cast<int>(a.args.size()) != prog.preds[static_cast<std::size_t>(pred)].arity)
      fail("arity mismatch for predicate '" + id + "'");
    n.atoms.push_back(std::move(a));
  }
};

}  // namespace

PropertyPattern parse_pattern(const std::string& text, const Program& p) {
  PatternParser parser{text, p, 0, {}};
  std::vector<PatternNode> raw;
  parser.node(raw);
  if (parser.peek() != '\0') parser.fail("trailing text");
  return canonical_pattern(raw, p);
}

PropertyPattern subchain_pattern(const ProofTree& t, std::size_t first, std::size_t len,
                                 const Program& p) {
  std::vector<PatternNode> raw;
  raw.reserve(len);
  for (std::size_t l = 0; l < len; ++l)
    raw.push_back(PatternNode{t.nodes[first + l].atoms, t.nodes[first + l].store});
  return canonical_pattern(raw, p);
}

int count_occurrences(const PropertyPattern& pat, const ProofTree& t) {
  if (pat.chain.size() > t.nodes.size()) return 0;
  int count = 0;
  for (std::size_t anchor = 0; anchor + pat.chain.size() <= t.nodes.size(); ++anchor)
    if (match_at(pat, t, anchor)) ++count;
  return count;
}

Eigen::VectorXi property_vector(const ProofTree& t, const std::vector<PropertyPattern>& pats) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(pats.size()));
  for (std::size_t i = 0; i < pats.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = count_occurrences(pats[i], t);
  return v;
}

std::vector<PropertyPattern> generate_candidates(const std::vector<PropertyPattern>& selected,
                                                 const std::vector<ProofTree>& trees,
                                                 const Program& p) {
  std::map<std::string, PropertyPattern> out;
  auto add = [&](PropertyPattern pat) {
    auto key = pat.canon;
    out.emplace(std::move(key), std::move(pat));
  };

  for (const ProofTree& t : trees)
    for (std::size_t i = 0; i < t.nodes.size(); ++i) add(subchain_pattern(t, i, 1, p));

  for (const PropertyPattern& sel : selected) {
    std::size_t m = sel.chain.size();
    for (const ProofTree& t : trees) {
      if (m > t.nodes.size()) continue;
      for (std::size_t i = 0; i + m <= t.nodes.size(); ++i) {
        if (!match_at(sel, t, i)) continue;
        if (i + m < t.nodes.size()) add(subchain_pattern(t, i, m + 1, p));
        if (i > 0) add(subchain_pattern(t, i - 1, m + 1, p));
      }
    }
  }

  for (const PropertyPattern& sel : selected) out.erase(sel.canon);

  std::vector<PropertyPattern> result;
  result.reserve(out.size());
  for (auto& [key, pat] : out) result.push_back(std::move(pat));
  return result;
}

}  // namespace loglin
