#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace loglin {

/// Raised when a program, corpus, or model file violates a structural
/// invariant (hierarchy cycles, ambiguous meets, arity clashes, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sentinel for the absent meet: two types with no common lower bound.
inline constexpr int kBottom = -1;

/// Finite poset of type symbols ordered by declared subtype edges, with a
/// precomputed greatest-lower-bound table.
///
/// Built incrementally while a program file is read, then finalized once:
/// finalize() computes the reflexive-transitive closure, rejects cycles and
/// pairs whose common lower bounds have no greatest element, and freezes the
/// symbol table.
class TypeHierarchy {
 public:
  int intern(const std::string& name);
  void add_edge(const std::string& sub, const std::string& super);
  void finalize();

  bool finalized() const { return finalized_; }
  std::size_t size() const { return names_.size(); }

  /// -1 when the symbol is unknown.
  int id_of(const std::string& name) const;
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }

  /// True when `sub` denotes a subset of `super` (reflexive, transitive).
  bool leq(int sub, int super) const;

  /// Greatest common lower bound, or kBottom when none exists.
  int glb(int s, int t) const;

  /// Index of the unique maximum element, or -1 when there is none.
  int top() const { return top_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<char> leq_;  // row-major closure matrix
  std::vector<int> meet_;  // row-major meet table, kBottom where empty
  int top_ = -1;
  bool finalized_ = false;
};

/// Name-level convenience for tests and tooling; returns kBottom as id.
int glb(const std::string& s, const std::string& t, const TypeHierarchy& h);

}  // namespace loglin
