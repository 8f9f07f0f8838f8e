#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "loglin/derivation.hpp"

namespace loglin {

/// One node label of a property pattern: the atom/store skeleton of a
/// derivation node with variables abstracted. Ids are pattern-local and
/// canonical (V0, V1, ... in first-occurrence order of the serialization).
struct PatternNode {
  std::vector<NodeAtom> atoms;
  std::vector<StoreEntry> store;
};

/// A connected chain of node labels, matched against proof trees up to a
/// consistent variable renaming. Identity is the canonical serialization:
/// bracketed prefix form, e.g. `[q(V0) & V0=a [V0=a]]`.
struct PropertyPattern {
  std::vector<PatternNode> chain;
  std::string canon;

  std::size_t size() const { return chain.size(); }
  friend bool operator==(const PropertyPattern& a, const PropertyPattern& b) {
    return a.canon == b.canon;
  }
};

/// Canonicalizes a raw chain of labels (arbitrary variable ids, arbitrary
/// store order): variables are renumbered and same-type store entries
/// ordered so that the serialization is minimal, hence unique per pattern
/// up to renaming.
PropertyPattern canonical_pattern(const std::vector<PatternNode>& raw, const Program& p);

std::string serialize(const PropertyPattern& pat);
PropertyPattern parse_pattern(const std::string& text, const Program& p);

/// The canonical pattern of the chain t.nodes[first .. first+len).
PropertyPattern subchain_pattern(const ProofTree& t, std::size_t first, std::size_t len,
                                 const Program& p);

/// Number of nodes of `t` at which the pattern embeds as a connected prefix
/// of the chain below, under a consistent variable renaming. Overlapping
/// matches at distinct anchors each count.
int count_occurrences(const PropertyPattern& pat, const ProofTree& t);

/// Componentwise count_occurrences over a pattern list.
Eigen::VectorXi property_vector(const ProofTree& t, const std::vector<PropertyPattern>& pats);

/// Candidate properties instantiated in the sample: all single-node
/// patterns occurring in the trees, plus every pattern obtained by growing
/// a selected pattern one observed resolution step beyond a match (the step
/// below its last node, and the step that produced its root). Patterns
/// already in `selected` are excluded. Sorted by canonical form.
std::vector<PropertyPattern> generate_candidates(const std::vector<PropertyPattern>& selected,
                                                 const std::vector<ProofTree>& trees,
                                                 const Program& p);

}  // namespace loglin
