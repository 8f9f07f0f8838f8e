#include "loglin/hierarchy.hpp"

namespace loglin {

int TypeHierarchy::intern(const std::string& name) {
  if (finalized_) throw std::logic_error("TypeHierarchy: intern after finalize");
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

void TypeHierarchy::add_edge(const std::string& sub, const std::string& super) {
  int s = intern(sub);
  int t = intern(super);
  edges_.emplace_back(s, t);
}

int TypeHierarchy::id_of(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

bool TypeHierarchy::leq(int sub, int super) const {
  std::size_t n = names_.size();
  return leq_[static_cast<std::size_t>(sub) * n + static_cast<std::size_t>(super)] != 0;
}

int TypeHierarchy::glb(int s, int t) const {
  std::size_t n = names_.size();
  return meet_[static_cast<std::size_t>(s) * n + static_cast<std::size_t>(t)];
}

void TypeHierarchy::finalize() {
  if (finalized_) return;
  const std::size_t n = names_.size();
  leq_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) leq_[i * n + i] = 1;
  for (auto [s, t] : edges_)
    leq_[static_cast<std::size_t>(s) * n + static_cast<std::size_t>(t)] = 1;

  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (!leq_[i * n + k]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (leq_[k * n + j]) leq_[i * n + j] = 1;
    }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq_[i * n + j] && leq_[j * n + i])
        throw ValidationError("subtype cycle between '" + names_[i] + "' and '" + names_[j] +
                              "'");

  // Meet table: the unique greatest common lower bound, or kBottom.
  meet_.assign(n * n, kBottom);
  std::vector<int> lbs;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s; t < n; ++t) {
      lbs.clear();
      for (std::size_t z = 0; z < n; ++z)
        if (leq_[z * n + s] && leq_[z * n + t]) lbs.push_back(static_cast<int>(z));
      if (lbs.empty()) continue;
      int greatest = kBottom;
      for (int z : lbs) {
        bool dominates = true;
        for (int w : lbs)
          if (!leq_[static_cast<std::size_t>(w) * n + static_cast<std::size_t>(z)]) {
            dominates = false;
            break;
          }
        if (dominates) {
          greatest = z;
          break;
        }
      }
      if (greatest == kBottom)
        throw ValidationError("ambiguous meet for types '" + names_[s] + "' and '" + names_[t] +
                              "': no greatest common lower bound");
      meet_[s * n + t] = greatest;
      meet_[t * n + s] = greatest;
    }
  }

  top_ = -1;
  for (std::size_t t = 0; t < n; ++t) {
    bool is_top = true;
    for (std::size_t z = 0; z < n; ++z)
      if (!leq_[z * n + t]) {
        is_top = false;
        break;
      }
    if (is_top) {
      top_ = static_cast<int>(t);
      break;
    }
  }

  finalized_ = true;
}

int glb(const std::string& s, const std::string& t, const TypeHierarchy& h) {
  int si = h.id_of(s);
  int ti = h.id_of(t);
  if (si < 0 || ti < 0) throw ValidationError("unknown type symbol in glb query");
  return h.glb(si, ti);
}

}  // namespace loglin
