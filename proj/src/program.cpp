#include "loglin/program.hpp"

#include <unordered_map>

namespace loglin {

namespace {

std::string render_conjuncts(const Goal& g, const Program& p,
                             const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < g.conjuncts.size(); ++i) {
    if (i) out += " & ";
    const Conjunct& c = g.conjuncts[i];
    if (std::holds_alternative<Atom>(c)) {
      const Atom& a = std::get<Atom>(c);
      out += p.preds[static_cast<std::size_t>(a.pred)].name;
      if (!a.args.empty()) {
        out += '(';
        for (std::size_t k = 0; k < a.args.size(); ++k) {
          if (k) out += ", ";
          out += names[static_cast<std::size_t>(a.args[k])];
        }
        out += ')';
      }
    } else {
      const Constraint& cn = std::get<Constraint>(c);
      out += names[static_cast<std::size_t>(cn.var)];
      out += " = ";
      out += p.types.name(cn.type);
    }
  }
  return out;
}

}  // namespace

std::string render_goal(const Goal& g, const Program& p) {
  return render_conjuncts(g, p, g.var_names);
}

std::string canonical_goal_key(const Goal& g, const Program& p) {
  std::vector<std::string> normalized(g.var_names.size());
  int next = 0;
  auto touch = [&](int v) {
    auto& slot = normalized[static_cast<std::size_t>(v)];
    if (slot.empty()) slot = "V" + std::to_string(next++);
  };
  for (const Conjunct& c : g.conjuncts) {
    if (std::holds_alternative<Atom>(c))
      for (int v : std::get<Atom>(c).args) touch(v);
    else
      touch(std::get<Constraint>(c).var);
  }
  return render_conjuncts(g, p, normalized);
}

}  // namespace loglin
