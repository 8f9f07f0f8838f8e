#pragma once

#include <string>
#include <vector>

#include "loglin/model.hpp"

namespace fixtures {

// The running example: a two-branch type hierarchy and a program whose
// s-queries are ambiguous exactly when the query type covers both branches.
inline const char* kDemoProgram = R"(# hierarchical types
subtype a c.
subtype c e.
subtype b d.
subtype d e.

s(Z) :- p(Z), q(Z).
p(Z) :- Z = a.
p(Z) :- Z = b.
q(Z) :- Z = a.
q(Z) :- Z = b.
)";

// Ten tokens over five query types; the last query is ambiguous.
inline const char* kDemoCorpus =
    "3\ts(Z) & Z = a\n"
    "1\ts(Z) & Z = b\n"
    "4\ts(Z) & Z = c\n"
    "1\ts(Z) & Z = d\n"
    "1\ts(Z) & Z = e\n";

struct Demo {
  loglin::Program program;
  std::vector<loglin::CorpusEntry> corpus;
  loglin::TreeSpace space;
};

inline Demo make_demo(const loglin::EnumLimits& lim = {}) {
  Demo d;
  d.program = loglin::load_program(kDemoProgram);
  d.corpus = loglin::load_corpus(kDemoCorpus, d.program);
  d.space = loglin::build_space(d.program, d.corpus, lim);
  return d;
}

inline loglin::PropertyPattern terminal_a(const loglin::Program& p) {
  return loglin::parse_pattern("[V0=a]", p);
}
inline loglin::PropertyPattern terminal_b(const loglin::Program& p) {
  return loglin::parse_pattern("[V0=b]", p);
}

inline std::vector<loglin::PropertyPattern> demo_patterns(const loglin::Program& p) {
  return {terminal_a(p), terminal_b(p)};
}

inline loglin::LogLinearModel demo_model(const Demo& d, double lambda1 = 0.0,
                                         double lambda2 = 0.0) {
  Eigen::VectorXd lambda(2);
  lambda << lambda1, lambda2;
  return loglin::make_model(d.space, demo_patterns(d.program), lambda);
}

// One unambiguous query over a trivial program: a singleton space whose
// only tree has probability one.
struct Singleton {
  loglin::Program program;
  loglin::TreeSpace space;
};

inline Singleton make_singleton() {
  Singleton s;
  s.program = loglin::load_program(
      "type a.\n"
      "r(X) :- X = a.\n");
  auto corpus = loglin::load_corpus("2\tr(X)\n", s.program);
  s.space = loglin::build_space(s.program, corpus);
  return s;
}

}  // namespace fixtures
