#include <doctest.h>

#include <thread>

#include "loglin/derivation.hpp"
#include "loglin/parser.hpp"
#include "support/fixtures.hpp"

using namespace loglin;

namespace {

std::vector<Constraint> store_of(const std::string& text, const Program& p) {
  Goal g = parse_goal(text, p);
  std::vector<Constraint> cs;
  for (const Conjunct& c : g.conjuncts)
    if (std::holds_alternative<Constraint>(c)) cs.push_back(std::get<Constraint>(c));
  return cs;
}

std::string answer_text(const Program& p, const std::string& query, std::size_t tree) {
  Enumeration en = enumerate_proof_trees(p, parse_goal(query, p), {});
  REQUIRE(tree < en.trees.size());
  return render_store(en.trees[tree], answer(en.trees[tree]), p);
}

}  // namespace

TEST_CASE("solve intersects constraints per variable") {
  Program p = load_program(fixtures::kDemoProgram);

  auto solved = solve(store_of("s(Z) & Z = c & Z = a", p), p.types);
  REQUIRE(solved.has_value());
  REQUIRE(solved->size() == 1);
  CHECK(p.types.name((*solved)[0].type) == "a");

  CHECK_FALSE(solve(store_of("s(Z) & Z = c & Z = b", p), p.types).has_value());

  auto single = solve(store_of("s(Z) & Z = a", p), p.types);
  REQUIRE(single.has_value());
  CHECK(p.types.name((*single)[0].type) == "a");
}

TEST_CASE("demo queries enumerate the expected trees and answers") {
  Program p = load_program(fixtures::kDemoProgram);

  struct Expected {
    const char* query;
    std::size_t trees;
  };
  const Expected cases[] = {
      {"s(Z) & Z = a", 1}, {"s(Z) & Z = b", 1}, {"s(Z) & Z = c", 1},
      {"s(Z) & Z = d", 1}, {"s(Z) & Z = e", 2},
  };
  std::size_t total = 0;
  for (const Expected& c : cases) {
    Enumeration en = enumerate_proof_trees(p, parse_goal(c.query, p), {});
    CHECK(en.trees.size() == c.trees);
    CHECK_FALSE(en.truncated);
    total += en.trees.size();
  }
  CHECK(total == 6);

  CHECK(answer_text(p, "s(Z) & Z = a", 0) == "Z = a");
  CHECK(answer_text(p, "s(Z) & Z = c", 0) == "Z = a");
  CHECK(answer_text(p, "s(Z) & Z = d", 0) == "Z = b");
  // Ambiguous query: clause order fixes the answer order.
  CHECK(answer_text(p, "s(Z) & Z = e", 0) == "Z = a");
  CHECK(answer_text(p, "s(Z) & Z = e", 1) == "Z = b");
}

TEST_CASE("node chains mirror the derivation") {
  Program p = load_program(fixtures::kDemoProgram);
  Enumeration en = enumerate_proof_trees(p, parse_goal("s(Z) & Z = c", p), {});
  REQUIRE(en.trees.size() == 1);
  const ProofTree& t = en.trees[0];
  REQUIRE(t.nodes.size() == 4);
  CHECK(render_node(t, 0, p) == "s(Z) & Z = c");
  CHECK(render_node(t, 1, p) == "p(Z) & q(Z) & Z = c");
  CHECK(render_node(t, 2, p) == "q(Z) & Z = a");
  CHECK(render_node(t, 3, p) == "Z = a");
  CHECK(t.nodes[0].clause == -1);
  CHECK(t.nodes[1].clause == 0);
}

TEST_CASE("every node's store is satisfiable in every enumerated tree") {
  Program p = load_program(fixtures::kDemoProgram);
  for (const char* q : {"s(Z) & Z = a", "s(Z) & Z = c", "s(Z) & Z = e"}) {
    Enumeration en = enumerate_proof_trees(p, parse_goal(q, p), {});
    for (const ProofTree& t : en.trees)
      for (const TreeNode& n : t.nodes) {
        std::vector<Constraint> as_constraints;
        for (const StoreEntry& e : n.store) as_constraints.push_back({e.var, e.type});
        CHECK(solve(as_constraints, p.types).has_value());
      }
  }
}

TEST_CASE("depth bound prunes resolution") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g = parse_goal("s(Z) & Z = c", p);
  CHECK(enumerate_proof_trees(p, g, {0, 10000}).trees.empty());
  CHECK(enumerate_proof_trees(p, g, {2, 10000}).trees.empty());
  CHECK(enumerate_proof_trees(p, g, {3, 10000}).trees.size() == 1);
}

TEST_CASE("max_trees truncation is flagged, not silent") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g = parse_goal("s(Z) & Z = e", p);
  Enumeration en = enumerate_proof_trees(p, g, {20, 1});
  CHECK(en.trees.size() == 1);
  CHECK(en.truncated);
  Enumeration full = enumerate_proof_trees(p, g, {20, 2});
  CHECK(full.trees.size() == 2);
  CHECK_FALSE(full.truncated);
}

TEST_CASE("enumeration is deterministic") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g = parse_goal("s(Z) & Z = e", p);
  Enumeration a = enumerate_proof_trees(p, g, {});
  Enumeration b = enumerate_proof_trees(p, g, {});
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t i = 0; i < a.trees.size(); ++i)
    CHECK(a.trees[i].nodes == b.trees[i].nodes);
}

TEST_CASE("unsatisfiable root store yields no trees") {
  Program p = load_program(fixtures::kDemoProgram);
  CHECK(enumerate_proof_trees(p, parse_goal("s(Z) & Z = c & Z = d", p), {}).trees.empty());
}

TEST_CASE("constraint-only goal is already a proof tree") {
  Program p = load_program(fixtures::kDemoProgram);
  Enumeration en = enumerate_proof_trees(p, parse_goal("Z = a", p), {0, 10});
  REQUIRE(en.trees.size() == 1);
  CHECK(en.trees[0].nodes.size() == 1);
  CHECK(render_store(en.trees[0], answer(en.trees[0]), p) == "Z = a");
}

TEST_CASE("recursive programs respect the depth bound") {
  Program p = load_program(
      "type z.\n"
      "nat(X) :- X = z.\n"
      "nat(X) :- nat(X).\n");
  Goal g = parse_goal("nat(X)", p);
  CHECK(enumerate_proof_trees(p, g, {1, 100}).trees.size() == 1);
  CHECK(enumerate_proof_trees(p, g, {4, 100}).trees.size() == 4);
  Enumeration capped = enumerate_proof_trees(p, g, {50, 10});
  CHECK(capped.trees.size() == 10);
  CHECK(capped.truncated);
}

TEST_CASE("repeated head variables alias their arguments") {
  Program p = load_program(
      "subtype a c.\n"
      "type b.\n"
      "eq(X, X).\n");
  Enumeration en = enumerate_proof_trees(p, parse_goal("eq(U, V) & U = a & V = c", p), {});
  REQUIRE(en.trees.size() == 1);
  // The classes of U and V merge; the meet of a and c is a.
  const std::vector<StoreEntry>& ans = answer(en.trees[0]);
  REQUIRE(ans.size() == 1);
  CHECK(p.types.name(ans[0].type) == "a");

  CHECK(enumerate_proof_trees(p, parse_goal("eq(U, V) & U = a & V = b", p), {}).trees.empty());
}

TEST_CASE("a shared program enumerates safely from concurrent threads") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g = parse_goal("s(Z) & Z = e", p);
  Enumeration reference = enumerate_proof_trees(p, g, {});
  std::vector<std::thread> workers;
  std::vector<int> sizes(4, -1);
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] {
      Enumeration en = enumerate_proof_trees(p, g, {});
      sizes[static_cast<std::size_t>(w)] =
          en.trees.size() == reference.trees.size() &&
                  en.trees[0].nodes == reference.trees[0].nodes
              ? static_cast<int>(en.trees.size())
              : -1;
    });
  for (auto& t : workers) t.join();
  for (int s : sizes) CHECK(s == 2);
}

TEST_CASE("body-local variables are standardized apart") {
  Program p = load_program(
      "type a.\ntype b.\n"
      "r(X) :- t(Y), X = a.\n"
      "t(Y) :- Y = b.\n");
  Enumeration en = enumerate_proof_trees(p, parse_goal("r(X)", p), {});
  REQUIRE(en.trees.size() == 1);
  // The solved store keeps the body-local binding, reported verbatim.
  CHECK(answer(en.trees[0]).size() == 2);
}
