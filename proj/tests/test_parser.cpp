#include <doctest.h>

#include <random>

#include "loglin/parser.hpp"
#include "support/fixtures.hpp"

using namespace loglin;

TEST_CASE("demo program loads with five clauses and five type symbols") {
  Program p = load_program(fixtures::kDemoProgram);
  CHECK(p.clauses.size() == 5);
  CHECK(p.types.size() == 5);
  CHECK(p.preds.size() == 3);
  CHECK(p.pred_id("s") >= 0);
  CHECK(p.preds[static_cast<std::size_t>(p.pred_id("s"))].arity == 1);

  const Clause& first = p.clauses[0];
  CHECK(first.head.pred == p.pred_id("s"));
  CHECK(first.body.size() == 2);
  CHECK(first.var_count == 1);
}

TEST_CASE("empty clause list with a valid hierarchy") {
  Program p = load_program("subtype a b.\n# nothing else\n");
  CHECK(p.clauses.empty());
  CHECK(p.types.size() == 2);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    load_program("subtype a b.\np(X) :- X = .\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(load_program("p(X)\n"), ParseError);          // missing '.'
  CHECK_THROWS_AS(load_program("p(x).\n"), ParseError);         // lowercase argument
  CHECK_THROWS_AS(load_program("P(X).\n"), ParseError);         // uppercase predicate
  CHECK_THROWS_AS(load_program("p(X) :- X = q.\n"), ParseError);  // unknown type
}

TEST_CASE("arity must be consistent across the program") {
  CHECK_THROWS_AS(load_program("type a.\np(X).\np(X, Y).\n"), ParseError);
  CHECK_THROWS_AS(load_program("type a.\np(X) :- q(X).\nq(X, Y).\n"), ParseError);
}

TEST_CASE("goal parsing validates predicates and types") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g = parse_goal("s(Z) & Z = a", p);
  CHECK(g.conjuncts.size() == 2);
  CHECK(g.var_names == std::vector<std::string>{"Z"});
  CHECK(render_goal(g, p) == "s(Z) & Z = a");

  CHECK_THROWS_AS(parse_goal("", p), ParseError);
  CHECK_THROWS_AS(parse_goal("smash(Z)", p), ParseError);
  CHECK_THROWS_AS(parse_goal("s(Z) & Z = zz", p), ParseError);
  CHECK_THROWS_AS(parse_goal("s(Z, W)", p), ParseError);
  CHECK_THROWS_AS(parse_goal("s(Z) Z = a", p), ParseError);
}

TEST_CASE("corpus: counts, tabs, comments, duplicate merging") {
  Program p = load_program(fixtures::kDemoProgram);
  auto entries = load_corpus(fixtures::kDemoCorpus, p);
  REQUIRE(entries.size() == 5);
  CHECK(entries[0].count == 3);
  CHECK(entries[2].count == 4);
  CHECK(entries[4].line == 5);

  // Renamed query variables denote the same query type.
  auto merged = load_corpus("1\ts(Z) & Z = a\n# note\n\n2\ts(W) & W = a\n", p);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].count == 3);

  CHECK_THROWS_AS(load_corpus("1 s(Z)\n", p), ParseError);     // no tab
  CHECK_THROWS_AS(load_corpus("0\ts(Z)\n", p), ParseError);    // zero count
  CHECK_THROWS_AS(load_corpus("-1\ts(Z)\n", p), ParseError);   // negative count
  CHECK_THROWS_AS(load_corpus("x\ts(Z)\n", p), ParseError);    // non-numeric count
  try {
    load_corpus("1\ts(Z) & Z = a\n3\tnope(Z)\n", p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("malformed input always fails with a parse or validation error") {
  Program p = load_program(fixtures::kDemoProgram);
  std::mt19937 rng(314159);
  const std::string alphabet = "abzZXY()=,&.:-# \t[]0157subtype";
  auto random_text = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return s;
  };
  auto mutate = [&](std::string s) {
    std::size_t pos = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
    s[pos] = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    return s;
  };

  int survived = 0;
  for (int i = 0; i < 600; ++i) {
    std::string garbage = random_text(1 + static_cast<std::size_t>(i % 40));
    std::string mutated_program = mutate(fixtures::kDemoProgram);
    std::string mutated_corpus = mutate(fixtures::kDemoCorpus);
    try {
      load_program(garbage);
      load_program(mutated_program);
      ++survived;
    } catch (const ParseError&) {
    } catch (const ValidationError&) {
    }
    try {
      parse_goal(garbage, p);
      load_corpus(mutated_corpus, p);
      parse_pattern(garbage, p);
    } catch (const ParseError&) {
    } catch (const ValidationError&) {
    }
  }
  // Some mutations stay well-formed; the point is that nothing escapes the
  // two error types above.
  CHECK(survived >= 0);
}

TEST_CASE("canonical goal keys abstract variable names") {
  Program p = load_program(fixtures::kDemoProgram);
  Goal g1 = parse_goal("s(Z) & Z = a", p);
  Goal g2 = parse_goal("s(Other) & Other = a", p);
  Goal g3 = parse_goal("s(Z) & Z = b", p);
  CHECK(canonical_goal_key(g1, p) == canonical_goal_key(g2, p));
  CHECK(canonical_goal_key(g1, p) != canonical_goal_key(g3, p));
}
