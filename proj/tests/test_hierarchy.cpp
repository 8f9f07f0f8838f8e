#include <doctest.h>

#include "loglin/parser.hpp"
#include "support/fixtures.hpp"

using namespace loglin;

TEST_CASE("demo hierarchy orders and meets") {
  Program p = load_program(fixtures::kDemoProgram);
  const TypeHierarchy& h = p.types;
  REQUIRE(h.size() == 5);

  int a = h.id_of("a"), b = h.id_of("b"), c = h.id_of("c"), d = h.id_of("d"), e = h.id_of("e");
  CHECK(h.leq(a, c));
  CHECK(h.leq(a, e));
  CHECK(h.leq(b, d));
  CHECK_FALSE(h.leq(c, d));

  CHECK(h.glb(a, c) == a);
  CHECK(h.glb(c, d) == kBottom);
  CHECK(h.glb(e, e) == e);
  CHECK(h.glb(b, e) == b);
  CHECK(glb("a", "c", h) == a);
}

TEST_CASE("glb is commutative and idempotent; top is neutral") {
  Program p = load_program(fixtures::kDemoProgram);
  const TypeHierarchy& h = p.types;
  int n = static_cast<int>(h.size());
  for (int s = 0; s < n; ++s) {
    CHECK(h.glb(s, s) == s);
    for (int t = 0; t < n; ++t) CHECK(h.glb(s, t) == h.glb(t, s));
  }
  REQUIRE(h.top() == h.id_of("e"));
  for (int s = 0; s < n; ++s) CHECK(h.glb(s, h.top()) == s);
}

TEST_CASE("cycles are rejected at load time") {
  CHECK_THROWS_AS(load_program("subtype a c.\nsubtype c a.\n"), ValidationError);
  CHECK_THROWS_AS(load_program("subtype a b.\nsubtype b c.\nsubtype c a.\n"), ValidationError);
}

TEST_CASE("ambiguous meets are rejected at load time") {
  // x and y are both maximal common lower bounds of a and b.
  const char* diamond =
      "subtype x a.\n"
      "subtype x b.\n"
      "subtype y a.\n"
      "subtype y b.\n";
  CHECK_THROWS_AS(load_program(diamond), ValidationError);
}

TEST_CASE("self edge declares a symbol without ordering effects") {
  Program p = load_program("subtype a a.\n");
  CHECK(p.types.size() == 1);
  CHECK(p.types.glb(0, 0) == 0);
}
