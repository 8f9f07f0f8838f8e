#include <doctest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include "loglin/model.hpp"
#include "loglin/numerics.hpp"
#include "support/fixtures.hpp"
#include "support/random_fixtures.hpp"

using namespace loglin;
using fixtures::make_demo;

TEST_CASE("space construction groups trees per query") {
  auto d = make_demo();
  CHECK(d.space.tree_count() == 6);
  REQUIRE(d.space.queries.size() == 5);
  CHECK(d.space.total_tokens == 10);
  CHECK(d.space.queries[4].size == 2);
  CHECK(d.space.queries[4].offset == 4);
  for (const QueryTrees& q : d.space.queries) CHECK_FALSE(q.truncated);

  CHECK_THROWS_AS(
      build_space(d.program, load_corpus("1\ts(Z) & Z = c & Z = d\n", d.program), {}),
      ValidationError);
}

TEST_CASE("unnormalized weights match the closed-form values") {
  auto d = make_demo();
  LogLinearModel uniform = fixtures::demo_model(d);
  for (Eigen::Index x = 0; x < 6; ++x)
    CHECK(unnormalized_weight(uniform, x) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  LogLinearModel m = fixtures::demo_model(d, std::log(1.5), std::log(0.5));
  CHECK(unnormalized_weight(m, 0) == doctest::Approx(0.25).epsilon(1e-12));       // nu = (1,0)
  CHECK(unnormalized_weight(m, 1) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));  // nu = (0,1)
}

TEST_CASE("normalizer sums the weights") {
  auto d = make_demo();
  CHECK(normalizer(fixtures::demo_model(d)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normalizer(fixtures::demo_model(d, std::log(1.5), std::log(0.5))) ==
        doctest::Approx(1.0).epsilon(1e-12));

  fixtures::Singleton s = fixtures::make_singleton();
  LogLinearModel single = make_model(s.space, {});
  CHECK(normalizer(single) == doctest::Approx(unnormalized_weight(single, 0)).epsilon(1e-12));
}

TEST_CASE("model and conditional probabilities") {
  auto d = make_demo();
  LogLinearModel uniform = fixtures::demo_model(d);
  CHECK(conditional_prob(uniform, d.space, 4, 4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(conditional_prob(uniform, d.space, 4, 5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(conditional_prob(uniform, d.space, 0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  LogLinearModel it1 = fixtures::demo_model(d, std::log(1.5), std::log(0.5));
  CHECK(conditional_prob(it1, d.space, 4, 4) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(prob(it1, 0) == doctest::Approx(0.25).epsilon(1e-12));

  for (Eigen::Index x = 0; x < 6; ++x) CHECK(prob(uniform, x) > 0.0);
}

TEST_CASE("expectations under the model and conditionals") {
  auto d = make_demo();
  LogLinearModel uniform = fixtures::demo_model(d);
  Eigen::VectorXd nu1 = uniform.counts.col(0);
  CHECK(expectation_model(uniform, nu1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(expectation_conditional(uniform, d.space, 0, nu1) == doctest::Approx(1.0));
  CHECK(expectation_model(uniform, Eigen::VectorXd::Ones(6)) == 1.0);  // exactly
}

TEST_CASE("incomplete-data log-likelihood") {
  auto d = make_demo();
  CHECK(std::abs(log_likelihood(fixtures::demo_model(d), d.space) - (-17.224448)) < 1e-6);
  CHECK(std::abs(log_likelihood(fixtures::demo_model(d, std::log(1.5), std::log(0.5)),
                                d.space) -
                 (-15.772486)) < 1e-6);

  fixtures::Singleton s = fixtures::make_singleton();
  CHECK(log_likelihood(make_model(s.space, {}), s.space) == 0.0);  // exactly
}

TEST_CASE("probabilities normalize to one within 1e-12") {
  auto d = make_demo();
  for (auto [l1, l2] : {std::pair{0.0, 0.0}, {std::log(1.5), std::log(0.5)}, {2.3, -1.7}}) {
    LogLinearModel m = fixtures::demo_model(d, l1, l2);
    CHECK(std::abs(model_probs(m).sum() - 1.0) < 1e-12);
    Eigen::VectorXd cond = conditional_probs(m, d.space);
    for (const QueryTrees& q : d.space.queries)
      CHECK(std::abs(cond.segment(q.offset, q.size).sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("constant shift leaves conditionals unchanged when totals are one") {
  auto d = make_demo();
  LogLinearModel m = fixtures::demo_model(d, std::log(1.5), std::log(0.5));
  REQUIRE(m.unit_total);
  LogLinearModel shifted = m;
  shifted.lambda.array() += 0.7;
  Eigen::VectorXd a = conditional_probs(m, d.space);
  Eigen::VectorXd b = conditional_probs(shifted, d.space);
  for (Eigen::Index x = 0; x < a.size(); ++x) CHECK(std::abs(a[x] - b[x]) < 1e-12);
}

TEST_CASE("cached counts equal recomputation") {
  auto d = make_demo();
  LogLinearModel m = fixtures::demo_model(d);
  for (Eigen::Index x = 0; x < d.space.tree_count(); ++x) {
    Eigen::VectorXi fresh =
        property_vector(d.space.trees[static_cast<std::size_t>(x)], m.patterns);
    for (Eigen::Index i = 0; i < fresh.size(); ++i)
      CHECK(m.counts(x, i) == static_cast<double>(fresh[i]));
  }
  CHECK(m.unit_total);
}

TEST_CASE("model save/load round-trips parameters bit for bit") {
  auto d = make_demo();
  LogLinearModel m = fixtures::demo_model(d, 0.44182918084408884, -0.81091771629445497);
  std::ostringstream out;
  save_model(m, 20, out);

  std::istringstream in(out.str());
  LoadedModel loaded = load_model(in, d.program);
  CHECK(loaded.depth == 20);
  REQUIRE(loaded.patterns.size() == 2);
  CHECK(loaded.patterns[0].canon == "[V0=a]");
  REQUIRE(loaded.lambda.size() == 2);
  for (Eigen::Index i = 0; i < 2; ++i) {
    std::uint64_t a, b;
    std::memcpy(&a, &m.lambda[i], sizeof a);
    std::memcpy(&b, &loaded.lambda[i], sizeof b);
    CHECK(a == b);
  }

  // A second round trip produces identical bytes.
  LogLinearModel again = make_model(d.space, loaded.patterns, loaded.lambda);
  std::ostringstream out2;
  save_model(again, 20, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("model file validation") {
  auto d = make_demo();
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return load_model(in, d.program);
  };
  CHECK_THROWS_AS(parse("wrong header\n"), ValidationError);
  CHECK_THROWS_AS(parse("loglin-clp-model 1\ndepth 20\np0 gaussian\n"), ValidationError);
  CHECK_THROWS_AS(parse("loglin-clp-model 1\ndepth 20\np0 uniform\nprop x [V0=a]\n"),
                  ValidationError);
  LoadedModel empty = parse("loglin-clp-model 1\ndepth 7\np0 uniform\n");
  CHECK(empty.patterns.empty());
  CHECK(empty.depth == 7);
}

TEST_CASE("random fixtures normalize too") {
  std::mt19937 rng(7);
  for (int i = 0; i < 8; ++i) {
    auto fx = random_fixtures::make_fixture(rng);
    CHECK(std::abs(model_probs(fx.model).sum() - 1.0) < 1e-12);
    Eigen::VectorXd cond = conditional_probs(fx.model, fx.space);
    for (const QueryTrees& q : fx.space.queries)
      CHECK(std::abs(cond.segment(q.offset, q.size).sum() - 1.0) < 1e-12);
    for (Eigen::Index x = 0; x < fx.space.tree_count(); ++x)
      CHECK(prob(fx.model, x) > 0.0);
  }
}
