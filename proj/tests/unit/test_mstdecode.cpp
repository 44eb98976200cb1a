#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syncomp/mstdecode.hpp"

using namespace syncomp;

namespace {

ScoreMatrix random_matrix(std::mt19937_64& rng, int n, double spread = 5.0) {
  std::normal_distribution<double> z(0.0, spread);
  ScoreMatrix m(n);
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (h != d) m.set(h, d, z(rng));
    }
  }
  return m;
}

}  // namespace

TEST_CASE("softmax examples") {
  ScoreMatrix one(1, 17.0);
  CHECK(head_probabilities(one).at(0, 1) == 1.0);

  ScoreMatrix two(2, 0.0);
  const auto p = head_probabilities(two);
  CHECK(p.at(0, 1) == 0.5);
  CHECK(p.at(2, 1) == 0.5);
  CHECK(p.at(1, 1) == 0.0);

  two.set(0, 1, 1.0);
  const auto q = head_probabilities(two);
  CHECK(q.at(0, 1) == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1)).epsilon(1e-12));
  CHECK(q.at(0, 1) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK(q.at(2, 1) == doctest::Approx(0.2689).epsilon(1e-3));
}

TEST_CASE("softmax columns sum to one, even for huge scores") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto probs = head_probabilities(random_matrix(rng, n, trial % 2 ? 1.0 : 500.0));
    for (int d = 1; d <= n; ++d) {
      double sum = 0;
      for (int h = 0; h <= n; ++h) sum += probs.at(h, d);
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("column shifts leave probabilities and the decoded tree alone") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto m = random_matrix(rng, n);
    auto shifted = m;
    const int d = 1 + static_cast<int>(rng() % n);
    for (int h = 0; h <= n; ++h) {
      if (h != d) shifted.set(h, d, m.at(h, d) + 37.5);
    }
    const auto a = head_probabilities(m);
    const auto b = head_probabilities(shifted);
    for (int h = 0; h <= n; ++h) CHECK(std::abs(a.at(h, d) - b.at(h, d)) <= 1e-9);
    CHECK(mst_decode(m) == mst_decode(shifted));
  }
}

TEST_CASE("small decodes") {
  CHECK(mst_decode(ScoreMatrix(1, 3.0)) == std::vector<int>{0});
  const auto m = ScoreMatrix::from_json(fixtures::read("two_tokens.json"));
  CHECK(mst_decode(m) == std::vector<int>{0, 1});
  CHECK(tree_score(m, {0, 1}) == 9.0);
  CHECK_THROWS_AS(mst_decode(ScoreMatrix(0)), std::invalid_argument);
}

TEST_CASE("the single-root constraint binds") {
  // Unconstrained, both tokens would hang off the root (10 + 10).
  ScoreMatrix m(3, 0.0);
  m.set(0, 1, 10);
  m.set(0, 2, 10);
  m.set(0, 3, 10);
  m.set(1, 2, 1);
  m.set(1, 3, 1);
  const auto heads = mst_decode(m);
  CHECK(heads == std::vector<int>{0, 1, 1});
}

TEST_CASE("equals exhaustive search for n <= 5") {
  std::mt19937_64 rng(99);
  for (int n = 1; n <= 5; ++n) {
    for (int trial = 0; trial < (n == 5 ? 40 : 150); ++trial) {
      const auto m = random_matrix(rng, n);
      const auto got = mst_decode(m);
      const auto expected =
          oracle::best_single_root_tree(n, [&](int h, int d) { return m.at(h, d); });
      CAPTURE(n);
      CHECK(got == expected);
      CHECK(validate_tree(tree_from_heads(got)).ok());
    }
  }
}

TEST_CASE("decoded trees from larger matrices are valid") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 20);
    CHECK(validate_tree(tree_from_heads(mst_decode(random_matrix(rng, n)))).ok());
  }
}

TEST_CASE("json input") {
  CHECK_THROWS_AS(ScoreMatrix::from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(ScoreMatrix::from_json(R"({"n": 2, "scores": [[1, 2]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScoreMatrix::from_json(R"({"n": 1, "scores": [["x"]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ScoreMatrix::from_json(R"({"n": 0, "scores": [[]]})"), std::invalid_argument);
  const auto m = ScoreMatrix::from_json(R"({"n": 1, "scores": [[2.5], [0]]})");
  CHECK(m.at(0, 1) == 2.5);
}
