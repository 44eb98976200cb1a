#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syncomp/treemetrics.hpp"

using namespace syncomp;

namespace {

DepTree fixture_tree(const char* name) { return parse_conllu(fixtures::read(name)).at(0); }

std::vector<int> chain(int n) {
  std::vector<int> h(n);
  for (int i = 0; i < n; ++i) h[i] = i;  // token i+1 governed by token i
  return h;
}

std::vector<int> star(int n) {
  std::vector<int> h(n, 1);
  h[0] = 0;
  return h;
}

}  // namespace

TEST_CASE("worked example sentences") {
  const auto a = compute_metrics(fixture_tree("four_tokens.conllu"));
  CHECK(a.length == 4);
  CHECK(a.head_count == 3);
  CHECK(a.depth == 3);
  CHECK(a.branching_factor == 1.5);
  CHECK(a.node_count == 4);

  const auto b = compute_metrics(fixture_tree("eight_tokens.conllu"));
  CHECK(b.length == 8);
  CHECK(b.head_count == 4);
  CHECK(b.depth == 4);
}

TEST_CASE("single token") {
  const auto t = tree_from_heads({0});
  CHECK(head_count(t) == 1);
  CHECK(tree_depth(t) == 1);
  CHECK(branching_factor(t) == 0.0);
  CHECK(sentence_length(t) == 1);
}

TEST_CASE("empty tree") {
  const DepTree empty;
  CHECK(head_count(empty) == 0);
  CHECK(tree_depth(empty) == 0);
  CHECK(sentence_length(empty) == 0);
  CHECK_THROWS_AS(branching_factor(empty), UndefinedInputError);
  CHECK(compute_metrics(empty) == TreeMetrics{});
}

TEST_CASE("chains and stars") {
  for (int n = 2; n <= 12; ++n) {
    CAPTURE(n);
    const auto c = compute_metrics(tree_from_heads(chain(n)));
    CHECK(c.depth == n);
    CHECK(c.head_count == n);
    CHECK(c.branching_factor == 1.0);
    const auto s = compute_metrics(tree_from_heads(star(n)));
    CHECK(s.depth == 2);
    CHECK(s.head_count == 2);
    CHECK(s.branching_factor == static_cast<double>(n - 1));
  }
  CHECK(branching_factor(tree_from_heads(chain(5))) == 1.0);
}

TEST_CASE("punctuation filters") {
  auto t = parse_conllu(fixtures::read("multiword.conllu")).at(0);  // 5 words + PUNCT
  CHECK(sentence_length(t) == 5);
  CHECK(sentence_length(t, {false, false}) == 6);

  // Hang the full stop below the deepest word so it alone sets the depth.
  t.tokens[5].head = 3;
  CHECK(tree_depth(t) == 4);
  CHECK(tree_depth(t, {true, true}) == 3);
  CHECK(head_count(t) == 4);
  CHECK(head_count(t, {true, true}) == 3);
}

TEST_CASE("matches the path-enumeration oracle on random trees") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const auto heads = oracle::random_tree(rng, n);
    const auto expected = oracle::metrics(heads);
    const auto got = compute_metrics(tree_from_heads(heads));
    CAPTURE(n);
    CHECK(got.depth == expected.depth);
    CHECK(got.head_count == expected.head_count);
    CHECK(got.branching_factor == expected.branching);
    CHECK(got.depth <= got.length);
    CHECK(got.head_count <= got.length + 1);
  }
}

TEST_CASE("adding a leaf never lowers depth or head count") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    auto heads = oracle::random_tree(rng, n);
    const auto before = compute_metrics(tree_from_heads(heads));
    heads.push_back(1 + static_cast<int>(rng() % n));
    const auto after = compute_metrics(tree_from_heads(heads));
    CHECK(after.depth >= before.depth);
    CHECK(after.head_count >= before.head_count);
  }
}

TEST_CASE("invalid trees are refused") {
  CHECK_THROWS_AS(compute_metrics(tree_from_heads({2, 1})), InvalidTreeError);
  CHECK_THROWS_AS(tree_depth(tree_from_heads({0, 9})), InvalidTreeError);
}
