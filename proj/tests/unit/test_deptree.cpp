#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syncomp/deptree.hpp"

using namespace syncomp;

namespace {

std::vector<int> heads_of(const DepTree& t) {
  std::vector<int> h;
  for (const auto& tok : t.tokens) h.push_back(tok.head);
  return h;
}

}  // namespace

TEST_CASE("parses the four-token example sentence") {
  const auto trees = parse_conllu(fixtures::read("four_tokens.conllu"));
  REQUIRE(trees.size() == 1);
  const auto& t = trees[0];
  CHECK(t.size() == 4);
  CHECK(heads_of(t) == std::vector<int>{2, 0, 4, 2});
  CHECK(t.tokens[1].form == "gibt");
  CHECK(t.tokens[3].misc == "SpaceAfter=No");
  CHECK(t.tokens[0].feats.at("PronType") == "Prs");
  CHECK(t.meta_value("speaker") == "A");
  CHECK(t.meta_value("dialogue_id") == "ex1");
  CHECK_FALSE(t.meta_value("missing"));
  CHECK(validate_tree(t).ok());
}

TEST_CASE("empty input gives no sentences") {
  CHECK(parse_conllu("").empty());
  CHECK(parse_conllu("\n\n").empty());
}

TEST_CASE("range lines and empty nodes are skipped") {
  const auto trees = parse_conllu(fixtures::read("multiword.conllu"));
  REQUIRE(trees.size() == 2);
  CHECK(trees[0].size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(trees[0].tokens[i].id == i + 1);
  CHECK(trees[0].tokens[4].deps == "5:obl:zu");
  CHECK(validate_tree(trees[0]).ok());
}

TEST_CASE("missing lemma and feats") {
  const auto trees = parse_conllu("1\tJa\t_\tINTJ\t_\t_\t0\troot\t_\t_\n");
  REQUIRE(trees.size() == 1);
  CHECK_FALSE(trees[0].tokens[0].lemma);
  CHECK(trees[0].tokens[0].feats.empty());
}

TEST_CASE("parse errors carry the line number") {
  const auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_conllu(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  SUBCASE("column count") { CHECK(line_of("# c\n1\ta\t_\tX\t_\t_\t0\troot\t_\n") == 2); }
  SUBCASE("non-integer head") { CHECK(line_of("1\ta\t_\tX\t_\t_\tx\troot\t_\t_\n") == 1); }
  SUBCASE("duplicate id") {
    CHECK(line_of("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n1\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n") == 2);
  }
  SUBCASE("self head") {
    CHECK(line_of("1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n\n1\ta\t_\tX\t_\t_\t1\troot\t_\t_\n") == 3);
  }
  SUBCASE("empty upos") { CHECK(line_of("1\ta\t_\t\t_\t_\t0\troot\t_\t_\n") == 1); }
  SUBCASE("bad feats") { CHECK(line_of("1\ta\t_\tX\t_\tCase\t0\troot\t_\t_\n") == 1); }
}

TEST_CASE("validation reports each violation kind") {
  CHECK(validate_tree(tree_from_heads({2, 0, 2})).ok());

  const auto cyc = validate_tree(tree_from_heads({2, 1}));
  REQUIRE(cyc.has(ViolationKind::kCycle));
  for (const auto& v : cyc.violations) {
    if (v.kind == ViolationKind::kCycle) CHECK(v.token_ids == std::vector<int>{1, 2});
  }
  CHECK(cyc.has(ViolationKind::kNoRoot));

  const auto two = validate_tree(tree_from_heads({0, 0}));
  CHECK(two.has(ViolationKind::kMultipleRoots));
  CHECK_FALSE(two.has(ViolationKind::kCycle));

  const auto range = validate_tree(tree_from_heads({0, 7}));
  CHECK(range.has(ViolationKind::kHeadOutOfRange));
  CHECK(range.violations.size() == 1);

  auto gap = tree_from_heads({0, 1});
  gap.tokens[1].id = 3;
  CHECK(validate_tree(gap).has(ViolationKind::kIdSequence));

  CHECK_THROWS_AS(require_valid(tree_from_heads({2, 1})), InvalidTreeError);
  CHECK_NOTHROW(require_valid(tree_from_heads({0})));
}

TEST_CASE("validation agrees with a reachability oracle on random head arrays") {
  std::mt19937_64 rng(7);
  int valid = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const auto heads = trial % 2 == 0 ? oracle::random_head_array(rng, n)
                                      : oracle::random_tree(rng, n);
    const bool expected = oracle::is_valid_tree(heads);
    CHECK(validate_tree(tree_from_heads(heads)).ok() == expected);
    valid += expected ? 1 : 0;
  }
  CHECK(valid > 2500);
  CHECK(valid < 5000);
}

TEST_CASE("serialize emits canonical blocks") {
  CHECK(serialize_conllu({tree_from_heads({0})}) == "1\tw1\t_\tX\t_\t_\t0\tdep\t_\t_\n\n");
  auto t = tree_from_heads({0});
  t.meta["speaker"] = "A";
  CHECK(serialize_conllu({t}).find("# speaker = A\n") != std::string::npos);
}

TEST_CASE("parse, serialize, parse is the identity on every fixture") {
  for (const char* name : {"four_tokens.conllu", "eight_tokens.conllu", "multiword.conllu", "cyclic.conllu",
                           "isc.conllu", "three_turns.conllu", "three_speakers.conllu"}) {
    CAPTURE(name);
    const auto once = parse_conllu(fixtures::read(name));
    const auto text = serialize_conllu(once);
    const auto twice = parse_conllu(text);
    CHECK(once == twice);
    CHECK(serialize_conllu(twice) == text);
  }
}

TEST_CASE("never yields a self-headed token") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto heads = oracle::random_tree(rng, 1 + static_cast<int>(rng() % 10));
    const auto parsed = parse_conllu(serialize_conllu({tree_from_heads(heads)}));
    for (const auto& tok : parsed.at(0).tokens) {
      CHECK(tok.head != tok.id);
    }
  }
}
