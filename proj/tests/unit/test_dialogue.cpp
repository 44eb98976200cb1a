#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "syncomp/dialogue.hpp"

using namespace syncomp;

namespace {

std::string single_token(const std::string& dialogue, const std::string& speaker,
                         const std::string& utterance = "") {
  std::string s = "# dialogue_id = " + dialogue + "\n# speaker = " + speaker + "\n";
  if (!utterance.empty()) s += "# utterance_id = " + utterance + "\n";
  return s + "1\tJa\t_\tINTJ\t_\t_\t0\troot\t_\t_\n\n";
}

Dialogue with_speakers(const std::vector<std::string>& speakers) {
  Dialogue d;
  d.id = "x";
  for (const auto& s : speakers) d.utterances.push_back({s, "", tree_from_heads({0})});
  d.initiator = speakers.front();
  return d;
}

}  // namespace

TEST_CASE("two utterances make one dialogue") {
  const auto r = load_corpus({{"in", single_token("d1", "A") + single_token("d1", "B")}}, nullptr);
  REQUIRE(r.corpus.dialogues.size() == 1);
  CHECK(r.corpus.dialogues[0].initiator == "A");
  CHECK(r.corpus.dialogues[0].utterances[1].utterance_id == "2");
  CHECK(r.warnings.empty());
}

TEST_CASE("manifest wins over comments") {
  const std::string text = single_token("d1", "A") + single_token("d1", "B");
  std::istringstream in(fixtures::read("manifest_single.csv"));
  const auto manifest = read_manifest(in);
  CHECK(manifest.at({"d1", "2"}) == "A");
  CHECK_THROWS_AS(load_corpus({{"in", text}}, &manifest), LoadError);

  LoadOptions lenient;
  lenient.lenient = true;
  const auto r = load_corpus({{"in", text}}, &manifest, lenient);
  CHECK(r.corpus.dialogues.empty());
  CHECK(r.warnings.size() == 1);

  std::istringstream flip("dialogue_id,utterance_id,speaker\nd1,1,B\nd1,2,A\n");
  const auto swapped = read_manifest(flip);
  CHECK(load_corpus({{"in", text}}, &swapped).corpus.dialogues[0].initiator == "B");
}

TEST_CASE("manifest format errors") {
  std::istringstream no_header("d1,1,A\n");
  CHECK_THROWS_AS(read_manifest(no_header), LoadError);
  std::istringstream dup("dialogue_id,utterance_id,speaker\nd,1,A\nd,1,B\n");
  CHECK_THROWS_AS(read_manifest(dup), LoadError);
  std::istringstream short_row("dialogue_id,utterance_id,speaker\nd,1\n");
  CHECK_THROWS_AS(read_manifest(short_row), LoadError);
}

TEST_CASE("speaker metadata is required") {
  const std::string text = "# dialogue_id = d1\n1\tJa\t_\tINTJ\t_\t_\t0\troot\t_\t_\n\n";
  CHECK_THROWS_AS(load_corpus({{"in", text}}, nullptr), LoadError);
  const std::string no_dialogue = "# speaker = A\n1\tJa\t_\tINTJ\t_\t_\t0\troot\t_\t_\n\n";
  CHECK_THROWS_AS(load_corpus({{"in", no_dialogue}}, nullptr), LoadError);

  LoadOptions per_file;
  per_file.layout = Layout::kPerDialogueFile;
  per_file.allow_monologue = true;
  const auto r = load_corpus({{"dir/talk7.conllu", no_dialogue}}, nullptr, per_file);
  CHECK(r.corpus.dialogues.at(0).id == "talk7");
}

TEST_CASE("duplicate utterance ids are rejected") {
  const auto text = single_token("d1", "A", "1") + single_token("d1", "B", "1");
  CHECK_THROWS_AS(load_corpus({{"in", text}}, nullptr), LoadError);
}

TEST_CASE("three speakers are dropped in lenient mode") {
  const auto text = fixtures::read("three_speakers.conllu");
  CHECK_THROWS_AS(load_corpus({{"in", text}}, nullptr), LoadError);
  LoadOptions lenient;
  lenient.lenient = true;
  const auto r = load_corpus({{"in", text}}, nullptr, lenient);
  CHECK(r.corpus.dialogues.empty());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("invalid trees: strict fails, lenient drops") {
  const auto text = single_token("d1", "A") + single_token("d1", "B") +
                    "# dialogue_id = d1\n# speaker = A\n" + fixtures::read("cyclic.conllu");
  CHECK_THROWS_AS(load_corpus({{"in", text}}, nullptr), InvalidTreeError);
  LoadOptions lenient;
  lenient.lenient = true;
  const auto r = load_corpus({{"in", text}}, nullptr, lenient);
  CHECK(r.corpus.dialogues.at(0).utterances.size() == 2);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("utterances follow numeric utterance ids across files") {
  const auto r = load_corpus({{"b", single_token("d", "B", "10")},
                              {"a", single_token("d", "A", "9") + single_token("e", "X", "1") +
                                        single_token("e", "Y", "2")}},
                             nullptr);
  REQUIRE(r.corpus.dialogues.size() == 2);
  CHECK(r.corpus.dialogues[0].id == "d");
  CHECK(r.corpus.dialogues[0].initiator == "A");
  CHECK(r.corpus.dialogues[1].id == "e");
}

TEST_CASE("monologues only when asked") {
  const auto text = fixtures::read("four_tokens.conllu");
  CHECK_THROWS_AS(load_corpus({{"in", text}}, nullptr), LoadError);
  LoadOptions mono;
  mono.allow_monologue = true;
  CHECK(load_corpus({{"in", text}}, nullptr, mono).corpus.dialogues.size() == 1);
}

TEST_CASE("role assignment") {
  auto roles = assign_roles(with_speakers({"A", "B", "A", "B"}));
  CHECK(roles.at("A") == Role::kInitiator);
  CHECK(roles.at("B") == Role::kFollower);
  roles = assign_roles(with_speakers({"B", "B", "A"}));
  CHECK(roles.at("B") == Role::kInitiator);
  CHECK(roles.at("A") == Role::kFollower);
  CHECK_THROWS_AS(check_dialogue(with_speakers({"A"})), LoadError);
  CHECK_THROWS_AS(check_dialogue(with_speakers({"A", "B", "C"})), LoadError);
}

TEST_CASE("complexity series is positioned per role") {
  const auto corpus = load_corpus({{"in", fixtures::read("three_turns.conllu")}}, nullptr).corpus;
  const auto records = complexity_series(corpus, ComplexityConfig{});
  REQUIRE(records.size() == 3);
  CHECK(records[0].speaker == "A");
  CHECK(records[0].position == 1);
  CHECK(records[1].speaker == "A");
  CHECK(records[1].position == 2);
  CHECK(records[1].role_total == 2);
  CHECK(records[1].normalized_position() == 1.0);
  CHECK(records[2].speaker == "B");
  CHECK(records[2].role == Role::kFollower);
  CHECK(records[2].position == 1);
  for (const auto& r : records) CHECK(r.sc == 1.0);

  CHECK(complexity_series(Corpus{}, ComplexityConfig{}).empty());
}

TEST_CASE("worked example as the initiator's first utterance") {
  const auto text = fixtures::read("four_tokens.conllu") + single_token("ex1", "B", "5");
  const auto corpus = load_corpus({{"in", text}}, nullptr).corpus;
  const auto records = complexity_series(corpus, ComplexityConfig{});
  REQUIRE(records.size() == 2);
  CHECK(records[0].role == Role::kInitiator);
  CHECK(records[0].sc == doctest::Approx(2.1667).epsilon(1e-4 / 2.1667));
  // The stored value is exactly what the formula gives for its components.
  CHECK(records[0].sc == syntactic_complexity(records[0].components, ComplexityConfig{}));
}
