// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "data/jsonl.hpp"
#include "data/schema.hpp"
#include "data/sequence_set.hpp"
#include "data/vocab.hpp"
#include "error.hpp"
#include "helpers.hpp"

using namespace seqset;
using namespace seqset::data;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

SequenceSet sample(std::vector<std::pair<std::string, TokenList>> seqs) {
  SequenceSet s;
  s.id = "x";
  s.sequences = std::move(seqs);
  s.label = {Task::Binary, {1.0}};
  return s;
}

ModalitySchema ab_schema(std::size_t max_len = 8) {
  return ModalitySchema({{"A", max_len}, {"B", max_len}}, Task::Binary, 1);
}

}  // namespace

TEST_CASE("vocabulary specials and bijection") {
  Vocabulary v;
  CHECK(v.id("[C]") == 0);
  CHECK(v.id("[S]") == 1);
  CHECK(v.id("[UNK]") == 2);
  const auto a = v.add("alpha");
  CHECK(v.add("alpha") == a);
  CHECK(v.token(a) == "alpha");
  CHECK(v.id("never-seen") == Vocabulary::kUnkId);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.id(v.token(i)) == i);
}

TEST_CASE("build_vocab ordering and filtering") {
  std::vector<SequenceSet> corpus{sample({{"A", {"a", "a", "b"}}, {"B", {}}})};
  const auto v2 = build_vocab(corpus, 2);
  CHECK(v2.size() == 4);
  CHECK(v2.token(3) == "a");

  std::vector<SequenceSet> c2{sample({{"A", {"c", "b", "a"}}, {"B", {"b", "z"}}})};
  const auto v1 = build_vocab(c2, 1);
  // b twice, then a, c, z lexicographically
  CHECK(v1.tokens() == std::vector<std::string>{"[C]", "[S]", "[UNK]", "b", "a", "c", "z"});
  CHECK(build_vocab(c2, 1) == v1);
  CHECK(kind_of([] { build_vocab(std::vector<SequenceSet>{}, 1); }) == ErrorKind::Ingestion);
}

TEST_CASE("encode builds the unified sequence") {
  const auto schema = ab_schema();
  Vocabulary v;
  for (const char* t : {"a1", "a2", "b1"}) v.add(t);
  const auto u = encode(sample({{"A", {"a1", "a2"}}, {"B", {"b1"}}}), v, schema);
  CHECK(u.ids == std::vector<std::size_t>{0, v.id("a1"), v.id("a2"), 1, v.id("b1"), 1});
  CHECK(u.ids.size() == 6);
  CHECK(u.segment_spans == std::vector<Span>{{1, 3}, {4, 5}});
  CHECK(u.total_real_tokens == 3);

  const auto missing = encode(sample({{"A", {"a1", "a2"}}, {"B", {}}}), v, schema);
  CHECK(missing.ids == std::vector<std::size_t>{0, v.id("a1"), v.id("a2"), 1, 1});
  CHECK(missing.segment_spans[1] == Span{4, 4});

  const auto reversed = encode(sample({{"B", {"b1"}}, {"A", {"a1", "a2"}}}), v, schema);
  CHECK(reversed == u);
}

TEST_CASE("encode truncates, substitutes UNK and rejects empty samples") {
  const auto schema = ab_schema(2);
  Vocabulary v;
  v.add("a");
  const auto u = encode(sample({{"A", {"a", "q", "a"}}, {"B", {}}}), v, schema);
  CHECK(u.ids == std::vector<std::size_t>{0, 3, Vocabulary::kUnkId, 1, 1});
  CHECK(kind_of([&] { encode(sample({{"A", {}}, {"B", {}}}), v, schema); }) == ErrorKind::DegenerateSample);
}

TEST_CASE("validate rejects unknown and repeated modalities") {
  const auto schema = ab_schema();
  CHECK(kind_of([&] { validate(sample({{"A", {"a"}}, {"C", {"c"}}}), schema); }) == ErrorKind::Schema);
  CHECK(kind_of([&] { validate(sample({{"A", {"a"}}, {"A", {"b"}}}), schema); }) == ErrorKind::Schema);
}

TEST_CASE("unified sequence properties on random samples") {
  const auto schema = testing::schema_of(4, 3);
  const auto vocab = testing::vocab_of(12);
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    auto s = testing::random_sample(schema, 15, rng, 0.3, 6);
    const auto u = encode(s, vocab, schema);
    CHECK(u.ids.size() == u.total_real_tokens + schema.size() + 1);
    CHECK(u.ids.front() == Vocabulary::kClsId);
    const auto canon = canonical_tokens(s, schema);
    std::size_t prev_end = 1;
    for (std::size_t m = 0; m < schema.size(); ++m) {
      const auto sp = u.segment_spans[m];
      CHECK(sp.begin == prev_end);
      CHECK(u.ids[sp.end] == Vocabulary::kSepId);
      prev_end = sp.end + 1;
      REQUIRE(sp.size() == canon[m].size());
      for (std::size_t t = 0; t < sp.size(); ++t) {
        const auto& tok = canon[m][t];
        CHECK(vocab.token(u.ids[sp.begin + t]) == (vocab.contains(tok) ? tok : std::string(Vocabulary::kUnk)));
      }
    }
    auto shuffled = s;
    rng.shuffle(std::span(shuffled.sequences));
    CHECK(encode(shuffled, vocab, schema) == u);
  }
}

TEST_CASE("erase_modality") {
  const auto schema = ab_schema();
  const auto s = sample({{"A", {"a"}}, {"B", {"b"}}});
  const auto e = erase_modality(s, schema, "B");
  CHECK(*e.find("A") == TokenList{"a"});
  CHECK(e.find("B")->empty());
  CHECK(e.id == s.id);
  CHECK(e.label == s.label);
  CHECK(erase_modality(e, schema, "B") == e);
  CHECK(kind_of([&] { erase_modality(s, schema, "Z"); }) == ErrorKind::Schema);

  Vocabulary v;
  v.add("a");
  v.add("b");
  CHECK(encode(e, v, schema) == encode(sample({{"A", {"a"}}}), v, schema));

  const auto three = ModalitySchema({{"A", 4}, {"B", 4}, {"C", 4}}, Task::Binary, 1);
  const auto t = sample({{"A", {"a"}}, {"B", {"b"}}, {"C", {"c"}}});
  CHECK(erase_modality(erase_modality(t, three, "A"), three, "C") ==
        erase_modality(erase_modality(t, three, "C"), three, "A"));
}

TEST_CASE("schema json round trip and validation") {
  const auto schema = ModalitySchema({{"text", 16}, {"ocr", 8}}, Task::Multilabel, 3);
  CHECK(ModalitySchema::from_json(schema.to_json()) == schema);
  CHECK(schema.max_unified_length() == 16 + 8 + 3);
  CHECK(kind_of([] { ModalitySchema({{"a", 1}, {"a", 2}}, Task::Binary, 1); }) == ErrorKind::Schema);
  CHECK(kind_of([] { ModalitySchema({{"a", 0}}, Task::Binary, 1); }) == ErrorKind::Schema);
}

TEST_CASE("jsonl ingestion") {
  testing::TempDir dir("jsonl");
  const auto schema = ModalitySchema({{"A", 4}, {"B", 4}}, Task::Multilabel, 3);
  const auto path = dir.file("d.jsonl");
  testing::write_text(path,
                      "{\"id\":\"1\",\"modalities\":{\"A\":[\"x\"],\"B\":[\"y\"]},\"label\":[0,1,1]}\n"
                      "{\"id\":\"2\",\"modalities\":{\"A\":[\"x\",\"z\"]},\"label\":[1,0,0]}\n"
                      "{\"id\":\"3\",\"modalities\":{\"B\":[\"q\"],\"A\":[]},\"label\":[0,0,0]}\n");
  const auto samples = load_jsonl(path, schema);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].label.values == std::vector<double>{0, 1, 1});
  CHECK(samples[1].find("B") != nullptr);
  CHECK(samples[1].find("B")->empty());
  CHECK(samples[2].sequences.front().first == "B");

  const auto round = dir.file("r.jsonl");
  write_jsonl(round, samples);
  CHECK(load_jsonl(round, schema) == samples);

  testing::write_text(path, "{\"id\":\"1\",\"modalities\":{\"C\":[\"x\"]},\"label\":[0,1,1]}\n");
  CHECK(kind_of([&] { load_jsonl(path, schema); }) == ErrorKind::Schema);
  testing::write_text(path, "{\"id\":\"1\",\"modalities\":{\"A\":[\"x\"]},\"label\":[0,1]}\n");
  CHECK(kind_of([&] { load_jsonl(path, schema); }) == ErrorKind::Label);
  testing::write_text(path, "{\"id\":\"1\",\"modalities\":{\"A\":[\"x\"]},\"label\":[0,2,1]}\n");
  CHECK(kind_of([&] { load_jsonl(path, schema); }) == ErrorKind::Label);
  testing::write_text(path, "{\"id\":\"1\",\"modalities\":{\"A\":[],\"B\":[]},\"label\":[0,1,1]}\n");
  CHECK(kind_of([&] { load_jsonl(path, schema); }) == ErrorKind::DegenerateSample);

  testing::write_text(path, "{\"id\":\"1\",\"modalities\":{\"A\":[\"x\"]},\"label\":[0,1,1]}\nnot json\n");
  try {
    load_jsonl(path, schema);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Ingestion);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK(kind_of([&] { load_jsonl(dir.file("absent.jsonl"), schema); }) == ErrorKind::Io);
}

TEST_CASE("labels validated against task") {
  const auto bin = ModalitySchema({{"A", 4}}, Task::Binary, 1);
  const auto reg = ModalitySchema({{"A", 4}}, Task::Regression, 1);
  CHECK(parse_label(nlohmann::ordered_json(1), bin).values == std::vector<double>{1});
  CHECK(kind_of([&] { parse_label(nlohmann::ordered_json(0.5), bin); }) == ErrorKind::Label);
  CHECK(parse_label(nlohmann::ordered_json(0.25), reg).values == std::vector<double>{0.25});
  CHECK(kind_of([&] { parse_label(nlohmann::ordered_json::array({1, 0}), reg); }) == ErrorKind::Label);
}
