// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "data/vocab.hpp"

#include <algorithm>
#include <map>

#include "data/sequence_set.hpp"
#include "error.hpp"

namespace seqset::data {

Vocabulary::Vocabulary() {
  add(std::string(kCls));
  add(std::string(kSep));
  add(std::string(kUnk));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  if (tokens.size() < 3 || tokens[kClsId] != kCls || tokens[kSepId] != kSep || tokens[kUnkId] != kUnk) {
    fail(ErrorKind::Config, "vocabulary must begin with [C], [S], [UNK]");
  }
  Vocabulary v;
  for (std::size_t i = 3; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) fail(ErrorKind::Config, "duplicate vocabulary token '" + tokens[i] + "'");
    v.add(tokens[i]);
  }
  return v;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.find(std::string(token)) != ids_.end(); }

std::size_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(std::size_t id) const {
  if (id >= tokens_.size()) fail(ErrorKind::Lookup, "token id " + std::to_string(id) + " not in vocabulary");
  return tokens_[id];
}

Vocabulary build_vocab(std::span<const SequenceSet> corpus, std::size_t min_count) {
  if (min_count < 1) fail(ErrorKind::Config, "min_count must be at least 1");
  if (corpus.empty()) fail(ErrorKind::Ingestion, "cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& sample : corpus)
    for (const auto& [name, tokens] : sample.sequences)
      for (const auto& t : tokens) ++counts[t];

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [token, n] : counts) {
    if (n >= min_count && token != Vocabulary::kCls && token != Vocabulary::kSep && token != Vocabulary::kUnk) {
      ranked.emplace_back(token, n);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary vocab;
  for (const auto& [token, n] : ranked) vocab.add(token);
  return vocab;
}

}  // namespace seqset::data
