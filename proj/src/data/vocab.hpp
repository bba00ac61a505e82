// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seqset::data {

struct SequenceSet;

// Token <-> id bijection. Ids 0, 1, 2 are always [C], [S], [UNK].
class Vocabulary {
 public:
  static constexpr std::size_t kClsId = 0;
  static constexpr std::size_t kSepId = 1;
  static constexpr std::size_t kUnkId = 2;
  static constexpr std::string_view kCls = "[C]";
  static constexpr std::string_view kSep = "[S]";
  static constexpr std::string_view kUnk = "[UNK]";

  Vocabulary();
  // tokens must start with the three specials in id order.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // Returns the existing id when already registered.
  std::size_t add(const std::string& token);
  bool contains(std::string_view token) const;
  // Unregistered tokens map to kUnkId.
  std::size_t id(std::string_view token) const;
  const std::string& token(std::size_t id) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

// Tokens at or above min_count, ordered by descending frequency then
// lexicographically, after the specials.
Vocabulary build_vocab(std::span<const SequenceSet> corpus, std::size_t min_count);

}  // namespace seqset::data
