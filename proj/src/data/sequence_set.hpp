// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "data/schema.hpp"
#include "data/vocab.hpp"

namespace seqset::data {

// Multi-hot over K classes, a single 0/1 class, or one real target.
struct Label {
  Task task = Task::Binary;
  std::vector<double> values;

  bool operator==(const Label&) const = default;
};

using TokenList = std::vector<std::string>;

// One sample. Modalities keep the order they were supplied in; canonical order
// is imposed by encode(), so callers can verify order invariance directly.
struct SequenceSet {
  std::string id;
  std::vector<std::pair<std::string, TokenList>> sequences;
  Label label;

  const TokenList* find(std::string_view modality) const;
  bool operator==(const SequenceSet&) const = default;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool operator==(const Span&) const = default;
};

// [C] m1 tokens [S] m2 tokens [S] ... [S]; spans cover real tokens only.
struct UnifiedSequence {
  std::vector<std::size_t> ids;
  std::vector<Span> segment_spans;
  std::size_t total_real_tokens = 0;

  bool operator==(const UnifiedSequence&) const = default;
};

// Throws a schema error for keys outside the schema or repeated keys.
void validate(const SequenceSet& sample, const ModalitySchema& schema);

// Per-modality token lists in canonical order, truncated to each max_len prefix.
std::vector<TokenList> canonical_tokens(const SequenceSet& sample, const ModalitySchema& schema);

UnifiedSequence encode(const SequenceSet& sample, const Vocabulary& vocab, const ModalitySchema& schema);

// Copy of sample with the named modality replaced by the empty list.
SequenceSet erase_modality(const SequenceSet& sample, const ModalitySchema& schema, std::string_view modality);

}  // namespace seqset::data
