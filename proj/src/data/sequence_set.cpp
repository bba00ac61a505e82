// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "data/sequence_set.hpp"

#include <algorithm>

#include "error.hpp"

namespace seqset::data {

const TokenList* SequenceSet::find(std::string_view modality) const {
  for (const auto& [name, tokens] : sequences) {
    if (name == modality) return &tokens;
  }
  return nullptr;
}

void validate(const SequenceSet& sample, const ModalitySchema& schema) {
  std::vector<bool> seen(schema.size(), false);
  for (const auto& [name, tokens] : sample.sequences) {
    const auto m = schema.index_of(name);
    if (!m) fail(ErrorKind::Schema, "sample '" + sample.id + "' has unknown modality '" + name + "'");
    if (seen[*m]) fail(ErrorKind::Schema, "sample '" + sample.id + "' repeats modality '" + name + "'");
    seen[*m] = true;
  }
}

std::vector<TokenList> canonical_tokens(const SequenceSet& sample, const ModalitySchema& schema) {
  validate(sample, schema);
  std::vector<TokenList> out(schema.size());
  for (std::size_t m = 0; m < schema.size(); ++m) {
    if (const auto* tokens = sample.find(schema.name(m))) {
      const auto n = std::min(tokens->size(), schema.max_len(m));
      out[m].assign(tokens->begin(), tokens->begin() + static_cast<std::ptrdiff_t>(n));
    }
  }
  return out;
}

UnifiedSequence encode(const SequenceSet& sample, const Vocabulary& vocab, const ModalitySchema& schema) {
  const auto blocks = canonical_tokens(sample, schema);
  UnifiedSequence u;
  u.ids.push_back(Vocabulary::kClsId);
  for (const auto& block : blocks) {
    Span span{u.ids.size(), u.ids.size()};
    for (const auto& token : block) u.ids.push_back(vocab.id(token));
    span.end = u.ids.size();
    u.segment_spans.push_back(span);
    u.total_real_tokens += span.size();
    u.ids.push_back(Vocabulary::kSepId);
  }
  if (u.total_real_tokens == 0) {
    fail(ErrorKind::DegenerateSample, "sample '" + sample.id + "' has no tokens in any modality");
  }
  return u;
}

SequenceSet erase_modality(const SequenceSet& sample, const ModalitySchema& schema, std::string_view modality) {
  if (!schema.index_of(modality)) {
    fail(ErrorKind::Schema, "cannot erase unregistered modality '" + std::string(modality) + "'");
  }
  SequenceSet out = sample;
  bool found = false;
  for (auto& [name, tokens] : out.sequences) {
    if (name == modality) {
      tokens.clear();
      found = true;
    }
  }
  if (!found) out.sequences.emplace_back(std::string(modality), TokenList{});
  return out;
}

}  // namespace seqset::data
