// Copyright 2026 The axiodiag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "axiodiag/corpus.hpp"

namespace axiodiag {

using TermId = std::uint32_t;
using DocIndex = std::uint32_t;
using Position = std::uint32_t;

struct Posting {
  DocIndex doc = 0;
  std::vector<Position> positions;  // strictly increasing

  std::size_t tf() const { return positions.size(); }
};

/// Positional inverted index. Documents are numbered in corpus order.
class InvertedIndex {
 public:
  std::optional<TermId> term_id(std::string_view term) const;
  const std::string& term(TermId id) const { return terms_[id]; }
  std::size_t num_terms() const { return terms_.size(); }

  /// Postings sorted by document index.
  std::span<const Posting> postings(TermId id) const { return postings_[id]; }
  /// Positions of `term` in `doc`, empty if absent.
  std::span<const Position> positions(TermId term, DocIndex doc) const;
  std::size_t tf(TermId term, DocIndex doc) const { return positions(term, doc).size(); }

  std::size_t num_docs() const { return doc_ids_.size(); }
  std::optional<DocIndex> doc_index(std::string_view doc_id) const;
  /// Throws a data error naming `doc_id` when absent.
  DocIndex require_doc(std::string_view doc_id) const;
  const std::string& doc_id(DocIndex doc) const { return doc_ids_[doc]; }
  std::size_t doc_length(DocIndex doc) const { return doc_lengths_[doc]; }

 private:
  friend struct IndexBuilder;

  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, DocIndex> doc_index_;
  std::vector<std::size_t> doc_lengths_;
};

/// Collection-level counts used by smoothing and IDF.
class CollectionStats {
 public:
  struct TermStats {
    std::uint64_t collection_tf = 0;
    std::uint64_t doc_freq = 0;
  };

  std::uint64_t total_tokens() const { return total_tokens_; }
  std::size_t num_docs() const { return num_docs_; }
  std::uint64_t collection_tf(std::string_view term) const;
  std::uint64_t doc_freq(std::string_view term) const;
  /// p(w|C) = collection_tf / total_tokens; 0 for an empty collection.
  double collection_probability(std::string_view term) const;
  const std::unordered_map<std::string, TermStats>& terms() const { return terms_; }

 private:
  friend struct IndexBuilder;

  const TermStats* find(std::string_view term) const;

  std::uint64_t total_tokens_ = 0;
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, TermStats> terms_;
};

struct IndexBundle {
  InvertedIndex index;
  CollectionStats stats;
};

/// Throws a data error naming a duplicate doc id.
IndexBundle build_index(std::span<const Document> docs);

/// Distinct query terms in first-occurrence order with their multiplicity
/// c(q, Q).
struct QueryTermCounts {
  std::vector<std::string> terms;
  std::vector<std::size_t> counts;
};
QueryTermCounts count_query_terms(std::span<const std::string> query_tokens);

/// Dirichlet-smoothed query likelihood,
///   sum_q c(q,Q) * ln((c(q,D) + mu p(q|C)) / (|D| + mu)),
/// skipping query terms with zero collection frequency.
double ql_score(const Query& query, std::string_view doc_id, const InvertedIndex& index,
                const CollectionStats& stats, double mu);

/// Same formula for a document given by its tokens (not necessarily indexed).
double ql_score_tokens(const Query& query, std::span<const std::string> doc_tokens,
                       const CollectionStats& stats, double mu);

struct ScoredDoc {
  std::string doc_id;
  double score = 0.0;
};

/// Top-k documents matching at least one query term, descending score, ties
/// by ascending doc id.
std::vector<ScoredDoc> retrieve_topk(const Query& query, std::size_t k,
                                     const InvertedIndex& index,
                                     const CollectionStats& stats, double mu);

/// Minimum |pos(q1) - pos(q2)| over occurrences of distinct query terms;
/// nullopt when fewer than two distinct query terms occur in the document.
std::optional<std::size_t> min_query_pair_distance(const Query& query,
                                                   std::string_view doc_id,
                                                   const InvertedIndex& index);

/// Dis(q1, q2; D) for two terms; nullopt if either is absent.
std::optional<std::size_t> term_pair_distance(std::string_view t1, std::string_view t2,
                                              std::string_view doc_id,
                                              const InvertedIndex& index);

}  // namespace axiodiag
