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

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axiodiag/corpus.hpp"
#include "axiodiag/embeddings.hpp"
#include "axiodiag/index.hpp"
#include "axiodiag/score_table.hpp"

namespace axiodiag {

enum class AxiomId { kTFC1, kTFC2, kMTDC, kLNC1, kLNC2, kTP, kSTMC1, kSTMC2, kSTMC3 };

inline constexpr std::array<AxiomId, 9> kAllAxioms = {
    AxiomId::kTFC1, AxiomId::kTFC2, AxiomId::kMTDC,  AxiomId::kLNC1,  AxiomId::kLNC2,
    AxiomId::kTP,   AxiomId::kSTMC1, AxiomId::kSTMC2, AxiomId::kSTMC3,
};

std::string_view axiom_name(AxiomId axiom);
/// Accepts the names produced by axiom_name, case-insensitively, and "M-TDC".
std::optional<AxiomId> parse_axiom(std::string_view name);

/// Strict axioms expect S0 > S1; the others S0 >= S1. TFC2 compares gains.
bool is_strict(AxiomId axiom);
std::size_t arity(AxiomId axiom);
bool needs_embeddings(AxiomId axiom);

struct AxiomParams {
  /// Length gap for TFC1, TFC2 and M-TDC.
  std::size_t delta_len = 10;
  /// sigma' threshold for STMC2.
  double delta_sim = 0.2;
  /// Length gap for STMC3, kept separate so the 0.2 reading can be run.
  double stmc3_delta_len = 10.0;
  /// Cap on LNC2 duplicated document length.
  std::size_t max_tokens = 512;
  /// Score tolerance in fulfilment checks.
  double epsilon = 1e-9;

  /// Throws a usage error on out-of-range values.
  void validate() const;
};

/// An axiom instance. doc_ids[0] is the document the axiom prefers; for TFC2
/// the order is [D1, D2, D3] by increasing query-term mass.
struct DiagnosticInstance {
  AxiomId axiom = AxiomId::kTFC1;
  std::string query_id;
  std::vector<std::string> doc_ids;
  /// LNC2 only: tokens of generated documents keyed by their id.
  std::map<std::string, Tokens> generated_docs;

  friend bool operator==(const DiagnosticInstance&, const DiagnosticInstance&) = default;
  friend auto operator<=>(const DiagnosticInstance& a, const DiagnosticInstance& b) {
    if (auto c = a.query_id <=> b.query_id; c != 0) return c;
    if (auto c = a.doc_ids <=> b.doc_ids; c != 0) return c;
    return a.axiom <=> b.axiom;
  }
};

using IdfFn = std::function<double(std::string_view)>;

/// IDF computed from whole-collection document frequencies.
IdfFn collection_idf(const CollectionStats& stats);

bool tfc1_eligible(const Query& q, const Document& d1, const Document& d2,
                   const AxiomParams& params);
bool tfc2_eligible(const Query& q, const Document& d1, const Document& d2,
                   const Document& d3, const AxiomParams& params);
bool mtdc_eligible(const Query& q, const Document& d1, const Document& d2, const IdfFn& idf_fn,
                   const AxiomParams& params);
bool lnc1_eligible(const Query& q, const Document& d1, const Document& d2);

struct Lnc2Duplicate {
  Document doc;
  std::size_t k = 0;
};
/// `doc` repeated floor(max_tokens / |D|) times when that factor is at least 2.
std::optional<Lnc2Duplicate> lnc2_generate(const Document& doc, const AxiomParams& params);
/// Id of the k-fold duplicate of `source_id`: `source_id#dupK`.
std::string lnc2_generated_id(std::string_view source_id, std::size_t k);

bool tp_eligible(const Query& q, std::string_view d1, std::string_view d2,
                 const InvertedIndex& index);
bool stmc1_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& params);
bool stmc2_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& params);
bool stmc3_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& params);

/// Tokens of `doc` that are not query terms, in document order.
Tokens non_query_tokens(const Query& q, std::span<const std::string> doc);

/// M-TDC swap condition over per-query-term counts. Every term whose counts
/// differ must be paired with another term holding the mirrored counts, the
/// D1-surplus side having idf >= and query count >= its partner. Requires at
/// least one differing term.
bool swaps_cover_differences(std::span<const std::size_t> counts1,
                             std::span<const std::size_t> counts2,
                             std::span<const double> idfs,
                             std::span<const std::size_t> query_counts);

/// Whether `scores` orders the instance as its axiom dictates. Throws a data
/// error naming the missing (query_id, doc_id).
bool check_fulfilment(const DiagnosticInstance& inst, const ScoreTable& scores,
                      const AxiomParams& params);

}  // namespace axiodiag
