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

#include "axiodiag/axioms.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>

namespace axiodiag {

namespace {

struct NameEntry {
  AxiomId id;
  std::string_view name;
};

constexpr std::array<NameEntry, 9> kNames = {{
    {AxiomId::kTFC1, "TFC1"},
    {AxiomId::kTFC2, "TFC2"},
    {AxiomId::kMTDC, "MTDC"},
    {AxiomId::kLNC1, "LNC1"},
    {AxiomId::kLNC2, "LNC2"},
    {AxiomId::kTP, "TP"},
    {AxiomId::kSTMC1, "STMC1"},
    {AxiomId::kSTMC2, "STMC2"},
    {AxiomId::kSTMC3, "STMC3"},
}};

std::vector<std::size_t> QueryTermCountsIn(const QueryTermCounts& qtc,
                                           std::span<const std::string> doc) {
  std::vector<std::size_t> out;
  out.reserve(qtc.terms.size());
  for (const auto& t : qtc.terms) out.push_back(term_count(t, doc));
  return out;
}

std::size_t Sum(std::span<const std::size_t> v) {
  return std::accumulate(v.begin(), v.end(), std::size_t{0});
}

std::size_t Cover(std::span<const std::size_t> v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](auto c) { return c > 0; }));
}

std::size_t LengthGap(const Document& a, const Document& b) {
  return a.length() > b.length() ? a.length() - b.length() : b.length() - a.length();
}

// Kuhn's augmenting path step for the M-TDC swap matching.
bool Augment(std::size_t u, const std::vector<std::vector<std::size_t>>& adj,
             std::vector<bool>& seen, std::vector<std::ptrdiff_t>& match_right) {
  for (const auto v : adj[u]) {
    if (seen[v]) continue;
    seen[v] = true;
    if (match_right[v] < 0 ||
        Augment(static_cast<std::size_t>(match_right[v]), adj, seen, match_right)) {
      match_right[v] = static_cast<std::ptrdiff_t>(u);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view axiom_name(AxiomId axiom) {
  for (const auto& e : kNames) {
    if (e.id == axiom) return e.name;
  }
  return "?";
}

std::optional<AxiomId> parse_axiom(std::string_view name) {
  std::string upper;
  for (const char c : name) {
    if (c == '-') continue;
    upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  for (const auto& e : kNames) {
    if (e.name == upper) return e.id;
  }
  return std::nullopt;
}

bool is_strict(AxiomId axiom) {
  switch (axiom) {
    case AxiomId::kTFC1:
    case AxiomId::kTFC2:
    case AxiomId::kTP:
    case AxiomId::kSTMC1:
    case AxiomId::kSTMC3:
      return true;
    default:
      return false;
  }
}

std::size_t arity(AxiomId axiom) { return axiom == AxiomId::kTFC2 ? 3 : 2; }

bool needs_embeddings(AxiomId axiom) {
  return axiom == AxiomId::kSTMC1 || axiom == AxiomId::kSTMC2 || axiom == AxiomId::kSTMC3;
}

void AxiomParams::validate() const {
  if (!(delta_sim >= 0.0 && delta_sim <= 1.0)) throw UsageError("delta_sim must lie in [0, 1]");
  if (!(stmc3_delta_len >= 0.0)) throw UsageError("stmc3_delta_len must be non-negative");
  if (max_tokens < 2) throw UsageError("max_tokens must be at least 2");
  if (!(epsilon >= 0.0)) throw UsageError("epsilon must be non-negative");
}

IdfFn collection_idf(const CollectionStats& stats) {
  return [&stats](std::string_view term) {
    return idf(stats.num_docs(), static_cast<std::size_t>(stats.doc_freq(term)));
  };
}

Tokens non_query_tokens(const Query& q, std::span<const std::string> doc) {
  Tokens out;
  for (const auto& t : doc) {
    if (std::find(q.tokens.begin(), q.tokens.end(), t) == q.tokens.end()) out.push_back(t);
  }
  return out;
}

bool tfc1_eligible(const Query& q, const Document& d1, const Document& d2,
                   const AxiomParams& params) {
  if (LengthGap(d1, d2) > params.delta_len) return false;
  const auto qtc = count_query_terms(q.tokens);
  const auto c1 = QueryTermCountsIn(qtc, d1.tokens);
  const auto c2 = QueryTermCountsIn(qtc, d2.tokens);
  for (std::size_t i = 0; i < c1.size(); ++i) {
    if (c1[i] < c2[i]) return false;
  }
  return Sum(c1) > Sum(c2);
}

bool tfc2_eligible(const Query& q, const Document& d1, const Document& d2,
                   const Document& d3, const AxiomParams& params) {
  if (LengthGap(d1, d2) > params.delta_len || LengthGap(d1, d3) > params.delta_len ||
      LengthGap(d2, d3) > params.delta_len) {
    return false;
  }
  const auto qtc = count_query_terms(q.tokens);
  const auto c1 = QueryTermCountsIn(qtc, d1.tokens);
  const auto c2 = QueryTermCountsIn(qtc, d2.tokens);
  const auto c3 = QueryTermCountsIn(qtc, d3.tokens);
  const auto s1 = Sum(c1), s2 = Sum(c2), s3 = Sum(c3);
  if (!(s3 > s2 && s2 > s1 && s1 > 0)) return false;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    // c2 - c1 == c3 - c2 without unsigned underflow.
    if (c2[i] + c2[i] != c1[i] + c3[i]) return false;
  }
  return true;
}

bool swaps_cover_differences(std::span<const std::size_t> counts1,
                             std::span<const std::size_t> counts2,
                             std::span<const double> idfs,
                             std::span<const std::size_t> query_counts) {
  std::vector<std::size_t> surplus, deficit;
  for (std::size_t i = 0; i < counts1.size(); ++i) {
    if (counts1[i] > counts2[i]) surplus.push_back(i);
    if (counts1[i] < counts2[i]) deficit.push_back(i);
  }
  if (surplus.empty() && deficit.empty()) return false;
  if (surplus.size() != deficit.size()) return false;

  std::vector<std::vector<std::size_t>> adj(surplus.size());
  for (std::size_t a = 0; a < surplus.size(); ++a) {
    const auto i = surplus[a];
    for (std::size_t b = 0; b < deficit.size(); ++b) {
      const auto j = deficit[b];
      if (counts1[i] == counts2[j] && counts1[j] == counts2[i] && idfs[i] >= idfs[j] &&
          query_counts[i] >= query_counts[j]) {
        adj[a].push_back(b);
      }
    }
    if (adj[a].empty()) return false;
  }
  std::vector<std::ptrdiff_t> match_right(deficit.size(), -1);
  for (std::size_t a = 0; a < surplus.size(); ++a) {
    std::vector<bool> seen(deficit.size(), false);
    if (!Augment(a, adj, seen, match_right)) return false;
  }
  return true;
}

bool mtdc_eligible(const Query& q, const Document& d1, const Document& d2, const IdfFn& idf_fn,
                   const AxiomParams& params) {
  if (LengthGap(d1, d2) > params.delta_len) return false;
  const auto qtc = count_query_terms(q.tokens);
  const auto c1 = QueryTermCountsIn(qtc, d1.tokens);
  const auto c2 = QueryTermCountsIn(qtc, d2.tokens);
  std::vector<double> idfs;
  idfs.reserve(qtc.terms.size());
  for (const auto& t : qtc.terms) idfs.push_back(idf_fn(t));
  return swaps_cover_differences(c1, c2, idfs, qtc.counts);
}

bool lnc1_eligible(const Query& q, const Document& d1, const Document& d2) {
  const auto qtc = count_query_terms(q.tokens);
  for (const auto& t : qtc.terms) {
    if (term_count(t, d1) != term_count(t, d2)) return false;
  }
  for (const auto& t : d2.tokens) {
    if (std::find(q.tokens.begin(), q.tokens.end(), t) != q.tokens.end()) continue;
    if (term_count(t, d2) == term_count(t, d1) + 1) return true;
  }
  return false;
}

std::string lnc2_generated_id(std::string_view source_id, std::size_t k) {
  return std::string(source_id) + "#dup" + std::to_string(k);
}

std::optional<Lnc2Duplicate> lnc2_generate(const Document& doc, const AxiomParams& params) {
  if (doc.length() == 0) return std::nullopt;
  const std::size_t k = params.max_tokens / doc.length();
  if (k < 2) return std::nullopt;
  Lnc2Duplicate out;
  out.k = k;
  out.doc.id = lnc2_generated_id(doc.id, k);
  out.doc.tokens.reserve(k * doc.length());
  for (std::size_t i = 0; i < k; ++i) {
    out.doc.tokens.insert(out.doc.tokens.end(), doc.tokens.begin(), doc.tokens.end());
  }
  return out;
}

bool tp_eligible(const Query& q, std::string_view d1, std::string_view d2,
                 const InvertedIndex& index) {
  const auto g1 = min_query_pair_distance(q, d1, index);
  const auto g2 = min_query_pair_distance(q, d2, index);
  return g1 && g2 && *g1 < *g2;
}

bool stmc1_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& /*params*/) {
  const auto qtc = count_query_terms(q.tokens);
  if (Cover(QueryTermCountsIn(qtc, d1.tokens)) != Cover(QueryTermCountsIn(qtc, d2.tokens))) {
    return false;
  }
  const auto s1 = sigma_prime<double>(non_query_tokens(q, d1.tokens), q.tokens, table);
  const auto s2 = sigma_prime<double>(non_query_tokens(q, d2.tokens), q.tokens, table);
  return s1 && s2 && *s1 > *s2;
}

bool stmc2_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& params) {
  const auto qtc = count_query_terms(q.tokens);
  const auto rem1 = non_query_tokens(q, d1.tokens);
  const auto rem2 = non_query_tokens(q, d2.tokens);
  const auto qmass1 = Sum(QueryTermCountsIn(qtc, d1.tokens));
  if (!(rem2.size() > qmass1 && qmass1 > 0)) return false;
  const auto s = sigma_prime<double>(rem1, rem2, table);
  return s && *s > params.delta_sim;
}

bool stmc3_eligible(const Query& q, const Document& d1, const Document& d2,
                    const EmbeddingTable& table, const AxiomParams& params) {
  const double gap = static_cast<double>(LengthGap(d1, d2));
  if (gap > params.stmc3_delta_len) return false;
  const auto qtc = count_query_terms(q.tokens);
  const auto c1 = QueryTermCountsIn(qtc, d1.tokens);
  const auto c2 = QueryTermCountsIn(qtc, d2.tokens);
  if (Cover(c1) != Cover(c2) || !(Sum(c1) > Sum(c2))) return false;
  const auto s1 = sigma_prime<double>(non_query_tokens(q, d1.tokens), q.tokens, table);
  const auto s2 = sigma_prime<double>(non_query_tokens(q, d2.tokens), q.tokens, table);
  return s1 && s2 && *s2 > *s1;
}

bool check_fulfilment(const DiagnosticInstance& inst, const ScoreTable& scores,
                      const AxiomParams& params) {
  if (inst.doc_ids.size() != arity(inst.axiom)) {
    throw DataError(std::string(axiom_name(inst.axiom)) + " instance for " + inst.query_id +
                    " has " + std::to_string(inst.doc_ids.size()) + " documents");
  }
  const double eps = params.epsilon;
  if (inst.axiom == AxiomId::kTFC2) {
    const double s1 = scores.at(inst.query_id, inst.doc_ids[0]);
    const double s2 = scores.at(inst.query_id, inst.doc_ids[1]);
    const double s3 = scores.at(inst.query_id, inst.doc_ids[2]);
    return (s2 - s1) > (s3 - s2) + eps;
  }
  const double s0 = scores.at(inst.query_id, inst.doc_ids[0]);
  const double s1 = scores.at(inst.query_id, inst.doc_ids[1]);
  return is_strict(inst.axiom) ? s0 > s1 + eps : s0 >= s1 - eps;
}

}  // namespace axiodiag
