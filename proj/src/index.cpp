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

#include "axiodiag/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "axiodiag/error.hpp"

namespace axiodiag {

struct IndexBuilder {
  static IndexBundle Build(std::span<const Document> docs) {
    IndexBundle out;
    auto& idx = out.index;
    auto& stats = out.stats;
    idx.doc_ids_.reserve(docs.size());
    idx.doc_lengths_.reserve(docs.size());

    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto& doc = docs[d];
      const auto doc_no = static_cast<DocIndex>(d);
      if (!idx.doc_index_.emplace(doc.id, doc_no).second) {
        throw DataError("duplicate document id: " + doc.id);
      }
      idx.doc_ids_.push_back(doc.id);
      idx.doc_lengths_.push_back(doc.tokens.size());

      for (std::size_t pos = 0; pos < doc.tokens.size(); ++pos) {
        const auto& tok = doc.tokens[pos];
        auto [it, fresh] = idx.term_ids_.try_emplace(tok, static_cast<TermId>(idx.terms_.size()));
        if (fresh) {
          idx.terms_.push_back(tok);
          idx.postings_.emplace_back();
        }
        auto& plist = idx.postings_[it->second];
        if (plist.empty() || plist.back().doc != doc_no) {
          plist.push_back(Posting{doc_no, {}});
        }
        plist.back().positions.push_back(static_cast<Position>(pos));
      }
    }

    stats.num_docs_ = docs.size();
    for (TermId t = 0; t < idx.terms_.size(); ++t) {
      CollectionStats::TermStats ts;
      for (const auto& p : idx.postings_[t]) ts.collection_tf += p.tf();
      ts.doc_freq = idx.postings_[t].size();
      stats.total_tokens_ += ts.collection_tf;
      stats.terms_.emplace(idx.terms_[t], ts);
    }
    return out;
  }
};

std::optional<TermId> InvertedIndex::term_id(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const Position> InvertedIndex::positions(TermId term, DocIndex doc) const {
  const auto& plist = postings_[term];
  const auto it = std::lower_bound(plist.begin(), plist.end(), doc,
                                   [](const Posting& p, DocIndex d) { return p.doc < d; });
  if (it == plist.end() || it->doc != doc) return {};
  return it->positions;
}

std::optional<DocIndex> InvertedIndex::doc_index(std::string_view doc_id) const {
  const auto it = doc_index_.find(std::string(doc_id));
  if (it == doc_index_.end()) return std::nullopt;
  return it->second;
}

DocIndex InvertedIndex::require_doc(std::string_view doc_id) const {
  if (const auto d = doc_index(doc_id)) return *d;
  throw DataError("unknown document id: " + std::string(doc_id));
}

const CollectionStats::TermStats* CollectionStats::find(std::string_view term) const {
  const auto it = terms_.find(std::string(term));
  return it == terms_.end() ? nullptr : &it->second;
}

std::uint64_t CollectionStats::collection_tf(std::string_view term) const {
  const auto* ts = find(term);
  return ts ? ts->collection_tf : 0;
}

std::uint64_t CollectionStats::doc_freq(std::string_view term) const {
  const auto* ts = find(term);
  return ts ? ts->doc_freq : 0;
}

double CollectionStats::collection_probability(std::string_view term) const {
  if (total_tokens_ == 0) return 0.0;
  return static_cast<double>(collection_tf(term)) / static_cast<double>(total_tokens_);
}

IndexBundle build_index(std::span<const Document> docs) { return IndexBuilder::Build(docs); }

QueryTermCounts count_query_terms(std::span<const std::string> query_tokens) {
  QueryTermCounts out;
  for (const auto& tok : query_tokens) {
    const auto it = std::find(out.terms.begin(), out.terms.end(), tok);
    if (it == out.terms.end()) {
      out.terms.push_back(tok);
      out.counts.push_back(1);
    } else {
      ++out.counts[static_cast<std::size_t>(it - out.terms.begin())];
    }
  }
  return out;
}

namespace {

// Shared by the indexed and token-based paths so both agree bit for bit.
template <typename TfFn>
double DirichletScore(const QueryTermCounts& qtc, std::size_t doc_length,
                      const CollectionStats& stats, double mu, TfFn&& tf_of) {
  if (!(mu > 0.0)) throw UsageError("mu must be positive");
  const double denom = static_cast<double>(doc_length) + mu;
  double score = 0.0;
  for (std::size_t i = 0; i < qtc.terms.size(); ++i) {
    const double p = stats.collection_probability(qtc.terms[i]);
    if (p == 0.0) continue;
    const double tf = static_cast<double>(tf_of(i));
    score += static_cast<double>(qtc.counts[i]) * std::log((tf + mu * p) / denom);
  }
  return score;
}

}  // namespace

double ql_score(const Query& query, std::string_view doc_id, const InvertedIndex& index,
                const CollectionStats& stats, double mu) {
  const DocIndex doc = index.require_doc(doc_id);
  const auto qtc = count_query_terms(query.tokens);
  return DirichletScore(qtc, index.doc_length(doc), stats, mu, [&](std::size_t i) {
    const auto t = index.term_id(qtc.terms[i]);
    return t ? index.tf(*t, doc) : std::size_t{0};
  });
}

double ql_score_tokens(const Query& query, std::span<const std::string> doc_tokens,
                       const CollectionStats& stats, double mu) {
  const auto qtc = count_query_terms(query.tokens);
  return DirichletScore(qtc, doc_tokens.size(), stats, mu,
                        [&](std::size_t i) { return term_count(qtc.terms[i], doc_tokens); });
}

std::vector<ScoredDoc> retrieve_topk(const Query& query, std::size_t k,
                                     const InvertedIndex& index,
                                     const CollectionStats& stats, double mu) {
  if (k == 0) throw UsageError("k must be at least 1");
  const auto qtc = count_query_terms(query.tokens);

  std::vector<TermId> term_ids(qtc.terms.size(), 0);
  std::vector<bool> present(qtc.terms.size(), false);
  std::vector<DocIndex> candidates;
  for (std::size_t i = 0; i < qtc.terms.size(); ++i) {
    if (const auto t = index.term_id(qtc.terms[i])) {
      term_ids[i] = *t;
      present[i] = true;
      for (const auto& p : index.postings(*t)) candidates.push_back(p.doc);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<ScoredDoc> scored;
  scored.reserve(candidates.size());
  for (const DocIndex doc : candidates) {
    const double s = DirichletScore(qtc, index.doc_length(doc), stats, mu, [&](std::size_t i) {
      return present[i] ? index.tf(term_ids[i], doc) : std::size_t{0};
    });
    scored.push_back(ScoredDoc{index.doc_id(doc), s});
  }
  const auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                    scored.end(), better);
  scored.resize(n);
  return scored;
}

std::optional<std::size_t> min_query_pair_distance(const Query& query,
                                                   std::string_view doc_id,
                                                   const InvertedIndex& index) {
  const DocIndex doc = index.require_doc(doc_id);
  const auto qtc = count_query_terms(query.tokens);

  // Tag every occurrence with its query term and sort by position; the closest
  // pair with distinct tags is always adjacent in that order.
  std::vector<std::pair<Position, std::size_t>> tagged;
  std::size_t distinct_present = 0;
  for (std::size_t i = 0; i < qtc.terms.size(); ++i) {
    const auto t = index.term_id(qtc.terms[i]);
    if (!t) continue;
    const auto pos = index.positions(*t, doc);
    if (pos.empty()) continue;
    ++distinct_present;
    for (const auto p : pos) tagged.emplace_back(p, i);
  }
  if (distinct_present < 2) return std::nullopt;
  std::sort(tagged.begin(), tagged.end());

  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 1; i < tagged.size(); ++i) {
    if (tagged[i].second != tagged[i - 1].second) {
      best = std::min<std::size_t>(best, tagged[i].first - tagged[i - 1].first);
    }
  }
  return best;
}

std::optional<std::size_t> term_pair_distance(std::string_view t1, std::string_view t2,
                                              std::string_view doc_id,
                                              const InvertedIndex& index) {
  const DocIndex doc = index.require_doc(doc_id);
  const auto id1 = index.term_id(t1);
  const auto id2 = index.term_id(t2);
  if (!id1 || !id2) return std::nullopt;
  const auto a = index.positions(*id1, doc);
  const auto b = index.positions(*id2, doc);
  if (a.empty() || b.empty()) return std::nullopt;

  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      best = std::min<std::size_t>(best, b[j] - a[i]);
      ++i;
    } else {
      best = std::min<std::size_t>(best, a[i] - b[j]);
      ++j;
    }
  }
  return best;
}

}  // namespace axiodiag
