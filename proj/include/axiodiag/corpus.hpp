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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace axiodiag {

using Tokens = std::vector<std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  std::size_t max_doc_tokens = 512;
};

/// Splits on Unicode whitespace, optionally strips edge punctuation and
/// folds ASCII case, then truncates to `cfg.max_doc_tokens`.
///
/// Edge stripping removes ASCII punctuation from both ends of a token with
/// two exceptions: '_' is a word character, and a bracket is kept when it is
/// balanced inside the token ("a(n)" survives, ")what" becomes "what").
/// Tokens that become empty are dropped. The function is idempotent on its
/// own output.
Tokens tokenize(std::string_view text, const TokenizerConfig& cfg);

/// Space-joined token text, the canonical "text" of a tokenized item.
std::string join_tokens(std::span<const std::string> tokens);

struct Document {
  std::string id;
  Tokens tokens;

  std::size_t length() const { return tokens.size(); }
};

struct Query {
  std::string id;
  Tokens tokens;
};

/// c(w, D).
std::size_t term_count(std::string_view term, const Document& doc);
std::size_t term_count(std::string_view term, std::span<const std::string> tokens);

/// ln(N / df), with df = 0 treated as df = 0.5.
double idf(std::size_t num_docs, std::size_t doc_freq);

/// Immutable document collection with id lookup.
class Corpus {
 public:
  Corpus() = default;
  /// Throws a data error naming the first duplicate or empty id.
  explicit Corpus(std::vector<Document> docs);

  std::span<const Document> documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  const Document* find(std::string_view id) const;
  /// Throws a data error naming `id` when absent.
  const Document& at(std::string_view id) const;

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

class QuerySet {
 public:
  QuerySet() = default;
  explicit QuerySet(std::vector<Query> queries);

  std::span<const Query> queries() const { return queries_; }
  std::size_t size() const { return queries_.size(); }
  const Query* find(std::string_view id) const;
  const Query& at(std::string_view id) const;

 private:
  std::vector<Query> queries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct QrelEntry {
  std::string query_id;
  std::string doc_id;
  int grade = 0;
};

/// Relevance judgments keyed by query, then document.
class Qrels {
 public:
  using Judgments = std::map<std::string, int, std::less<>>;

  Qrels() = default;
  explicit Qrels(std::span<const QrelEntry> entries);

  /// 0 for unjudged pairs.
  int grade(std::string_view query_id, std::string_view doc_id) const;
  bool is_relevant(std::string_view query_id, std::string_view doc_id) const {
    return grade(query_id, doc_id) > 0;
  }
  /// Judgments for one query; empty when the query is unjudged.
  const Judgments& judgments(std::string_view query_id) const;
  /// Relevant doc ids of a query in ascending id order.
  std::vector<std::string> relevant(std::string_view query_id) const;
  const std::map<std::string, Judgments, std::less<>>& all() const { return by_query_; }

 private:
  std::map<std::string, Judgments, std::less<>> by_query_;
};

struct QuerySplit {
  std::vector<Query> dev;
  std::vector<Query> test;
};

/// Seeded shuffle, first round(dev_fraction * n) go to dev. Both halves keep
/// the input order. Platform-independent for a fixed seed.
QuerySplit split_queries(std::span<const Query> queries, std::uint64_t seed,
                         double dev_fraction);

// File formats: `id \t text` for corpus and queries, `qid 0 docid grade` for
// qrels.
Corpus load_corpus(const std::filesystem::path& path, const TokenizerConfig& cfg);
QuerySet load_queries(const std::filesystem::path& path, const TokenizerConfig& cfg);
Qrels load_qrels(const std::filesystem::path& path);

void write_corpus(const std::filesystem::path& path, std::span<const Document> docs);
void write_queries(const std::filesystem::path& path, std::span<const Query> queries);

}  // namespace axiodiag
