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

#include "axiodiag/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "axiodiag/error.hpp"

namespace axiodiag {

namespace {

// Length in bytes of the whitespace code point starting at `pos`, 0 if the
// code point there is not whitespace.
std::size_t WhitespaceAt(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    return (b0 == ' ' || (b0 >= '\t' && b0 <= '\r')) ? 1 : 0;
  }
  auto byte = [&](std::size_t i) -> unsigned {
    return pos + i < s.size() ? static_cast<unsigned char>(s[pos + i]) : 0u;
  };
  if (b0 == 0xC2) {
    // U+0085 NEL, U+00A0 NBSP
    return (byte(1) == 0x85 || byte(1) == 0xA0) ? 2 : 0;
  }
  if (b0 == 0xE1) {
    // U+1680 OGHAM SPACE MARK
    return (byte(1) == 0x9A && byte(2) == 0x80) ? 3 : 0;
  }
  if (b0 == 0xE2) {
    const unsigned b1 = byte(1), b2 = byte(2);
    if (b1 == 0x80 && ((b2 >= 0x80 && b2 <= 0x8A) || b2 == 0xA8 || b2 == 0xA9 || b2 == 0xAF)) {
      return 3;  // U+2000..U+200A, U+2028, U+2029, U+202F
    }
    if (b1 == 0x81 && b2 == 0x9F) return 3;  // U+205F
    return 0;
  }
  if (b0 == 0xE3) {
    return (byte(1) == 0x80 && byte(2) == 0x80) ? 3 : 0;  // U+3000
  }
  return 0;
}

bool IsStrippable(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) && c != '_';
}

char Partner(char c) {
  switch (c) {
    case '(': return ')';
    case ')': return '(';
    case '[': return ']';
    case ']': return '[';
    case '{': return '}';
    case '}': return '{';
    default: return '\0';
  }
}

bool IsOpener(char c) { return c == '(' || c == '[' || c == '{'; }
bool IsCloser(char c) { return c == ')' || c == ']' || c == '}'; }

std::string_view StripEdges(std::string_view tok) {
  while (!tok.empty()) {
    bool changed = false;
    const char front = tok.front();
    if (IsStrippable(front)) {
      bool keep = false;
      if (IsOpener(front)) {
        const auto opens = std::count(tok.begin(), tok.end(), front);
        const auto closes = std::count(tok.begin(), tok.end(), Partner(front));
        keep = opens <= closes;
      }
      if (!keep) {
        tok.remove_prefix(1);
        changed = true;
      }
    }
    if (tok.empty()) break;
    const char back = tok.back();
    if (IsStrippable(back)) {
      bool keep = false;
      if (IsCloser(back)) {
        const auto closes = std::count(tok.begin(), tok.end(), back);
        const auto opens = std::count(tok.begin(), tok.end(), Partner(back));
        keep = closes <= opens;
      }
      if (!keep) {
        tok.remove_suffix(1);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return tok;
}

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void ChompCarriageReturn(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Reads `id \t text` lines.
template <typename Fn>
void ForEachIdText(const std::filesystem::path& path, Fn&& fn) {
  auto in = OpenInput(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ChompCarriageReturn(line);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected `id<TAB>text`");
    }
    fn(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1), lineno);
  }
}

}  // namespace

Tokens tokenize(std::string_view text, const TokenizerConfig& cfg) {
  Tokens out;
  std::size_t pos = 0;
  while (pos < text.size() && out.size() < cfg.max_doc_tokens) {
    if (const auto ws = WhitespaceAt(text, pos)) {
      pos += ws;
      continue;
    }
    const std::size_t start = pos;
    while (pos < text.size() && WhitespaceAt(text, pos) == 0) ++pos;
    std::string_view tok = text.substr(start, pos - start);
    if (cfg.strip_punctuation) tok = StripEdges(tok);
    if (tok.empty()) continue;
    std::string t(tok);
    if (cfg.lowercase) {
      for (auto& c : t) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::size_t term_count(std::string_view term, std::span<const std::string> tokens) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), term));
}

std::size_t term_count(std::string_view term, const Document& doc) {
  return term_count(term, std::span<const std::string>(doc.tokens));
}

double idf(std::size_t num_docs, std::size_t doc_freq) {
  const double df = doc_freq == 0 ? 0.5 : static_cast<double>(doc_freq);
  return std::log(static_cast<double>(num_docs) / df);
}

Corpus::Corpus(std::vector<Document> docs) : docs_(std::move(docs)) {
  by_id_.reserve(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (docs_[i].id.empty()) throw DataError("document with empty id");
    if (!by_id_.emplace(docs_[i].id, i).second) {
      throw DataError("duplicate document id: " + docs_[i].id);
    }
  }
}

const Document* Corpus::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

const Document& Corpus::at(std::string_view id) const {
  if (const auto* d = find(id)) return *d;
  throw DataError("unknown document id: " + std::string(id));
}

QuerySet::QuerySet(std::vector<Query> queries) : queries_(std::move(queries)) {
  by_id_.reserve(queries_.size());
  for (std::size_t i = 0; i < queries_.size(); ++i) {
    if (queries_[i].id.empty()) throw DataError("query with empty id");
    if (queries_[i].tokens.empty()) {
      throw DataError("query has no tokens: " + queries_[i].id);
    }
    if (!by_id_.emplace(queries_[i].id, i).second) {
      throw DataError("duplicate query id: " + queries_[i].id);
    }
  }
}

const Query* QuerySet::find(std::string_view id) const {
  const auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &queries_[it->second];
}

const Query& QuerySet::at(std::string_view id) const {
  if (const auto* q = find(id)) return *q;
  throw DataError("unknown query id: " + std::string(id));
}

Qrels::Qrels(std::span<const QrelEntry> entries) {
  for (const auto& e : entries) {
    if (e.grade < 0) {
      throw DataError("negative grade for " + e.query_id + " " + e.doc_id);
    }
    auto& judged = by_query_[e.query_id];
    if (!judged.emplace(e.doc_id, e.grade).second) {
      throw DataError("duplicate judgment for " + e.query_id + " " + e.doc_id);
    }
  }
}

int Qrels::grade(std::string_view query_id, std::string_view doc_id) const {
  const auto q = by_query_.find(query_id);
  if (q == by_query_.end()) return 0;
  const auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

const Qrels::Judgments& Qrels::judgments(std::string_view query_id) const {
  static const Judgments kEmpty;
  const auto q = by_query_.find(query_id);
  return q == by_query_.end() ? kEmpty : q->second;
}

std::vector<std::string> Qrels::relevant(std::string_view query_id) const {
  std::vector<std::string> out;
  for (const auto& [doc, grade] : judgments(query_id)) {
    if (grade > 0) out.push_back(doc);
  }
  return out;
}

QuerySplit split_queries(std::span<const Query> queries, std::uint64_t seed,
                         double dev_fraction) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw UsageError("dev_fraction must lie in (0, 1)");
  }
  QuerySplit split;
  const std::size_t n = queries.size();
  if (n == 0) return split;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Fisher-Yates with rejection sampling; std::shuffle's output is
  // implementation-defined.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint64_t range = i + 1;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % range;
    std::uint64_t r;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(order[i], order[r % range]);
  }

  const auto dev_size = static_cast<std::size_t>(std::llround(dev_fraction * static_cast<double>(n)));
  std::vector<bool> in_dev(n, false);
  for (std::size_t i = 0; i < dev_size; ++i) in_dev[order[i]] = true;
  for (std::size_t i = 0; i < n; ++i) {
    (in_dev[i] ? split.dev : split.test).push_back(queries[i]);
  }
  return split;
}

Corpus load_corpus(const std::filesystem::path& path, const TokenizerConfig& cfg) {
  std::vector<Document> docs;
  ForEachIdText(path, [&](std::string_view id, std::string_view text, std::size_t) {
    docs.push_back(Document{std::string(id), tokenize(text, cfg)});
  });
  return Corpus(std::move(docs));
}

QuerySet load_queries(const std::filesystem::path& path, const TokenizerConfig& cfg) {
  std::vector<Query> queries;
  ForEachIdText(path, [&](std::string_view id, std::string_view text, std::size_t) {
    queries.push_back(Query{std::string(id), tokenize(text, cfg)});
  });
  return QuerySet(std::move(queries));
}

Qrels load_qrels(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  std::vector<QrelEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ChompCarriageReturn(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    QrelEntry e;
    std::string iteration;
    std::string extra;
    if (!(fields >> e.query_id >> iteration >> e.doc_id >> e.grade) || (fields >> extra)) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected `query_id 0 doc_id grade`");
    }
    entries.push_back(std::move(e));
  }
  return Qrels(entries);
}

void write_corpus(const std::filesystem::path& path, std::span<const Document> docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& d : docs) out << d.id << '\t' << join_tokens(d.tokens) << '\n';
}

void write_queries(const std::filesystem::path& path, std::span<const Query> queries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& q : queries) out << q.id << '\t' << join_tokens(q.tokens) << '\n';
}

}  // namespace axiodiag
