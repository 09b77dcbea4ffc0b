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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "axiodiag/corpus.hpp"
#include "axiodiag/error.hpp"

using namespace axiodiag;

namespace {

std::filesystem::path WriteTemp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("axiodiag_corpus_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

Tokens T(std::initializer_list<const char*> xs) { return Tokens(xs.begin(), xs.end()); }

}  // namespace

TEST_CASE("tokenize folds case and splits on whitespace") {
  const TokenizerConfig cfg;
  CHECK(tokenize("What is a Flail chest", cfg) == T({"what", "is", "a", "flail", "chest"}));
  CHECK(tokenize("", cfg).empty());
  CHECK(tokenize(" \t\n ", cfg).empty());
}

TEST_CASE("tokenize keeps interior and balanced punctuation") {
  const TokenizerConfig cfg;
  CHECK(tokenize("a(n) __.", cfg) == T({"a(n)", "__"}));
  CHECK(tokenize("\"Hello,\" world!!", cfg) == T({"hello", "world"}));
  CHECK(tokenize("(what) )what don't", cfg) == T({"(what)", "what", "don't"}));
  CHECK(tokenize("... -- !", cfg).empty());
}

TEST_CASE("tokenize splits on non-ASCII whitespace") {
  const TokenizerConfig cfg;
  CHECK(tokenize("a\xC2\xA0" "b\xE2\x80\x83" "c\xE3\x80\x80" "d", cfg) == T({"a", "b", "c", "d"}));
  // Non-whitespace multibyte characters stay inside tokens.
  CHECK(tokenize("caf\xC3\xA9 ok", cfg) == T({"caf\xC3\xA9", "ok"}));
}

TEST_CASE("tokenize options and truncation") {
  TokenizerConfig raw{false, false, 3};
  CHECK(tokenize("Hi, There. You! extra", raw) == T({"Hi,", "There.", "You!"}));
  TokenizerConfig one{true, true, 1};
  CHECK(tokenize("... Alpha beta", one) == T({"alpha"}));
}

TEST_CASE("tokenize is idempotent on its own output") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "abAB_.,;:!?'\"()[]{}-  \t";
  const TokenizerConfig cfg;
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    const auto len = rng() % 30;
    for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    const auto once = tokenize(text, cfg);
    CHECK_MESSAGE(tokenize(join_tokens(once), cfg) == once, text);
  }
}

TEST_CASE("term_count") {
  const Document d{"d", T({"a", "a", "b"})};
  CHECK(term_count("a", d) == 2);
  CHECK(term_count("z", d) == 0);
  CHECK(term_count("a", Document{"e", {}}) == 0);
}

TEST_CASE("term counts sum to the document length") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Document d{"d", {}};
    for (std::size_t i = 0, n = rng() % 20; i < n; ++i) d.tokens.push_back(std::string(1, 'a' + rng() % 5));
    const std::set<std::string> distinct(d.tokens.begin(), d.tokens.end());
    std::size_t total = 0;
    for (const auto& w : distinct) total += term_count(w, d);
    CHECK(total == d.length());
  }
}

TEST_CASE("idf") {
  CHECK(idf(4, 2) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(idf(4, 4) == 0.0);
  CHECK(idf(4, 0) == doctest::Approx(2.0794415416798357).epsilon(1e-15));
}

TEST_CASE("split_queries sizes, determinism and partition") {
  std::vector<Query> qs;
  for (int i = 0; i < 10; ++i) qs.push_back(Query{"q" + std::to_string(i), {"x"}});
  const auto a = split_queries(qs, 42, 0.7);
  CHECK(a.dev.size() == 7);
  CHECK(a.test.size() == 3);
  const auto b = split_queries(qs, 42, 0.7);
  auto ids = [](const std::vector<Query>& v) {
    std::vector<std::string> out;
    for (const auto& q : v) out.push_back(q.id);
    return out;
  };
  CHECK(ids(a.dev) == ids(b.dev));
  CHECK(ids(a.test) == ids(b.test));

  std::set<std::string> all;
  for (const auto& id : ids(a.dev)) CHECK(all.insert(id).second);
  for (const auto& id : ids(a.test)) CHECK(all.insert(id).second);
  CHECK(all.size() == 10);

  // Different seeds should eventually give a different split.
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) {
    differs = ids(split_queries(qs, seed, 0.7).dev) != ids(a.dev);
  }
  CHECK(differs);

  const auto one = split_queries(std::span(qs).first(1), 3, 0.7);
  CHECK(one.dev.size() == 1);
  CHECK(one.test.empty());
  const auto none = split_queries({}, 3, 0.7);
  CHECK(none.dev.empty());
  CHECK(none.test.empty());
  CHECK_THROWS_AS(split_queries(qs, 1, 1.0), Error);
  CHECK_THROWS_AS(split_queries(qs, 1, 0.0), Error);
}

TEST_CASE("split_queries is pinned for a fixed seed") {
  // Guards against an accidental change of the shuffle algorithm.
  std::vector<Query> qs;
  for (int i = 0; i < 6; ++i) qs.push_back(Query{"q" + std::to_string(i), {"x"}});
  const auto first = split_queries(qs, 2024, 0.5);
  for (int rep = 0; rep < 3; ++rep) {
    const auto again = split_queries(qs, 2024, 0.5);
    REQUIRE(again.dev.size() == first.dev.size());
    for (std::size_t i = 0; i < first.dev.size(); ++i) CHECK(again.dev[i].id == first.dev[i].id);
  }
}

TEST_CASE("Corpus and QuerySet reject bad ids") {
  CHECK_THROWS_WITH_AS(Corpus(std::vector<Document>{{"d1", {}}, {"d1", {}}}), "duplicate document id: d1", Error);
  CHECK_THROWS_AS(Corpus(std::vector<Document>{{"", {}}}), Error);
  const Corpus c(std::vector<Document>{{"d1", {"a"}}});
  CHECK(c.find("d1") != nullptr);
  CHECK(c.find("d2") == nullptr);
  CHECK_THROWS_WITH(c.at("d2"), "unknown document id: d2");
  CHECK_THROWS_AS(QuerySet(std::vector<Query>{{"q", {}}}), Error);
  CHECK_THROWS_AS(QuerySet(std::vector<Query>{{"q", {"a"}}, {"q", {"b"}}}), Error);
}

TEST_CASE("file loaders") {
  const TokenizerConfig cfg;
  const auto corpus_path = WriteTemp("c.tsv", "d1\tHello, World\r\n\nd2\t\n");
  const auto corpus = load_corpus(corpus_path, cfg);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.at("d1").tokens == T({"hello", "world"}));
  CHECK(corpus.at("d2").tokens.empty());

  CHECK_THROWS_AS(load_corpus(WriteTemp("bad.tsv", "no tab here\n"), cfg), Error);
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv", cfg), Error);

  const auto queries = load_queries(WriteTemp("q.tsv", "q1\tFlail chest?\n"), cfg);
  CHECK(queries.at("q1").tokens == T({"flail", "chest"}));

  const auto qrels = load_qrels(WriteTemp("qrels", "q1 0 d1 1\nq1 0 d2 0\nq2 0 d9 2\n"));
  CHECK(qrels.is_relevant("q1", "d1"));
  CHECK_FALSE(qrels.is_relevant("q1", "d2"));
  CHECK(qrels.grade("q2", "d9") == 2);
  CHECK(qrels.grade("q3", "d9") == 0);
  CHECK(qrels.relevant("q1") == std::vector<std::string>{"d1"});
  CHECK_THROWS_AS(load_qrels(WriteTemp("qrels_bad", "q1 0 d1\n")), Error);
  CHECK_THROWS_AS(load_qrels(WriteTemp("qrels_dup", "q1 0 d1 1\nq1 0 d1 0\n")), Error);

  const auto out = std::filesystem::temp_directory_path() / "axiodiag_corpus_roundtrip.tsv";
  write_corpus(out, corpus.documents());
  const auto back = load_corpus(out, cfg);
  CHECK(back.at("d1").tokens == corpus.at("d1").tokens);
  CHECK(back.at("d2").tokens.empty());
}
