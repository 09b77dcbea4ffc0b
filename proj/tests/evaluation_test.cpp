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
#include <sstream>

#include <json.hpp>

#include "axiodiag/error.hpp"
#include "axiodiag/evaluation.hpp"

using namespace axiodiag;

namespace {

using Ranking = std::vector<std::string>;

Qrels ThreeQueryQrels() {
  const std::vector<QrelEntry> e{{"q1", "d1", 1}, {"q1", "d9", 0}, {"q2", "r", 1},
                                 {"q3", "d", 2},  {"q3", "e", 1}};
  return Qrels(e);
}

RunFile RunOf(const std::map<std::string, Ranking>& rankings) {
  RunFile run;
  for (const auto& [q, docs] : rankings) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      run.rows.push_back(RunRow{q, docs[i], i + 1, -static_cast<double>(i), "t"});
    }
  }
  return run;
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("axiodiag_eval_" + name);
}

}  // namespace

TEST_CASE("ndcg_at_k and mrr on a three-query fixture") {
  const auto qrels = ThreeQueryQrels();
  const Ranking r1{"d1", "d2", "d3"}, r2{"x", "r", "y"}, r3{"a", "b", "c", "d"};
  CHECK(ndcg_at_k(r1, qrels.judgments("q1"), 10) == 1.0);
  CHECK(ndcg_at_k(r2, qrels.judgments("q2"), 10) == doctest::Approx(0.6309297535714575).epsilon(1e-12));
  CHECK(ndcg_at_k(r3, qrels.judgments("q3"), 10) == doctest::Approx(0.3273949503887395).epsilon(1e-12));
  CHECK(ndcg_at_k(r3, qrels.judgments("q3"), 10, Gain::kExponential) ==
        doctest::Approx(0.35583989829307827).epsilon(1e-12));
  CHECK(ndcg_at_k(r3, qrels.judgments("q3"), 3) == 0.0);
  CHECK(mrr(r1, qrels.judgments("q1")) == 1.0);
  CHECK(mrr(r2, qrels.judgments("q2")) == 0.5);
  CHECK(mrr(r3, qrels.judgments("q3")) == 0.25);
  CHECK(mrr(Ranking{"zz"}, qrels.judgments("q1")) == 0.0);
  CHECK(ndcg_at_k(r1, qrels.judgments("unjudged"), 10) == 0.0);
  // Relevant at rank 4 counts for MRR even without a cutoff.
  Ranking long_list;
  for (int i = 0; i < 150; ++i) long_list.push_back("n" + std::to_string(i));
  long_list.push_back("r");
  CHECK(mrr(long_list, qrels.judgments("q2")) == doctest::Approx(1.0 / 151));

  const auto eff = evaluate_run(RunOf({{"q1", r1}, {"q2", r2}, {"q3", r3}, {"q4", {"a"}}}), qrels);
  CHECK(eff.num_queries == 3);
  CHECK(eff.ndcg_at_10 == doctest::Approx((1.0 + 0.6309297535714575 + 0.3273949503887395) / 3).epsilon(1e-12));
  CHECK(eff.mrr == doctest::Approx((1.0 + 0.5 + 0.25) / 3).epsilon(1e-12));
}

TEST_CASE("ndcg lies in [0, 1] and is 1 exactly for ideal rankings") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<QrelEntry> e;
    std::vector<std::string> pool;
    const std::size_t n = 1 + rng() % 12;
    std::size_t num_rel = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = "d" + std::to_string(i);
      pool.push_back(id);
      const int grade = rng() % 3 == 0 ? 1 : 0;
      num_rel += grade;
      e.push_back(QrelEntry{"q", id, grade});
    }
    const Qrels qrels(e);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(1 + rng() % n);
    const std::size_t k = 1 + rng() % 12;
    const double v = ndcg_at_k(pool, qrels.judgments("q"), k);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const std::size_t top = std::min(k, num_rel);
    bool ideal = num_rel > 0 && pool.size() >= top;
    for (std::size_t i = 0; ideal && i < top; ++i) ideal = qrels.is_relevant("q", pool[i]);
    CHECK((v == 1.0) == ideal);
  }
}

TEST_CASE("fulfilment_fraction") {
  const AxiomParams p;
  ScoreTable s;
  s.set("q", "a", 2.0);
  s.set("q", "b", 1.0);
  const std::vector<DiagnosticInstance> two{{AxiomId::kTFC1, "q", {"a", "b"}, {}},
                                            {AxiomId::kTFC1, "q", {"b", "a"}, {}}};
  CHECK(fulfilment_fraction(two, s, p) == 0.5);
  CHECK_FALSE(fulfilment_fraction({}, s, p).has_value());

  ScoreTable constant;
  constant.set("q", "a", 0.0);
  constant.set("q", "b", 0.0);
  CHECK(fulfilment_fraction(two, constant, p) == 0.0);
  const std::vector<DiagnosticInstance> lnc1{{AxiomId::kLNC1, "q", {"a", "b"}, {}}};
  CHECK(fulfilment_fraction(lnc1, constant, p) == 1.0);
}

TEST_CASE("fulfilment_fraction is invariant under increasing transforms of pair axioms") {
  std::mt19937_64 rng(8);
  AxiomParams exact;
  exact.epsilon = 0.0;
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreTable s;
    for (int d = 0; d < 6; ++d) s.set("q", "d" + std::to_string(d), std::round(u(rng) * 4) / 4);
    std::vector<DiagnosticInstance> xs;
    for (int i = 0; i < 10; ++i) {
      const auto a = "d" + std::to_string(rng() % 6);
      const auto b = "d" + std::to_string(rng() % 6);
      const auto axiom = kAllAxioms[rng() % kAllAxioms.size()];
      if (axiom == AxiomId::kTFC2) continue;
      xs.push_back(DiagnosticInstance{axiom, "q", {a, b}, {}});
    }
    const auto base = fulfilment_fraction(xs, s, exact);
    CHECK(fulfilment_fraction(xs, s.transformed([](double x) { return std::exp(x); }), exact) == base);
    CHECK(fulfilment_fraction(xs, s.transformed([](double x) { return x * x * x + x; }), exact) == base);
    CHECK(fulfilment_fraction(xs, s.transformed([](double x) { return 2 * x + 7; }), exact) == base);
  }
}

TEST_CASE("relevance_agreement") {
  const std::vector<QrelEntry> e{{"q", "r1", 1}, {"q", "r2", 1}, {"q", "n1", 0}};
  const Qrels qrels(e);
  std::vector<DiagnosticInstance> xs{
      {AxiomId::kTFC1, "q", {"r1", "n1"}, {}},  // agrees
      {AxiomId::kTFC1, "q", {"r2", "x"}, {}},   // agrees
      {AxiomId::kTFC1, "q", {"n1", "r1"}, {}},  // disagrees
      {AxiomId::kTFC1, "q", {"r1", "r2"}, {}},  // both relevant
  };
  for (int i = 0; i < 6; ++i) xs.push_back({AxiomId::kTFC1, "q", {"x" + std::to_string(i), "n1"}, {}});
  const auto a = relevance_agreement(xs, qrels);
  CHECK(a.with_relevant == 3);
  REQUIRE(a.agreement.has_value());
  CHECK(*a.agreement == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  const std::vector<DiagnosticInstance> tfc2{{AxiomId::kTFC2, "q", {"a", "b", "r1"}, {}},
                                             {AxiomId::kTFC2, "q", {"r1", "b", "c"}, {}}};
  const auto t = relevance_agreement(tfc2, qrels);
  CHECK(t.with_relevant == 2);
  CHECK(t.agreement == 0.5);

  const std::vector<DiagnosticInstance> lnc2{{AxiomId::kLNC2, "q", {"r1#dup2", "r1"}, {}}};
  CHECK(relevance_agreement(lnc2, qrels).with_relevant == 0);
  CHECK_FALSE(relevance_agreement(lnc2, qrels).agreement.has_value());
  CHECK_FALSE(relevance_agreement({}, qrels).agreement.has_value());
}

TEST_CASE("relevance_agreement matches a brute-force recount") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<QrelEntry> e;
    for (int d = 0; d < 8; ++d) {
      if (rng() % 2) e.push_back(QrelEntry{"q", "d" + std::to_string(d), static_cast<int>(rng() % 3)});
    }
    const Qrels qrels(e);
    std::vector<DiagnosticInstance> xs;
    std::size_t with = 0, agree = 0;
    for (int i = 0; i < 20; ++i) {
      const auto axiom = kAllAxioms[rng() % kAllAxioms.size()];
      DiagnosticInstance x{axiom, "q", {}, {}};
      for (std::size_t j = 0; j < arity(axiom); ++j) x.doc_ids.push_back("d" + std::to_string(rng() % 8));
      if (axiom != AxiomId::kLNC2) {
        std::size_t rel = 0;
        std::string which;
        for (const auto& d : x.doc_ids) {
          if (qrels.grade("q", d) > 0) {
            ++rel;
            which = d;
          }
        }
        if (rel == 1) {
          ++with;
          const auto& preferred = axiom == AxiomId::kTFC2 ? x.doc_ids[2] : x.doc_ids[0];
          agree += which == preferred;
        }
      }
      xs.push_back(std::move(x));
    }
    const auto a = relevance_agreement(xs, qrels);
    CHECK(a.with_relevant == with);
    if (with) CHECK(a.agreement == static_cast<double>(agree) / static_cast<double>(with));
  }
}

TEST_CASE("bucket sizes") {
  CHECK(bucket_sizes(9) == std::array<std::size_t, 3>{3, 3, 3});
  CHECK(bucket_sizes(10) == std::array<std::size_t, 3>{4, 3, 3});
  CHECK(bucket_sizes(11) == std::array<std::size_t, 3>{4, 4, 3});
  CHECK(bucket_sizes(0) == std::array<std::size_t, 3>{0, 0, 0});
  for (std::size_t n = 0; n < 200; ++n) {
    const auto b = bucket_sizes(n);
    CHECK(b[0] + b[1] + b[2] == n);
    CHECK(*std::max_element(b.begin(), b.end()) - *std::min_element(b.begin(), b.end()) <= 1);
    CHECK(b[0] >= b[1]);
    CHECK(b[1] >= b[2]);
  }
}

TEST_CASE("term overlap and the overlap split report") {
  const Query ab{"q", {"a", "b", "a"}};
  CHECK(term_overlap(ab, Document{"d", {"a", "x"}}) == 0.5);
  CHECK(term_overlap(ab, Document{"d", {"x"}}) == 0.0);

  // Four queries with overlaps 0, 0.5, 1, 1 and one without judgments.
  const Corpus corpus(std::vector<Document>{{"r0", {"x"}}, {"r1", {"a", "x"}}, {"r2", {"a", "b"}}, {"r3", {"c"}}, {"z", {"a"}}});
  const std::vector<Query> queries{{"q0", {"a", "b"}}, {"q1", {"a", "b"}}, {"q2", {"a", "b"}},
                                   {"q3", {"c"}}, {"q4", {"a"}}};
  const std::vector<QrelEntry> e{{"q0", "r0", 1}, {"q1", "r1", 1}, {"q2", "r2", 1},
                                 {"q2", "z", 1},  {"q3", "r3", 1}};
  const Qrels qrels(e);
  const std::map<std::string, RunFile> runs{
      {"m", RunOf({{"q0", {"r0"}}, {"q1", {"n", "r1"}}, {"q2", {"n", "n2", "z"}}, {"q3", {"r3"}}})}};

  const auto report = overlap_split_report(queries, corpus, qrels, runs, false);
  CHECK(report.excluded == std::vector<std::string>{"q4"});
  REQUIRE(report.buckets.size() == 3);
  CHECK(report.buckets[0].query_ids == std::vector<std::string>{"q0", "q1"});
  CHECK(report.buckets[1].query_ids == std::vector<std::string>{"q2"});
  CHECK(report.buckets[2].query_ids == std::vector<std::string>{"q3"});
  CHECK(report.buckets[0].min_overlap == 0.0);
  CHECK(report.buckets[0].max_overlap == 0.5);
  CHECK(*report.buckets[0].mean_ndcg.at("m") ==
        doctest::Approx((1.0 + 0.6309297535714575) / 2).epsilon(1e-12));
  CHECK(report.buckets[2].mean_ndcg.at("m") == 1.0);

  const auto pooled = overlap_split_report(queries, corpus, qrels, runs, true, 2);
  // q2's smallest relevant id is r2, which the run never retrieves.
  CHECK(pooled.buckets[1].num_queries.at("m") == 0);
  CHECK_FALSE(pooled.buckets[1].mean_ndcg.at("m").has_value());
  CHECK(pooled.buckets[0].num_queries.at("m") == 2);

  const auto p1 = TempPath("overlap.csv");
  write_overlap_csv(p1, report);
  CHECK(Slurp(p1).rfind("bucket,model,queries,min_overlap,max_overlap,mean_ndcg\n", 0) == 0);
  const auto p2 = TempPath("overlap.json");
  write_overlap_json(p2, pooled);
  const auto j = nlohmann::json::parse(Slurp(p2));
  CHECK(j["restrict_to_pool"] == true);
  CHECK(j["buckets"].size() == 3);
}

TEST_CASE("diagnose and report files") {
  const AxiomParams p;
  std::map<AxiomId, std::vector<DiagnosticInstance>> data;
  data[AxiomId::kTFC1] = {{AxiomId::kTFC1, "q", {"a", "b"}, {}}};
  data[AxiomId::kLNC1] = {{AxiomId::kLNC1, "q", {"a", "b"}, {}}};
  data[AxiomId::kTP] = {};
  ScoreTable s;
  s.set("q", "a", 1.0);
  s.set("q", "b", 1.0);
  CHECK_THROWS_WITH_AS(diagnose(data, {}, nullptr, p), "no score table", Error);
  const std::vector<QrelEntry> e{{"q", "a", 1}};
  const Qrels qrels(e);
  const auto report = diagnose(data, {{"const", s}}, &qrels, p);
  REQUIRE(report.axioms.size() == 3);
  CHECK(report.axioms[0].axiom == AxiomId::kTFC1);
  CHECK(report.axioms[0].fulfilment.at("const") == 0.0);
  CHECK(report.axioms[0].agreement.agreement == 1.0);
  CHECK(report.axioms[1].axiom == AxiomId::kLNC1);
  CHECK(report.axioms[1].fulfilment.at("const") == 1.0);
  CHECK_FALSE(report.axioms[2].fulfilment.at("const").has_value());

  const auto csv = TempPath("report.csv");
  write_report_csv(csv, report);
  CHECK(Slurp(csv) ==
        "axiom,model,dataset_size,with_relevant,agreement,fulfilment\n"
        "TFC1,const,1,1,1,0\n"
        "LNC1,const,1,1,1,1\n"
        "TP,const,0,0,,\n");
  const auto json = TempPath("report.json");
  write_report_json(json, report);
  const auto j = nlohmann::json::parse(Slurp(json));
  CHECK(j["axioms"][2]["fulfilment"]["const"].is_null());

  const auto eff = TempPath("eff.csv");
  write_effectiveness_csv(eff, {{"m", Effectiveness{2, 0.5, 0.75, 0.25}}});
  CHECK(Slurp(eff) == "model,queries,ndcg@10,ndcg@100,mrr\nm,2,0.5,0.75,0.25\n");
}
