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

#include "axiodiag/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include <json.hpp>

#include "axiodiag/error.hpp"

namespace axiodiag {

namespace {

double GainOf(int grade, Gain gain) {
  if (grade <= 0) return 0.0;
  return gain == Gain::kLinear ? static_cast<double>(grade) : std::exp2(grade) - 1.0;
}

int GradeIn(const Qrels::Judgments& judgments, const std::string& doc) {
  const auto it = judgments.find(doc);
  return it == judgments.end() ? 0 : it->second;
}

bool HasRelevant(const Qrels::Judgments& judgments) {
  return std::any_of(judgments.begin(), judgments.end(), [](const auto& j) { return j.second > 0; });
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string Cell(const std::optional<double>& v) { return v ? format_score(*v) : ""; }

nlohmann::ordered_json Json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

double ndcg_at_k(std::span<const std::string> ranking, const Qrels::Judgments& judgments,
                 std::size_t k, Gain gain) {
  if (k == 0) throw UsageError("nDCG cutoff must be at least 1");
  std::vector<int> grades;
  for (const auto& [doc, grade] : judgments) {
    if (grade > 0) grades.push_back(grade);
  }
  if (grades.empty()) return 0.0;
  std::sort(grades.begin(), grades.end(), std::greater<>());

  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) {
    ideal += GainOf(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    dcg += GainOf(GradeIn(judgments, ranking[i]), gain) / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / ideal;
}

double mrr(std::span<const std::string> ranking, const Qrels::Judgments& judgments) {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (GradeIn(judgments, ranking[i]) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

std::optional<double> fulfilment_fraction(std::span<const DiagnosticInstance> dataset,
                                          const ScoreTable& scores, const AxiomParams& params) {
  if (dataset.empty()) return std::nullopt;
  std::size_t fulfilled = 0;
  for (const auto& inst : dataset) fulfilled += check_fulfilment(inst, scores, params) ? 1 : 0;
  return static_cast<double>(fulfilled) / static_cast<double>(dataset.size());
}

Agreement relevance_agreement(std::span<const DiagnosticInstance> dataset, const Qrels& qrels) {
  Agreement out;
  std::size_t agreeing = 0;
  for (const auto& inst : dataset) {
    if (inst.axiom == AxiomId::kLNC2) continue;
    std::size_t relevant = 0;
    std::size_t which = 0;
    for (std::size_t i = 0; i < inst.doc_ids.size(); ++i) {
      if (qrels.is_relevant(inst.query_id, inst.doc_ids[i])) {
        ++relevant;
        which = i;
      }
    }
    if (relevant != 1) continue;
    ++out.with_relevant;
    const std::size_t preferred = inst.axiom == AxiomId::kTFC2 ? 2 : 0;
    if (which == preferred) ++agreeing;
  }
  if (out.with_relevant > 0) {
    out.agreement = static_cast<double>(agreeing) / static_cast<double>(out.with_relevant);
  }
  return out;
}

Effectiveness evaluate_run(const RunFile& run, const Qrels& qrels, Gain gain) {
  Effectiveness out;
  for (const auto& qid : run.query_ids()) {
    const auto& judgments = qrels.judgments(qid);
    if (!HasRelevant(judgments)) continue;
    const auto ranking = run.ranking(qid);
    ++out.num_queries;
    out.ndcg_at_10 += ndcg_at_k(ranking, judgments, 10, gain);
    out.ndcg_at_100 += ndcg_at_k(ranking, judgments, 100, gain);
    out.mrr += mrr(ranking, judgments);
  }
  if (out.num_queries > 0) {
    const auto n = static_cast<double>(out.num_queries);
    out.ndcg_at_10 /= n;
    out.ndcg_at_100 /= n;
    out.mrr /= n;
  }
  return out;
}

std::array<std::size_t, 3> bucket_sizes(std::size_t n) {
  std::array<std::size_t, 3> sizes{n / 3, n / 3, n / 3};
  for (std::size_t i = 0; i < n % 3; ++i) ++sizes[i];
  return sizes;
}

double term_overlap(const Query& query, const Document& doc) {
  const std::set<std::string> distinct(query.tokens.begin(), query.tokens.end());
  if (distinct.empty()) return 0.0;
  const std::set<std::string> present(doc.tokens.begin(), doc.tokens.end());
  std::size_t hits = 0;
  for (const auto& t : distinct) hits += present.count(t);
  return static_cast<double>(hits) / static_cast<double>(distinct.size());
}

OverlapReport overlap_split_report(std::span<const Query> queries, const Corpus& corpus,
                                   const Qrels& qrels,
                                   const std::map<std::string, RunFile>& runs,
                                   bool restrict_to_pool, std::size_t pool_depth,
                                   std::size_t ndcg_k, Gain gain) {
  OverlapReport report;
  report.restrict_to_pool = restrict_to_pool;
  report.pool_depth = pool_depth;
  report.ndcg_k = ndcg_k;

  struct Item {
    double overlap;
    const Query* query;
    std::string relevant_doc;
  };
  std::vector<Item> items;
  for (const auto& q : queries) {
    const auto rel = qrels.relevant(q.id);  // ascending ids
    const Document* doc = rel.empty() ? nullptr : corpus.find(rel.front());
    if (!doc) {
      report.excluded.push_back(q.id);
      continue;
    }
    items.push_back(Item{term_overlap(q, *doc), &q, doc->id});
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.overlap != b.overlap) return a.overlap < b.overlap;
    return a.query->id < b.query->id;
  });

  std::map<std::string, std::map<std::string, std::vector<std::string>, std::less<>>> rankings;
  for (const auto& [model, run] : runs) {
    auto& per_query = rankings[model];
    for (const auto& row : run.rows) per_query[row.query_id].push_back(row.doc_id);
  }

  std::size_t start = 0;
  for (const auto size : bucket_sizes(items.size())) {
    OverlapBucket bucket;
    if (size > 0) {
      bucket.min_overlap = items[start].overlap;
      bucket.max_overlap = items[start + size - 1].overlap;
    }
    for (const auto& [model, per_query] : rankings) {
      double total = 0.0;
      std::size_t n = 0;
      for (std::size_t i = start; i < start + size; ++i) {
        const auto& item = items[i];
        const auto it = per_query.find(item.query->id);
        static const std::vector<std::string> kNone;
        const auto& ranking = it == per_query.end() ? kNone : it->second;
        if (restrict_to_pool) {
          const auto depth = std::min(pool_depth, ranking.size());
          if (std::find(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(depth),
                        item.relevant_doc) == ranking.begin() + static_cast<std::ptrdiff_t>(depth)) {
            continue;
          }
        }
        total += ndcg_at_k(ranking, qrels.judgments(item.query->id), ndcg_k, gain);
        ++n;
      }
      bucket.num_queries[model] = n;
      bucket.mean_ndcg[model] = n ? std::optional<double>(total / static_cast<double>(n)) : std::nullopt;
    }
    for (std::size_t i = start; i < start + size; ++i) bucket.query_ids.push_back(items[i].query->id);
    report.buckets.push_back(std::move(bucket));
    start += size;
  }
  return report;
}

DiagnosticReport diagnose(const std::map<AxiomId, std::vector<DiagnosticInstance>>& datasets,
                          const std::map<std::string, ScoreTable>& scores, const Qrels* qrels,
                          const AxiomParams& params) {
  if (scores.empty()) throw UsageError("no score table");
  DiagnosticReport report;
  for (const auto axiom : kAllAxioms) {
    const auto it = datasets.find(axiom);
    if (it == datasets.end()) continue;
    AxiomReportRow row;
    row.axiom = axiom;
    row.dataset_size = it->second.size();
    if (qrels) row.agreement = relevance_agreement(it->second, *qrels);
    for (const auto& [model, table] : scores) {
      row.fulfilment[model] = fulfilment_fraction(it->second, table, params);
    }
    report.axioms.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(const std::filesystem::path& path, const DiagnosticReport& report) {
  auto out = OpenOutput(path);
  out << "axiom,model,dataset_size,with_relevant,agreement,fulfilment\n";
  for (const auto& row : report.axioms) {
    for (const auto& [model, frac] : row.fulfilment) {
      out << axiom_name(row.axiom) << ',' << model << ',' << row.dataset_size << ','
          << row.agreement.with_relevant << ',' << Cell(row.agreement.agreement) << ','
          << Cell(frac) << '\n';
    }
  }
}

void write_report_json(const std::filesystem::path& path, const DiagnosticReport& report) {
  nlohmann::ordered_json j;
  auto& axioms = j["axioms"] = nlohmann::ordered_json::array();
  for (const auto& row : report.axioms) {
    nlohmann::ordered_json r;
    r["axiom"] = axiom_name(row.axiom);
    r["dataset_size"] = row.dataset_size;
    r["with_relevant"] = row.agreement.with_relevant;
    r["agreement"] = Json(row.agreement.agreement);
    auto& f = r["fulfilment"] = nlohmann::ordered_json::object();
    for (const auto& [model, frac] : row.fulfilment) f[model] = Json(frac);
    axioms.push_back(std::move(r));
  }
  auto& eff = j["effectiveness"] = nlohmann::ordered_json::object();
  for (const auto& [model, e] : report.effectiveness) {
    eff[model] = {{"queries", e.num_queries},
                  {"ndcg@10", e.ndcg_at_10},
                  {"ndcg@100", e.ndcg_at_100},
                  {"mrr", e.mrr}};
  }
  OpenOutput(path) << j.dump(2) << '\n';
}

void write_overlap_csv(const std::filesystem::path& path, const OverlapReport& report) {
  auto out = OpenOutput(path);
  out << "bucket,model,queries,min_overlap,max_overlap,mean_ndcg\n";
  for (std::size_t b = 0; b < report.buckets.size(); ++b) {
    const auto& bucket = report.buckets[b];
    for (const auto& [model, mean] : bucket.mean_ndcg) {
      out << b << ',' << model << ',' << bucket.num_queries.at(model) << ','
          << format_score(bucket.min_overlap) << ',' << format_score(bucket.max_overlap) << ','
          << Cell(mean) << '\n';
    }
  }
}

void write_overlap_json(const std::filesystem::path& path, const OverlapReport& report) {
  nlohmann::ordered_json j;
  j["restrict_to_pool"] = report.restrict_to_pool;
  j["pool_depth"] = report.pool_depth;
  j["ndcg_cutoff"] = report.ndcg_k;
  j["excluded_queries"] = report.excluded;
  auto& buckets = j["buckets"] = nlohmann::ordered_json::array();
  for (const auto& bucket : report.buckets) {
    nlohmann::ordered_json b;
    b["queries"] = bucket.query_ids;
    b["min_overlap"] = bucket.min_overlap;
    b["max_overlap"] = bucket.max_overlap;
    auto& models = b["models"] = nlohmann::ordered_json::object();
    for (const auto& [model, mean] : bucket.mean_ndcg) {
      models[model] = {{"queries", bucket.num_queries.at(model)}, {"mean_ndcg", Json(mean)}};
    }
    buckets.push_back(std::move(b));
  }
  OpenOutput(path) << j.dump(2) << '\n';
}

void write_effectiveness_csv(const std::filesystem::path& path,
                             const std::map<std::string, Effectiveness>& results) {
  auto out = OpenOutput(path);
  out << "model,queries,ndcg@10,ndcg@100,mrr\n";
  for (const auto& [model, e] : results) {
    out << model << ',' << e.num_queries << ',' << format_score(e.ndcg_at_10) << ','
        << format_score(e.ndcg_at_100) << ',' << format_score(e.mrr) << '\n';
  }
}

}  // namespace axiodiag
