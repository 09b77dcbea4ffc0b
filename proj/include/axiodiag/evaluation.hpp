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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "axiodiag/axioms.hpp"
#include "axiodiag/corpus.hpp"
#include "axiodiag/run_file.hpp"
#include "axiodiag/score_table.hpp"

namespace axiodiag {

enum class Gain { kLinear, kExponential };

/// DCG@k / ideal DCG@k with a log2(rank + 1) discount; 0 when the query has
/// no relevant document.
double ndcg_at_k(std::span<const std::string> ranking, const Qrels::Judgments& judgments,
                 std::size_t k, Gain gain = Gain::kLinear);

/// Reciprocal rank of the first relevant document, 0 if none is ranked.
double mrr(std::span<const std::string> ranking, const Qrels::Judgments& judgments);

/// Share of instances the scores order as the axiom dictates; nullopt for an
/// empty dataset.
std::optional<double> fulfilment_fraction(std::span<const DiagnosticInstance> dataset,
                                          const ScoreTable& scores, const AxiomParams& params);

struct Agreement {
  /// Instances in which exactly one document is relevant.
  std::size_t with_relevant = 0;
  /// Share of those whose relevant document is the axiom-preferred one
  /// (doc_ids[0]; D3 for TFC2). nullopt when `with_relevant` is 0 and always
  /// for LNC2.
  std::optional<double> agreement;
};
Agreement relevance_agreement(std::span<const DiagnosticInstance> dataset, const Qrels& qrels);

struct Effectiveness {
  std::size_t num_queries = 0;
  double ndcg_at_10 = 0.0;
  double ndcg_at_100 = 0.0;
  double mrr = 0.0;
};

/// Mean metrics over queries present in both the run and the qrels with at
/// least one relevant document.
Effectiveness evaluate_run(const RunFile& run, const Qrels& qrels, Gain gain = Gain::kLinear);

/// Sizes of `n` items split into three contiguous, near-equal buckets; the
/// earlier buckets take the remainder.
std::array<std::size_t, 3> bucket_sizes(std::size_t n);

/// Fraction of distinct query terms present in `doc`.
double term_overlap(const Query& query, const Document& doc);

struct OverlapBucket {
  std::vector<std::string> query_ids;
  double min_overlap = 0.0;
  double max_overlap = 0.0;
  /// Per model: mean nDCG and the number of queries averaged.
  std::map<std::string, std::optional<double>> mean_ndcg;
  std::map<std::string, std::size_t> num_queries;
};

struct OverlapReport {
  std::vector<OverlapBucket> buckets;
  /// Queries dropped because no relevant document with known text exists.
  std::vector<std::string> excluded;
  bool restrict_to_pool = false;
  std::size_t pool_depth = 100;
  std::size_t ndcg_k = 10;
};

/// Queries sorted by term overlap with their relevant document (the smallest
/// relevant doc id when several exist), split into three buckets, with mean
/// nDCG per bucket and model. With `restrict_to_pool`, a model only averages
/// queries whose relevant document is in its top `pool_depth`.
OverlapReport overlap_split_report(std::span<const Query> queries, const Corpus& corpus,
                                   const Qrels& qrels,
                                   const std::map<std::string, RunFile>& runs,
                                   bool restrict_to_pool, std::size_t pool_depth = 100,
                                   std::size_t ndcg_k = 10, Gain gain = Gain::kLinear);

struct AxiomReportRow {
  AxiomId axiom = AxiomId::kTFC1;
  std::size_t dataset_size = 0;
  Agreement agreement;
  std::map<std::string, std::optional<double>> fulfilment;
};

struct DiagnosticReport {
  std::vector<AxiomReportRow> axioms;
  std::map<std::string, Effectiveness> effectiveness;
};

/// One row per dataset, in axiom order, scored by every model.
DiagnosticReport diagnose(const std::map<AxiomId, std::vector<DiagnosticInstance>>& datasets,
                          const std::map<std::string, ScoreTable>& scores, const Qrels* qrels,
                          const AxiomParams& params);

/// `axiom,model,dataset_size,with_relevant,agreement,fulfilment`; empty cells
/// for undefined values.
void write_report_csv(const std::filesystem::path& path, const DiagnosticReport& report);
void write_report_json(const std::filesystem::path& path, const DiagnosticReport& report);

/// `bucket,model,queries,min_overlap,max_overlap,mean_ndcg`.
void write_overlap_csv(const std::filesystem::path& path, const OverlapReport& report);
void write_overlap_json(const std::filesystem::path& path, const OverlapReport& report);

/// `model,queries,ndcg@10,ndcg@100,mrr`.
void write_effectiveness_csv(const std::filesystem::path& path,
                             const std::map<std::string, Effectiveness>& results);

}  // namespace axiodiag
