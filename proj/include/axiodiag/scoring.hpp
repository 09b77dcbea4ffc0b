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

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "axiodiag/axioms.hpp"
#include "axiodiag/corpus.hpp"
#include "axiodiag/index.hpp"
#include "axiodiag/run_file.hpp"
#include "axiodiag/score_table.hpp"

namespace axiodiag {

/// One (query, document) pair to score. Generated documents carry their own
/// tokens; all others are looked up in the corpus.
struct ScoreRequest {
  std::string query_id;
  std::string doc_id;
  std::optional<Tokens> tokens;
};

/// Distinct requests needed to check every instance, sorted by key.
std::vector<ScoreRequest> score_requests(std::span<const DiagnosticInstance> instances);

/// Requests for every (query, doc) row of a run.
std::vector<ScoreRequest> score_requests(const RunFile& run);

ScoreTable score_with_ql(std::span<const ScoreRequest> requests, const QuerySet& queries,
                         const InvertedIndex& index, const CollectionStats& stats, double mu);

/// In-process scorer: S(Q, D) from the query and the document tokens.
using ScorerFn = std::function<double(const Query&, std::span<const std::string>)>;

ScoreTable score_with(std::span<const ScoreRequest> requests, const QuerySet& queries,
                      const Corpus& corpus, const ScorerFn& scorer);

// Wire protocol, one JSON object per line in each direction:
//   request   {"qid": ..., "query": ..., "docid": ..., "doc": ...}
//   response  {"qid": ..., "docid": ..., "score": <number>}

struct ScoreResponse {
  std::string query_id;
  std::string doc_id;
  double score = 0.0;
};

std::string encode_request(std::string_view query_id, std::string_view query_text,
                           std::string_view doc_id, std::string_view doc_text);
/// Throws a protocol error quoting `line` when it is not a valid response.
ScoreResponse parse_response(std::string_view line);

/// Assembles a table from response lines. Throws a protocol error on a
/// malformed, duplicate or unrequested response, or listing the requests
/// left without a response.
ScoreTable collect_responses(std::span<const ScoreRequest> requests,
                             std::span<const std::string> response_lines);

struct ExternalScorer {
  /// argv of the scorer process; argv[0] is looked up on PATH.
  std::vector<std::string> argv;
};

/// Streams requests to the scorer's stdin while reading its stdout. Throws a
/// protocol error on malformed or missing responses or a non-zero exit.
ScoreTable score_external(std::span<const ScoreRequest> requests, const QuerySet& queries,
                          const Corpus& corpus, const ExternalScorer& scorer);

/// `query_id \t doc_id \t score` per line, in key order.
void write_scores(const std::filesystem::path& path, const ScoreTable& table);
ScoreTable load_scores(const std::filesystem::path& path);

}  // namespace axiodiag
