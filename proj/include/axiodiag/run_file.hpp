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
#include <span>
#include <string>
#include <vector>

#include "axiodiag/index.hpp"
#include "axiodiag/score_table.hpp"

namespace axiodiag {

/// One line of a TREC run: `query_id Q0 doc_id rank score tag`.
struct RunRow {
  std::string query_id;
  std::string doc_id;
  std::size_t rank = 0;
  double score = 0.0;
  std::string tag;
};

struct RunFile {
  std::vector<RunRow> rows;
  /// Invariant violations found while loading (rank gaps, score inversions),
  /// each naming the offending line.
  std::vector<std::string> warnings;

  /// Distinct query ids in first-appearance order.
  std::vector<std::string> query_ids() const;
  /// Doc ids of one query, in file order.
  std::vector<std::string> ranking(std::string_view query_id) const;
};

/// Shortest decimal that parses back to the same double.
std::string format_score(double score);

/// Throws a data error on parse failure; invariant violations become warnings.
RunFile load_run(const std::filesystem::path& path);
void write_run(const std::filesystem::path& path, std::span<const RunRow> rows);

/// Rows for a ranked list, ranks starting at 1.
void append_ranking(std::vector<RunRow>& rows, std::string_view query_id,
                    std::span<const ScoredDoc> ranking, std::string_view tag);

ScoreTable score_table_from_run(const RunFile& run);

}  // namespace axiodiag
