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

#include "axiodiag/run_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "axiodiag/error.hpp"

namespace axiodiag {

std::string format_score(double score) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), score);
  if (ec != std::errc()) throw DataError("cannot format score");
  return std::string(buf, end);
}

std::vector<std::string> RunFile::query_ids() const {
  std::vector<std::string> out;
  std::map<std::string_view, bool> seen;
  for (const auto& r : rows) {
    if (seen.emplace(r.query_id, true).second) out.push_back(r.query_id);
  }
  return out;
}

std::vector<std::string> RunFile::ranking(std::string_view query_id) const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (r.query_id == query_id) out.push_back(r.doc_id);
  }
  return out;
}

RunFile load_run(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  struct Last {
    std::size_t rank;
    double score;
    std::size_t line;
  };
  std::map<std::string, Last, std::less<>> last;

  RunFile run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    RunRow row;
    std::string q0, score_text, extra;
    long long rank = 0;
    if (!(fields >> row.query_id >> q0 >> row.doc_id >> rank >> score_text >> row.tag) ||
        (fields >> extra) || rank < 1) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected `query_id Q0 doc_id rank score tag`");
    }
    const auto [ptr, ec] =
        std::from_chars(score_text.data(), score_text.data() + score_text.size(), row.score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad score '" +
                      score_text + "'");
    }
    row.rank = static_cast<std::size_t>(rank);

    const auto where = "line " + std::to_string(lineno);
    const auto it = last.find(row.query_id);
    const std::size_t expected = it == last.end() ? 1 : it->second.rank + 1;
    if (row.rank != expected) {
      run.warnings.push_back(where + ": query " + row.query_id + " rank " +
                             std::to_string(row.rank) + ", expected " + std::to_string(expected));
    }
    if (it != last.end() && row.score > it->second.score) {
      run.warnings.push_back(where + ": query " + row.query_id + " score " + score_text +
                             " exceeds the score on line " + std::to_string(it->second.line));
    }
    last.insert_or_assign(row.query_id, Last{row.rank, row.score, lineno});
    run.rows.push_back(std::move(row));
  }
  return run;
}

void write_run(const std::filesystem::path& path, std::span<const RunRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : rows) {
    out << r.query_id << " Q0 " << r.doc_id << ' ' << r.rank << ' ' << format_score(r.score)
        << ' ' << r.tag << '\n';
  }
}

void append_ranking(std::vector<RunRow>& rows, std::string_view query_id,
                    std::span<const ScoredDoc> ranking, std::string_view tag) {
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    rows.push_back(RunRow{std::string(query_id), ranking[i].doc_id, i + 1, ranking[i].score,
                          std::string(tag)});
  }
}

ScoreTable score_table_from_run(const RunFile& run) {
  ScoreTable table;
  for (const auto& r : run.rows) table.set(r.query_id, r.doc_id, r.score);
  return table;
}

}  // namespace axiodiag
