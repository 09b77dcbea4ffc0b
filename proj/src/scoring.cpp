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

#include "axiodiag/scoring.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "axiodiag/error.hpp"
#include "subprocess.hpp"

namespace axiodiag {

namespace {

using Key = std::pair<std::string, std::string>;

std::span<const std::string> DocTokens(const ScoreRequest& req, const Corpus& corpus) {
  if (req.tokens) return *req.tokens;
  return corpus.at(req.doc_id).tokens;
}

std::string Quote(std::string_view line) {
  constexpr std::size_t kMax = 200;
  std::string s(line.substr(0, kMax));
  if (line.size() > kMax) s += "...";
  return "'" + s + "'";
}

}  // namespace

std::vector<ScoreRequest> score_requests(std::span<const DiagnosticInstance> instances) {
  std::map<Key, const Tokens*> wanted;
  for (const auto& inst : instances) {
    for (const auto& d : inst.doc_ids) {
      const auto gen = inst.generated_docs.find(d);
      const Tokens* tokens = gen == inst.generated_docs.end() ? nullptr : &gen->second;
      auto [it, fresh] = wanted.try_emplace(Key{inst.query_id, d}, tokens);
      if (!fresh && !it->second) it->second = tokens;
    }
  }
  std::vector<ScoreRequest> out;
  out.reserve(wanted.size());
  for (const auto& [key, tokens] : wanted) {
    ScoreRequest req{key.first, key.second, std::nullopt};
    if (tokens) req.tokens = *tokens;
    out.push_back(std::move(req));
  }
  return out;
}

std::vector<ScoreRequest> score_requests(const RunFile& run) {
  std::set<Key> wanted;
  for (const auto& r : run.rows) wanted.emplace(r.query_id, r.doc_id);
  std::vector<ScoreRequest> out;
  for (const auto& [q, d] : wanted) out.push_back(ScoreRequest{q, d, std::nullopt});
  return out;
}

ScoreTable score_with_ql(std::span<const ScoreRequest> requests, const QuerySet& queries,
                         const InvertedIndex& index, const CollectionStats& stats, double mu) {
  ScoreTable table;
  for (const auto& req : requests) {
    const auto& q = queries.at(req.query_id);
    const double s = req.tokens ? ql_score_tokens(q, *req.tokens, stats, mu)
                                : ql_score(q, req.doc_id, index, stats, mu);
    table.set(req.query_id, req.doc_id, s);
  }
  return table;
}

ScoreTable score_with(std::span<const ScoreRequest> requests, const QuerySet& queries,
                      const Corpus& corpus, const ScorerFn& scorer) {
  ScoreTable table;
  for (const auto& req : requests) {
    table.set(req.query_id, req.doc_id, scorer(queries.at(req.query_id), DocTokens(req, corpus)));
  }
  return table;
}

std::string encode_request(std::string_view query_id, std::string_view query_text,
                           std::string_view doc_id, std::string_view doc_text) {
  nlohmann::ordered_json j;
  j["qid"] = query_id;
  j["query"] = query_text;
  j["docid"] = doc_id;
  j["doc"] = doc_text;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

ScoreResponse parse_response(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("malformed scorer response " + Quote(line));
  }
  if (!j.is_object() || !j.contains("qid") || !j.contains("docid") || !j.contains("score") ||
      !j["qid"].is_string() || !j["docid"].is_string() || !j["score"].is_number()) {
    throw ProtocolError("malformed scorer response " + Quote(line));
  }
  ScoreResponse r{j["qid"].get<std::string>(), j["docid"].get<std::string>(),
                  j["score"].get<double>()};
  if (!std::isfinite(r.score)) throw ProtocolError("non-finite score in response " + Quote(line));
  return r;
}

ScoreTable collect_responses(std::span<const ScoreRequest> requests,
                             std::span<const std::string> response_lines) {
  std::set<Key> pending;
  for (const auto& r : requests) pending.emplace(r.query_id, r.doc_id);
  const std::set<Key> requested = pending;

  ScoreTable table;
  for (const auto& line : response_lines) {
    auto resp = parse_response(line);
    Key key{resp.query_id, resp.doc_id};
    if (!requested.count(key)) throw ProtocolError("unrequested response " + Quote(line));
    if (!pending.erase(key)) throw ProtocolError("duplicate response " + Quote(line));
    table.set(std::move(key.first), std::move(key.second), resp.score);
  }
  if (!pending.empty()) {
    std::string msg = "missing " + std::to_string(pending.size()) + " scorer response(s):";
    std::size_t shown = 0;
    for (const auto& [q, d] : pending) {
      if (shown++ == 20) {
        msg += " ...";
        break;
      }
      msg += " (" + q + ", " + d + ")";
    }
    throw ProtocolError(msg);
  }
  return table;
}

ScoreTable score_external(std::span<const ScoreRequest> requests, const QuerySet& queries,
                          const Corpus& corpus, const ExternalScorer& scorer) {
  // Encode up front so data errors surface before the scorer starts.
  std::vector<std::string> encoded;
  encoded.reserve(requests.size());
  for (const auto& req : requests) {
    const auto& q = queries.at(req.query_id);
    encoded.push_back(encode_request(req.query_id, join_tokens(q.tokens), req.doc_id,
                                     join_tokens(DocTokens(req, corpus))) + "\n");
  }

  detail::Subprocess proc(scorer.argv);
  std::thread writer([&] {
    for (const auto& line : encoded) {
      if (!proc.write_all(line)) break;
    }
    proc.close_stdin();
  });
  std::vector<std::string> lines;
  try {
    std::string line;
    while (proc.read_line(line)) lines.push_back(line);
  } catch (...) {
    writer.join();
    throw;
  }
  writer.join();
  const int status = proc.wait();
  if (status != 0) {
    throw ProtocolError("scorer exited with status " + std::to_string(status));
  }
  return collect_responses(requests, lines);
}

void write_scores(const std::filesystem::path& path, const ScoreTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [key, s] : table.entries()) {
    out << key.first << '\t' << key.second << '\t' << format_score(s) << '\n';
  }
}

ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  ScoreTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    double score = 0.0;
    const auto bad = [&] {
      return DataError(path.string() + ":" + std::to_string(lineno) +
                       ": expected `query_id<TAB>doc_id<TAB>score`");
    };
    if (fields.size() != 3) throw bad();
    const auto& t = fields[2];
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), score);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw bad();
    table.set(fields[0], fields[1], score);
  }
  return table;
}

}  // namespace axiodiag
