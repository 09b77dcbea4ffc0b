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

#include "axiodiag/cli.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "axiodiag/axioms.hpp"
#include "axiodiag/corpus.hpp"
#include "axiodiag/embeddings.hpp"
#include "axiodiag/error.hpp"
#include "axiodiag/evaluation.hpp"
#include "axiodiag/extraction.hpp"
#include "axiodiag/index.hpp"
#include "axiodiag/run_file.hpp"
#include "axiodiag/scoring.hpp"

namespace axiodiag {

namespace {

struct TextOptions {
  std::string corpus;
  std::string queries;
  std::size_t max_doc_tokens = 512;
  bool keep_case = false;
  bool keep_punctuation = false;

  TokenizerConfig tokenizer() const {
    return TokenizerConfig{!keep_case, !keep_punctuation, max_doc_tokens};
  }
};

void AddTextOptions(CLI::App* cmd, TextOptions& o, bool need_queries) {
  cmd->add_option("--corpus", o.corpus, "Corpus TSV (doc_id<TAB>text)")->required();
  auto* q = cmd->add_option("--queries", o.queries, "Query TSV (query_id<TAB>text)");
  if (need_queries) q->required();
  cmd->add_option("--max-doc-tokens", o.max_doc_tokens, "Truncation length at ingestion")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--keep-case", o.keep_case, "Do not lowercase");
  cmd->add_flag("--keep-punctuation", o.keep_punctuation, "Do not strip edge punctuation");
}

void AddAxiomParams(CLI::App* cmd, AxiomParams& p) {
  cmd->add_option("--delta-len", p.delta_len, "Length gap for TFC1/TFC2/M-TDC");
  cmd->add_option("--delta-sim", p.delta_sim, "sigma' threshold for STMC2");
  cmd->add_option("--stmc3-delta-len", p.stmc3_delta_len, "Length gap for STMC3");
  cmd->add_option("--max-tokens", p.max_tokens, "LNC2 duplicate length cap");
  cmd->add_option("--epsilon", p.epsilon, "Score tie tolerance");
}

// NAME=path, or a bare path named after its file stem.
std::pair<std::string, std::string> NamedPath(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) return {std::filesystem::path(spec).stem().string(), spec};
  if (eq == 0) throw UsageError("empty model name in '" + spec + "'");
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

Gain ParseGain(const std::string& g) {
  if (g == "linear") return Gain::kLinear;
  if (g == "exponential") return Gain::kExponential;
  throw UsageError("unknown gain '" + g + "'");
}

std::vector<AxiomId> ParseAxioms(const std::vector<std::string>& names) {
  std::vector<AxiomId> out;
  for (const auto& n : names) {
    if (n == "all" || n == "ALL") {
      out.assign(kAllAxioms.begin(), kAllAxioms.end());
      return out;
    }
    const auto a = parse_axiom(n);
    if (!a) throw UsageError("unknown axiom '" + n + "'");
    if (std::find(out.begin(), out.end(), *a) == out.end()) out.push_back(*a);
  }
  return out;
}

// Score source: a score TSV (3 fields) or a TREC run (6 fields).
ScoreTable LoadScoreSource(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.find('\t') != std::string::npos) return load_scores(path);
    return score_table_from_run(load_run(path));
  }
  return ScoreTable{};
}

std::vector<DiagnosticInstance> LoadDatasets(const std::vector<std::string>& paths,
                                             const std::vector<std::string>& generated) {
  std::vector<DiagnosticInstance> all;
  for (const auto& p : paths) {
    auto part = read_dataset(p);
    all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  const bool has_lnc2 = std::any_of(all.begin(), all.end(),
                                    [](const auto& i) { return i.axiom == AxiomId::kLNC2; });
  if (has_lnc2) {
    if (generated.empty()) throw UsageError("LNC2 instances need --generated");
    TokenizerConfig raw{false, false, std::numeric_limits<std::size_t>::max()};
    std::vector<Document> docs;
    for (const auto& g : generated) {
      auto c = load_corpus(g, raw);
      docs.insert(docs.end(), c.documents().begin(), c.documents().end());
    }
    attach_generated(all, Corpus(std::move(docs)));
  }
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<std::string> SplitCommand(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> argv;
  std::string a;
  while (in >> a) argv.push_back(a);
  return argv;
}

std::ofstream OpenOutput(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

const char* KindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kProtocol: return "protocol";
  }
  return "unknown";
}

void ReportError(std::ostream& err, ErrorKind kind, const std::string& msg) {
  err << "error: kind=" << KindName(kind) << " msg=" << nlohmann::json(msg).dump() << '\n';
}

}  // namespace

int run_subcommand(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Axiomatic diagnostic datasets for ad-hoc retrieval", "axiodiag"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  TextOptions text;
  AxiomParams params;
  double mu = 2500.0;
  std::size_t k = 100;
  std::string out_path, out_csv, out_json, run_path, tag = "ql", split = "all", generated_out;
  std::uint64_t seed = 42;
  double dev_fraction = 0.7;
  std::vector<std::string> axiom_names{"all"}, datasets, generated, score_specs, run_specs;
  std::string vectors, qrels_path, out_dir, scorer_cmd, gain_name = "linear";
  bool restrict_to_pool = false;
  std::size_t ndcg_k = 10;

  auto* index_cmd = app.add_subcommand("index", "Index the corpus and write collection statistics");
  AddTextOptions(index_cmd, text, false);
  index_cmd->add_option("--out", out_path, "Statistics JSON")->required();

  auto* retrieve_cmd = app.add_subcommand("retrieve", "Query-likelihood top-k run");
  AddTextOptions(retrieve_cmd, text, true);
  retrieve_cmd->add_option("--mu", mu, "Dirichlet prior")->check(CLI::PositiveNumber);
  retrieve_cmd->add_option("--k", k, "Depth")->check(CLI::PositiveNumber);
  retrieve_cmd->add_option("--tag", tag, "Run tag");
  retrieve_cmd->add_option("--split", split, "all, dev or test")
      ->check(CLI::IsMember({"all", "dev", "test"}));
  retrieve_cmd->add_option("--seed", seed, "Split seed");
  retrieve_cmd->add_option("--dev-fraction", dev_fraction, "Dev share of the split");
  retrieve_cmd->add_option("--out", out_path, "Run file")->required();

  auto* extract_cmd = app.add_subcommand("extract", "Extract diagnostic datasets from run pools");
  AddTextOptions(extract_cmd, text, true);
  AddAxiomParams(extract_cmd, params);
  extract_cmd->add_option("--run", run_path, "Run providing the pools")->required();
  extract_cmd->add_option("--axiom", axiom_names, "Axiom name(s) or 'all'");
  extract_cmd->add_option("--pool-depth", k, "Pool depth")->check(CLI::PositiveNumber);
  extract_cmd->add_option("--vectors", vectors, "Term vectors (needed for STMC1-3)");
  auto* ex_out = extract_cmd->add_option("--out", out_path, "Dataset file (single axiom)");
  auto* ex_dir = extract_cmd->add_option("--out-dir", out_dir, "Directory for <AXIOM>.tsv files");
  ex_out->excludes(ex_dir);
  extract_cmd->add_option("--generated", generated_out, "LNC2 generated-document corpus");

  auto* lnc2_cmd = app.add_subcommand("gen-lnc2", "Generate LNC2 duplicated documents");
  AddTextOptions(lnc2_cmd, text, true);
  lnc2_cmd->add_option("--run", run_path, "Run providing the pools")->required();
  lnc2_cmd->add_option("--pool-depth", k, "Pool depth")->check(CLI::PositiveNumber);
  lnc2_cmd->add_option("--max-tokens", params.max_tokens, "Duplicate length cap");
  lnc2_cmd->add_option("--out", out_path, "Dataset file")->required();
  lnc2_cmd->add_option("--generated", generated_out, "Generated-document corpus")->required();

  auto* ql_cmd = app.add_subcommand("score-ql", "Score dataset documents with query likelihood");
  AddTextOptions(ql_cmd, text, true);
  ql_cmd->add_option("--dataset", datasets, "Dataset file(s)");
  ql_cmd->add_option("--generated", generated, "Generated-document corpus file(s)");
  ql_cmd->add_option("--run", run_path, "Score every row of this run instead");
  ql_cmd->add_option("--mu", mu, "Dirichlet prior")->check(CLI::PositiveNumber);
  ql_cmd->add_option("--out", out_path, "Score table TSV")->required();

  auto* ext_cmd = app.add_subcommand("score-ext", "Score dataset documents with an external scorer");
  AddTextOptions(ext_cmd, text, true);
  ext_cmd->add_option("--dataset", datasets, "Dataset file(s)");
  ext_cmd->add_option("--generated", generated, "Generated-document corpus file(s)");
  ext_cmd->add_option("--run", run_path, "Score every row of this run instead");
  ext_cmd->add_option("--scorer", scorer_cmd, "Scorer command line")->required();
  ext_cmd->add_option("--out", out_path, "Score table TSV")->required();

  auto* diag_cmd = app.add_subcommand("diagnose", "Fulfilment and agreement report");
  diag_cmd->add_option("--dataset", datasets, "Dataset file(s)")->required();
  diag_cmd->add_option("--generated", generated, "Generated-document corpus file(s)");
  diag_cmd->add_option("--scores", score_specs, "NAME=score table or run");
  diag_cmd->add_option("--qrels", qrels_path, "Qrels for relevance agreement");
  diag_cmd->add_option("--run", run_specs, "NAME=run for effectiveness columns");
  diag_cmd->add_option("--epsilon", params.epsilon, "Score tie tolerance");
  diag_cmd->add_option("--gain", gain_name, "linear or exponential");
  diag_cmd->add_option("--out-csv", out_csv, "CSV report");
  diag_cmd->add_option("--out-json", out_json, "JSON report");

  auto* eval_cmd = app.add_subcommand("eval", "nDCG@10, nDCG@100 and MRR of runs");
  eval_cmd->add_option("--qrels", qrels_path, "Qrels")->required();
  eval_cmd->add_option("--run", run_specs, "NAME=run")->required();
  eval_cmd->add_option("--gain", gain_name, "linear or exponential");
  eval_cmd->add_option("--out-csv", out_csv, "CSV output");

  auto* overlap_cmd = app.add_subcommand("overlap-report", "nDCG by query/document term overlap");
  AddTextOptions(overlap_cmd, text, true);
  overlap_cmd->add_option("--qrels", qrels_path, "Qrels")->required();
  overlap_cmd->add_option("--run", run_specs, "NAME=run")->required();
  overlap_cmd->add_flag("--restrict-to-pool", restrict_to_pool,
                        "Only queries whose relevant document is in the model's pool");
  overlap_cmd->add_option("--pool-depth", k, "Pool depth")->check(CLI::PositiveNumber);
  overlap_cmd->add_option("--ndcg-k", ndcg_k, "nDCG cutoff")->check(CLI::PositiveNumber);
  overlap_cmd->add_option("--gain", gain_name, "linear or exponential");
  overlap_cmd->add_option("--out-csv", out_csv, "CSV output");
  overlap_cmd->add_option("--out-json", out_json, "JSON output");

  std::vector<std::string> argv_storage{"axiodiag"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    ReportError(err, ErrorKind::kUsage, e.what());
    return static_cast<int>(ErrorKind::kUsage);
  }

  try {
    params.validate();
    const auto tok = text.tokenizer();

    if (*index_cmd) {
      const auto corpus = load_corpus(text.corpus, tok);
      const auto built = build_index(corpus.documents());
      nlohmann::ordered_json j;
      j["num_docs"] = built.stats.num_docs();
      j["total_tokens"] = built.stats.total_tokens();
      j["vocabulary"] = built.index.num_terms();
      j["mean_doc_length"] = built.stats.num_docs()
                                 ? static_cast<double>(built.stats.total_tokens()) /
                                       static_cast<double>(built.stats.num_docs())
                                 : 0.0;
      OpenOutput(out_path) << j.dump(2) << '\n';
    } else if (*retrieve_cmd) {
      const auto corpus = load_corpus(text.corpus, tok);
      const auto queries = load_queries(text.queries, tok);
      const auto built = build_index(corpus.documents());
      std::vector<Query> selected(queries.queries().begin(), queries.queries().end());
      if (split != "all") {
        auto parts = split_queries(selected, seed, dev_fraction);
        selected = split == "dev" ? std::move(parts.dev) : std::move(parts.test);
      }
      std::vector<RunRow> rows;
      for (const auto& q : selected) {
        append_ranking(rows, q.id, retrieve_topk(q, k, built.index, built.stats, mu), tag);
      }
      write_run(out_path, rows);
    } else if (*extract_cmd || *lnc2_cmd) {
      const auto corpus = load_corpus(text.corpus, tok);
      const auto queries = load_queries(text.queries, tok);
      const auto run = load_run(run_path);
      for (const auto& w : run.warnings) err << "warning: " << w << '\n';
      const auto pools = pools_from_run(run, k);
      const auto axioms = *lnc2_cmd ? std::vector<AxiomId>{AxiomId::kLNC2} : ParseAxioms(axiom_names);
      if (*extract_cmd && out_path.empty() && out_dir.empty()) {
        throw UsageError("extract needs --out or --out-dir");
      }
      if (!out_path.empty() && axioms.size() != 1) {
        throw UsageError("--out takes a single axiom; use --out-dir");
      }
      const auto built = build_index(corpus.documents());
      std::optional<EmbeddingTable> table;
      const bool semantic = std::any_of(axioms.begin(), axioms.end(), needs_embeddings);
      if (semantic) {
        if (vectors.empty()) throw UsageError("STMC axioms need --vectors");
        table = load_embeddings<double>(vectors);
      }
      ExtractionInputs in;
      in.queries = &queries;
      in.corpus = &corpus;
      in.index = &built.index;
      in.embeddings = table ? &*table : nullptr;
      in.idf = collection_idf(built.stats);
      in.params = params;
      in.threads = threads;
      for (const auto axiom : axioms) {
        const auto instances = extract(axiom, pools, in);
        const std::string name(axiom_name(axiom));
        std::filesystem::path target =
            out_path.empty() ? std::filesystem::path(out_dir) / (name + ".tsv") : std::filesystem::path(out_path);
        if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
        write_dataset(target, instances);
        if (axiom == AxiomId::kLNC2) {
          std::filesystem::path gen = generated_out.empty()
                                          ? std::filesystem::path(target).replace_extension(".generated.tsv")
                                          : std::filesystem::path(generated_out);
          write_generated_corpus(gen, instances);
        }
        out << name << '\t' << instances.size() << '\n';
      }
    } else if (*ql_cmd || *ext_cmd) {
      const auto corpus = load_corpus(text.corpus, tok);
      const auto queries = load_queries(text.queries, tok);
      std::vector<ScoreRequest> requests;
      if (!run_path.empty()) {
        if (!datasets.empty()) throw UsageError("give either --dataset or --run");
        requests = score_requests(load_run(run_path));
      } else {
        if (datasets.empty()) throw UsageError("give --dataset or --run");
        requests = score_requests(LoadDatasets(datasets, generated));
      }
      ScoreTable table;
      if (*ql_cmd) {
        const auto built = build_index(corpus.documents());
        table = score_with_ql(requests, queries, built.index, built.stats, mu);
      } else {
        table = score_external(requests, queries, corpus, ExternalScorer{SplitCommand(scorer_cmd)});
      }
      write_scores(out_path, table);
    } else if (*diag_cmd) {
      std::map<std::string, ScoreTable> tables;
      for (const auto& spec : score_specs) {
        auto [name, path] = NamedPath(spec);
        if (tables.count(name)) throw UsageError("duplicate model name '" + name + "'");
        tables.emplace(name, LoadScoreSource(path));
      }
      if (tables.empty()) throw UsageError("no score table");
      std::map<AxiomId, std::vector<DiagnosticInstance>> by_axiom;
      for (auto& inst : LoadDatasets(datasets, generated)) by_axiom[inst.axiom].push_back(std::move(inst));
      std::optional<Qrels> qrels;
      if (!qrels_path.empty()) qrels = load_qrels(qrels_path);
      auto report = diagnose(by_axiom, tables, qrels ? &*qrels : nullptr, params);
      if (!run_specs.empty()) {
        if (!qrels) throw UsageError("--run needs --qrels");
        for (const auto& spec : run_specs) {
          auto [name, path] = NamedPath(spec);
          report.effectiveness[name] = evaluate_run(load_run(path), *qrels, ParseGain(gain_name));
        }
      }
      if (!out_csv.empty()) write_report_csv(out_csv, report);
      if (!out_json.empty()) write_report_json(out_json, report);
      for (const auto& row : report.axioms) {
        for (const auto& [model, frac] : row.fulfilment) {
          out << axiom_name(row.axiom) << '\t' << model << '\t' << row.dataset_size << '\t'
              << (frac ? format_score(*frac) : "-") << '\n';
        }
      }
    } else if (*eval_cmd) {
      const auto qrels = load_qrels(qrels_path);
      std::map<std::string, Effectiveness> results;
      for (const auto& spec : run_specs) {
        auto [name, path] = NamedPath(spec);
        results[name] = evaluate_run(load_run(path), qrels, ParseGain(gain_name));
      }
      if (!out_csv.empty()) write_effectiveness_csv(out_csv, results);
      for (const auto& [name, e] : results) {
        out << name << "\tqueries=" << e.num_queries << "\tndcg@10=" << format_score(e.ndcg_at_10)
            << "\tndcg@100=" << format_score(e.ndcg_at_100) << "\tmrr=" << format_score(e.mrr) << '\n';
      }
    } else if (*overlap_cmd) {
      const auto corpus = load_corpus(text.corpus, tok);
      const auto queries = load_queries(text.queries, tok);
      const auto qrels = load_qrels(qrels_path);
      std::map<std::string, RunFile> runs;
      for (const auto& spec : run_specs) {
        auto [name, path] = NamedPath(spec);
        runs.emplace(name, load_run(path));
      }
      // Restrict to the queries that have a run; the query file may hold more.
      std::vector<Query> evaluated;
      for (const auto& q : queries.queries()) {
        const bool ranked = std::any_of(runs.begin(), runs.end(), [&](const auto& r) {
          const auto ids = r.second.query_ids();
          return std::find(ids.begin(), ids.end(), q.id) != ids.end();
        });
        if (ranked) evaluated.push_back(q);
      }
      const auto report = overlap_split_report(evaluated, corpus, qrels, runs, restrict_to_pool, k,
                                               ndcg_k, ParseGain(gain_name));
      if (!report.excluded.empty()) {
        err << "note: " << report.excluded.size() << " queries without a relevant document excluded\n";
      }
      if (!out_csv.empty()) write_overlap_csv(out_csv, report);
      if (!out_json.empty()) write_overlap_json(out_json, report);
    }
  } catch (const Error& e) {
    ReportError(err, e.kind(), e.what());
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    ReportError(err, ErrorKind::kData, e.what());
    return static_cast<int>(ErrorKind::kData);
  }
  return 0;
}

}  // namespace axiodiag
