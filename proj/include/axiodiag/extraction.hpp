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

#include "axiodiag/axioms.hpp"
#include "axiodiag/corpus.hpp"
#include "axiodiag/embeddings.hpp"
#include "axiodiag/index.hpp"
#include "axiodiag/run_file.hpp"

namespace axiodiag {

/// Ranked documents retrieved for one query.
struct CandidatePool {
  std::string query_id;
  std::vector<std::string> doc_ids;
};

/// Pools from the first `depth` rows of each query in `run`.
std::vector<CandidatePool> pools_from_run(const RunFile& run, std::size_t depth);

/// Everything an axiom predicate may look at. All pointers must outlive the
/// extraction; `embeddings` is only required for the STMC axioms.
struct ExtractionInputs {
  const QuerySet* queries = nullptr;
  const Corpus* corpus = nullptr;
  const InvertedIndex* index = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  IdfFn idf;
  AxiomParams params;
  unsigned threads = 1;
};

/// All instances of `axiom` found in the pools, sorted by (query_id, doc_ids).
/// Every ordered pair (TFC2: ordered triple) of each pool is considered; LNC2
/// emits one instance per pooled document that can be duplicated.
std::vector<DiagnosticInstance> extract(AxiomId axiom, std::span<const CandidatePool> pools,
                                        const ExtractionInputs& in);

/// Nested-loop reference for `extract`, calling the token-level predicates on
/// every tuple. Only meant for small inputs.
std::vector<DiagnosticInstance> brute_force_extract(AxiomId axiom,
                                                    std::span<const CandidatePool> pools,
                                                    const ExtractionInputs& in);

/// `axiom \t query_id \t doc_id_0 \t doc_id_1 [\t doc_id_2]` per line.
void write_dataset(const std::filesystem::path& path,
                   std::span<const DiagnosticInstance> instances);
/// Generated LNC2 documents are not restored; see attach_generated.
std::vector<DiagnosticInstance> read_dataset(const std::filesystem::path& path);

/// Generated documents of all instances as a corpus TSV, deduplicated by id
/// and sorted.
void write_generated_corpus(const std::filesystem::path& path,
                            std::span<const DiagnosticInstance> instances);
/// Fills `generated_docs` of LNC2 instances from a sidecar corpus.
void attach_generated(std::vector<DiagnosticInstance>& instances, const Corpus& generated);

}  // namespace axiodiag
