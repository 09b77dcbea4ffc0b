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

#include "axiodiag/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "axiodiag/error.hpp"
#include "axiodiag/parallel.hpp"

namespace axiodiag {

namespace {

using Counts = std::vector<std::size_t>;
using Vector = EmbeddingTable::Vector;

// Per-document features for one query, computed once per pool.
struct Profile {
  const Document* doc = nullptr;
  Counts qtf;  // c(q, D) per distinct query term
  std::size_t qsum = 0;
  std::size_t cover = 0;
  std::size_t length = 0;
  std::size_t rem_mass = 0;  // number of non-query tokens
  // Non-query term counts sorted by term (LNC1).
  std::vector<std::pair<std::string_view, std::size_t>> rem_counts;
  std::optional<std::size_t> gamma;  // TP
  std::optional<Vector> rem_mean;    // STMC
  std::optional<double> sim_to_query;
};

struct CountsHash {
  std::size_t operator()(const Counts& c) const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (const auto v : c) h = (h ^ v) * 0x100000001b3ull;
    return h;
  }
};

std::size_t Gap(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

void CheckPool(const CandidatePool& pool, const ExtractionInputs& in) {
  std::unordered_set<std::string_view> seen;
  for (const auto& id : pool.doc_ids) {
    if (!seen.insert(id).second) {
      throw DataError("duplicate document " + id + " in pool of query " + pool.query_id);
    }
    in.corpus->at(id);  // throws naming the id
  }
}

void CheckInputs(AxiomId axiom, const ExtractionInputs& in) {
  if (!in.queries || !in.corpus) throw UsageError("extraction needs queries and a corpus");
  if (axiom == AxiomId::kTP && !in.index) throw UsageError("TP extraction needs an index");
  if (axiom == AxiomId::kMTDC && !in.idf) throw UsageError("M-TDC extraction needs IDF values");
  if (needs_embeddings(axiom) && !in.embeddings) {
    throw UsageError(std::string(axiom_name(axiom)) + " extraction needs embeddings");
  }
  in.params.validate();
}

DiagnosticInstance Pair(AxiomId axiom, const std::string& qid, const Profile& a,
                        const Profile& b) {
  return DiagnosticInstance{axiom, qid, {a.doc->id, b.doc->id}, {}};
}

class QueryExtractor {
 public:
  QueryExtractor(AxiomId axiom, const Query& query, const CandidatePool& pool,
                 const ExtractionInputs& in)
      : axiom_(axiom), query_(query), in_(in), qtc_(count_query_terms(query.tokens)) {
    profiles_.reserve(pool.doc_ids.size());
    for (const auto& id : pool.doc_ids) profiles_.push_back(MakeProfile(in.corpus->at(id)));
  }

  std::vector<DiagnosticInstance> Run() {
    switch (axiom_) {
      case AxiomId::kTFC1: Tfc1(); break;
      case AxiomId::kTFC2: Tfc2(); break;
      case AxiomId::kMTDC: Mtdc(); break;
      case AxiomId::kLNC1: Lnc1(); break;
      case AxiomId::kLNC2: Lnc2(); break;
      case AxiomId::kTP: Tp(); break;
      case AxiomId::kSTMC1: Stmc1(); break;
      case AxiomId::kSTMC2: Stmc2(); break;
      case AxiomId::kSTMC3: Stmc3(); break;
    }
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  Profile MakeProfile(const Document& doc) const {
    Profile p;
    p.doc = &doc;
    p.length = doc.length();
    p.qtf.assign(qtc_.terms.size(), 0);
    std::map<std::string_view, std::size_t> rem;
    for (const auto& tok : doc.tokens) {
      const auto it = std::find(qtc_.terms.begin(), qtc_.terms.end(), tok);
      if (it != qtc_.terms.end()) {
        ++p.qtf[static_cast<std::size_t>(it - qtc_.terms.begin())];
      } else {
        ++rem[tok];
      }
    }
    p.qsum = std::accumulate(p.qtf.begin(), p.qtf.end(), std::size_t{0});
    p.cover = static_cast<std::size_t>(std::count_if(p.qtf.begin(), p.qtf.end(),
                                                     [](auto c) { return c > 0; }));
    p.rem_mass = p.length - p.qsum;

    if (axiom_ == AxiomId::kLNC1) p.rem_counts.assign(rem.begin(), rem.end());
    if (axiom_ == AxiomId::kTP) p.gamma = min_query_pair_distance(query_, doc.id, *in_.index);
    if (needs_embeddings(axiom_)) {
      p.rem_mean = in_.embeddings->mean(non_query_tokens(query_, doc.tokens));
      if (p.rem_mean && QueryMean()) p.sim_to_query = cosine(*p.rem_mean, *QueryMean());
    }
    return p;
  }

  const std::optional<Vector>& QueryMean() const {
    if (!query_mean_ready_) {
      query_mean_ = in_.embeddings->mean(query_.tokens);
      query_mean_ready_ = true;
    }
    return query_mean_;
  }

  // Calls fn(i, j) for every ordered pair i != j whose lengths differ by at
  // most `gap`.
  template <typename Fn>
  void ForLengthWindow(double gap, Fn&& fn) const {
    std::vector<std::size_t> order(profiles_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return profiles_[a].length < profiles_[b].length;
    });
    std::size_t lo = 0;
    for (std::size_t x = 0; x < order.size(); ++x) {
      const auto len = profiles_[order[x]].length;
      while (static_cast<double>(len - profiles_[order[lo]].length) > gap) ++lo;
      for (std::size_t y = lo; y < x; ++y) {
        fn(order[x], order[y]);
        fn(order[y], order[x]);
      }
    }
  }

  // Calls fn(i, j) for every ordered pair i != j sharing the same key.
  template <typename Key, typename KeyFn, typename Fn>
  void ForSameKey(KeyFn&& key_of, Fn&& fn) const {
    std::map<Key, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < profiles_.size(); ++i) groups[key_of(profiles_[i])].push_back(i);
    for (const auto& [key, members] : groups) {
      for (const auto i : members) {
        for (const auto j : members) {
          if (i != j) fn(i, j);
        }
      }
    }
  }

  void Emit(std::size_t i, std::size_t j) {
    out_.push_back(Pair(axiom_, query_.id, profiles_[i], profiles_[j]));
  }

  void Tfc1() {
    ForLengthWindow(static_cast<double>(in_.params.delta_len), [&](std::size_t i, std::size_t j) {
      const auto& a = profiles_[i];
      const auto& b = profiles_[j];
      if (a.qsum <= b.qsum) return;
      for (std::size_t t = 0; t < a.qtf.size(); ++t) {
        if (a.qtf[t] < b.qtf[t]) return;
      }
      Emit(i, j);
    });
  }

  void Tfc2() {
    std::unordered_map<Counts, std::vector<std::size_t>, CountsHash> by_counts;
    for (std::size_t i = 0; i < profiles_.size(); ++i) by_counts[profiles_[i].qtf].push_back(i);
    const auto delta = in_.params.delta_len;
    Counts target(qtc_.terms.size());
    ForLengthWindow(static_cast<double>(delta), [&](std::size_t i, std::size_t j) {
      const auto& d1 = profiles_[i];
      const auto& d2 = profiles_[j];
      if (!(d2.qsum > d1.qsum && d1.qsum > 0)) return;
      // D3 must hold exactly 2 * c(q, D2) - c(q, D1) of every query term.
      for (std::size_t t = 0; t < target.size(); ++t) {
        if (2 * d2.qtf[t] < d1.qtf[t]) return;
        target[t] = 2 * d2.qtf[t] - d1.qtf[t];
      }
      const auto it = by_counts.find(target);
      if (it == by_counts.end()) return;
      for (const auto k : it->second) {
        const auto& d3 = profiles_[k];
        if (Gap(d3.length, d1.length) > delta || Gap(d3.length, d2.length) > delta) continue;
        out_.push_back(DiagnosticInstance{axiom_, query_.id, {d1.doc->id, d2.doc->id, d3.doc->id}, {}});
      }
    });
  }

  void Mtdc() {
    std::vector<double> idfs;
    for (const auto& t : qtc_.terms) idfs.push_back(in_.idf(t));
    const auto delta = in_.params.delta_len;
    // Swaps preserve the total query-term mass.
    ForSameKey<std::size_t>([](const Profile& p) { return p.qsum; },
                            [&](std::size_t i, std::size_t j) {
      const auto& a = profiles_[i];
      const auto& b = profiles_[j];
      if (Gap(a.length, b.length) > delta) return;
      if (swaps_cover_differences(a.qtf, b.qtf, idfs, qtc_.counts)) Emit(i, j);
    });
  }

  void Lnc1() {
    ForSameKey<Counts>([](const Profile& p) { return p.qtf; }, [&](std::size_t i, std::size_t j) {
      // Some non-query term occurs exactly once more in D2 (= j) than in D1.
      const auto& r1 = profiles_[i].rem_counts;
      const auto& r2 = profiles_[j].rem_counts;
      std::size_t x = 0;
      for (const auto& [term, count] : r2) {
        while (x < r1.size() && r1[x].first < term) ++x;
        const std::size_t base = (x < r1.size() && r1[x].first == term) ? r1[x].second : 0;
        if (count == base + 1) {
          Emit(i, j);
          return;
        }
      }
    });
  }

  void Lnc2() {
    for (const auto& p : profiles_) {
      auto dup = lnc2_generate(*p.doc, in_.params);
      if (!dup) continue;
      DiagnosticInstance inst{axiom_, query_.id, {dup->doc.id, p.doc->id}, {}};
      inst.generated_docs.emplace(dup->doc.id, std::move(dup->doc.tokens));
      out_.push_back(std::move(inst));
    }
  }

  void Tp() {
    std::vector<std::size_t> defined;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      if (profiles_[i].gamma) defined.push_back(i);
    }
    std::sort(defined.begin(), defined.end(),
              [&](auto a, auto b) { return *profiles_[a].gamma < *profiles_[b].gamma; });
    for (std::size_t x = 0; x < defined.size(); ++x) {
      for (std::size_t y = x + 1; y < defined.size(); ++y) {
        if (*profiles_[defined[x]].gamma < *profiles_[defined[y]].gamma) Emit(defined[x], defined[y]);
      }
    }
  }

  void Stmc1() {
    ForSameKey<std::size_t>([](const Profile& p) { return p.cover; },
                            [&](std::size_t i, std::size_t j) {
      const auto& a = profiles_[i];
      const auto& b = profiles_[j];
      if (a.sim_to_query && b.sim_to_query && *a.sim_to_query > *b.sim_to_query) Emit(i, j);
    });
  }

  void Stmc2() {
    const double threshold = in_.params.delta_sim;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      const auto& a = profiles_[i];
      if (a.qsum == 0 || !a.rem_mean) continue;
      for (std::size_t j = 0; j < profiles_.size(); ++j) {
        const auto& b = profiles_[j];
        if (i == j || b.rem_mass <= a.qsum || !b.rem_mean) continue;
        const auto s = cosine(*a.rem_mean, *b.rem_mean);
        if (s && *s > threshold) Emit(i, j);
      }
    }
  }

  void Stmc3() {
    const double gap = in_.params.stmc3_delta_len;
    ForSameKey<std::size_t>([](const Profile& p) { return p.cover; },
                            [&](std::size_t i, std::size_t j) {
      const auto& a = profiles_[i];
      const auto& b = profiles_[j];
      if (static_cast<double>(Gap(a.length, b.length)) > gap || a.qsum <= b.qsum) return;
      if (a.sim_to_query && b.sim_to_query && *b.sim_to_query > *a.sim_to_query) Emit(i, j);
    });
  }

  AxiomId axiom_;
  const Query& query_;
  const ExtractionInputs& in_;
  QueryTermCounts qtc_;
  std::vector<Profile> profiles_;
  mutable std::optional<Vector> query_mean_;
  mutable bool query_mean_ready_ = false;
  std::vector<DiagnosticInstance> out_;
};

template <typename PerPool>
std::vector<DiagnosticInstance> ForEachPool(AxiomId axiom, std::span<const CandidatePool> pools,
                                            const ExtractionInputs& in, PerPool&& per_pool) {
  CheckInputs(axiom, in);
  std::vector<std::vector<DiagnosticInstance>> per_query(pools.size());
  parallel_for(pools.size(), in.threads, [&](std::size_t p) {
    CheckPool(pools[p], in);
    per_query[p] = per_pool(in.queries->at(pools[p].query_id), pools[p]);
  });
  std::vector<DiagnosticInstance> out;
  for (auto& part : per_query) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All-pairs minimum distance between occurrences of distinct query terms.
std::optional<std::size_t> NaiveGamma(const Query& q, const Tokens& doc) {
  std::optional<std::size_t> best;
  const auto is_query_term = [&](const std::string& t) {
    return std::find(q.tokens.begin(), q.tokens.end(), t) != q.tokens.end();
  };
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!is_query_term(doc[i])) continue;
    for (std::size_t j = i + 1; j < doc.size(); ++j) {
      if (doc[j] == doc[i] || !is_query_term(doc[j])) continue;
      if (!best || j - i < *best) best = j - i;
    }
  }
  return best;
}

}  // namespace

std::vector<CandidatePool> pools_from_run(const RunFile& run, std::size_t depth) {
  std::vector<CandidatePool> pools;
  std::map<std::string, std::size_t, std::less<>> slot;
  for (const auto& row : run.rows) {
    auto [it, fresh] = slot.try_emplace(row.query_id, pools.size());
    if (fresh) pools.push_back(CandidatePool{row.query_id, {}});
    auto& pool = pools[it->second];
    if (pool.doc_ids.size() < depth) pool.doc_ids.push_back(row.doc_id);
  }
  return pools;
}

std::vector<DiagnosticInstance> extract(AxiomId axiom, std::span<const CandidatePool> pools,
                                        const ExtractionInputs& in) {
  return ForEachPool(axiom, pools, in, [&](const Query& q, const CandidatePool& pool) {
    return QueryExtractor(axiom, q, pool, in).Run();
  });
}

std::vector<DiagnosticInstance> brute_force_extract(AxiomId axiom,
                                                    std::span<const CandidatePool> pools,
                                                    const ExtractionInputs& in) {
  const auto& params = in.params;
  return ForEachPool(axiom, pools, in, [&](const Query& q, const CandidatePool& pool) {
    std::vector<const Document*> docs;
    for (const auto& id : pool.doc_ids) docs.push_back(&in.corpus->at(id));
    std::vector<DiagnosticInstance> out;
    const auto n = docs.size();

    if (axiom == AxiomId::kLNC2) {
      for (const auto* d : docs) {
        if (auto dup = lnc2_generate(*d, params)) {
          DiagnosticInstance inst{axiom, q.id, {dup->doc.id, d->id}, {}};
          inst.generated_docs.emplace(dup->doc.id, dup->doc.tokens);
          out.push_back(std::move(inst));
        }
      }
      return out;
    }
    if (axiom == AxiomId::kTFC2) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            if (i == j || j == k || i == k) continue;
            if (tfc2_eligible(q, *docs[i], *docs[j], *docs[k], params)) {
              out.push_back({axiom, q.id, {docs[i]->id, docs[j]->id, docs[k]->id}, {}});
            }
          }
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& d1 = *docs[i];
        const auto& d2 = *docs[j];
        bool ok = false;
        switch (axiom) {
          case AxiomId::kTFC1: ok = tfc1_eligible(q, d1, d2, params); break;
          case AxiomId::kMTDC: ok = mtdc_eligible(q, d1, d2, in.idf, params); break;
          case AxiomId::kLNC1: ok = lnc1_eligible(q, d1, d2); break;
          case AxiomId::kTP: {
            const auto g1 = NaiveGamma(q, d1.tokens);
            const auto g2 = NaiveGamma(q, d2.tokens);
            ok = g1 && g2 && *g1 < *g2;
            break;
          }
          case AxiomId::kSTMC1: ok = stmc1_eligible(q, d1, d2, *in.embeddings, params); break;
          case AxiomId::kSTMC2: ok = stmc2_eligible(q, d1, d2, *in.embeddings, params); break;
          case AxiomId::kSTMC3: ok = stmc3_eligible(q, d1, d2, *in.embeddings, params); break;
          default: break;
        }
        if (ok) out.push_back({axiom, q.id, {d1.id, d2.id}, {}});
      }
    }
    return out;
  });
}

void write_dataset(const std::filesystem::path& path,
                   std::span<const DiagnosticInstance> instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& inst : instances) {
    out << axiom_name(inst.axiom) << '\t' << inst.query_id;
    for (const auto& d : inst.doc_ids) out << '\t' << d;
    out << '\n';
  }
}

std::vector<DiagnosticInstance> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<DiagnosticInstance> out;
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
    const auto where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() < 4) throw DataError(where + ": expected at least 4 fields");
    const auto axiom = parse_axiom(fields[0]);
    if (!axiom) throw DataError(where + ": unknown axiom '" + fields[0] + "'");
    if (fields.size() != 2 + arity(*axiom)) {
      throw DataError(where + ": " + fields[0] + " needs " + std::to_string(arity(*axiom)) +
                      " documents");
    }
    DiagnosticInstance inst{*axiom, fields[1], {fields.begin() + 2, fields.end()}, {}};
    out.push_back(std::move(inst));
  }
  return out;
}

void write_generated_corpus(const std::filesystem::path& path,
                            std::span<const DiagnosticInstance> instances) {
  std::map<std::string, const Tokens*> docs;
  for (const auto& inst : instances) {
    for (const auto& [id, tokens] : inst.generated_docs) docs.emplace(id, &tokens);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [id, tokens] : docs) out << id << '\t' << join_tokens(*tokens) << '\n';
}

void attach_generated(std::vector<DiagnosticInstance>& instances, const Corpus& generated) {
  for (auto& inst : instances) {
    if (inst.axiom != AxiomId::kLNC2) continue;
    const auto& id = inst.doc_ids.front();
    inst.generated_docs[id] = generated.at(id).tokens;
  }
}

}  // namespace axiodiag
