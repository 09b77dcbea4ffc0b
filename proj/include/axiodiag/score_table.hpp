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

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "axiodiag/error.hpp"

namespace axiodiag {

/// (query id, doc id) -> S(Q, D). Ordered so serialization is canonical.
class ScoreTable {
 public:
  using Key = std::pair<std::string, std::string>;

  /// Throws a data error on a non-finite score or a conflicting duplicate.
  void set(std::string query_id, std::string doc_id, double score) {
    if (!std::isfinite(score)) {
      throw DataError("non-finite score for (" + query_id + ", " + doc_id + ")");
    }
    auto [it, fresh] = entries_.try_emplace(Key{std::move(query_id), std::move(doc_id)}, score);
    if (!fresh && it->second != score) {
      throw DataError("conflicting scores for (" + it->first.first + ", " + it->first.second + ")");
    }
  }

  std::optional<double> find(std::string_view query_id, std::string_view doc_id) const {
    const auto it = entries_.find(Key{std::string(query_id), std::string(doc_id)});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  /// Throws a data error naming the missing (query_id, doc_id).
  double at(std::string_view query_id, std::string_view doc_id) const {
    if (const auto s = find(query_id, doc_id)) return *s;
    throw DataError("missing score for (" + std::string(query_id) + ", " + std::string(doc_id) + ")");
  }

  bool contains(std::string_view query_id, std::string_view doc_id) const {
    return find(query_id, doc_id).has_value();
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<Key, double>& entries() const { return entries_; }

  /// New table with `fn` applied to every score.
  template <typename Fn>
  ScoreTable transformed(Fn&& fn) const {
    ScoreTable out;
    for (const auto& [key, s] : entries_) out.set(key.first, key.second, fn(s));
    return out;
  }

 private:
  std::map<Key, double> entries_;
};

}  // namespace axiodiag
