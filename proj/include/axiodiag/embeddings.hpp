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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "axiodiag/error.hpp"

namespace axiodiag {

/// Cosine similarity, clamped to [-1, 1]; nullopt when either vector has zero
/// norm.
template <typename DerivedA, typename DerivedB>
std::optional<typename DerivedA::Scalar> cosine(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar aa = a.squaredNorm();
  const Scalar bb = b.squaredNorm();
  if (aa == Scalar(0) || bb == Scalar(0)) return std::nullopt;
  // sqrt(x * x) == x in IEEE arithmetic, so cos(v, v) is exactly 1.
  const Scalar c = a.dot(b) / std::sqrt(aa * bb);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

/// Term vectors stored column-wise in one dense matrix.
template <typename Scalar_>
class BasicEmbeddingTable {
 public:
  using Scalar = Scalar_;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicEmbeddingTable() = default;

  explicit BasicEmbeddingTable(Eigen::Index dim) : vectors_(dim, 0) {
    if (dim < 1) throw DataError("embedding dimension must be at least 1");
  }

  Eigen::Index dim() const { return vectors_.rows(); }
  Eigen::Index size() const { return vectors_.cols(); }
  bool empty() const { return vectors_.cols() == 0; }

  /// Adds or replaces the vector for `term`.
  template <typename Derived>
  void insert(const std::string& term, const Eigen::MatrixBase<Derived>& v) {
    if (v.size() != dim()) {
      throw DataError("embedding for '" + term + "' has dimension " +
                      std::to_string(v.size()) + ", expected " + std::to_string(dim()));
    }
    auto [it, fresh] = columns_.try_emplace(term, vectors_.cols());
    if (fresh) vectors_.conservativeResize(Eigen::NoChange, vectors_.cols() + 1);
    vectors_.col(it->second) = v.template cast<Scalar>();
  }

  std::optional<Eigen::Index> column(std::string_view term) const {
    const auto it = columns_.find(std::string(term));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

  auto vector(Eigen::Index col) const { return vectors_.col(col); }
  const Matrix& matrix() const { return vectors_; }

  /// Occurrence-weighted mean over in-vocabulary tokens; nullopt when no
  /// token has a vector. Tokens are aggregated per column and summed in
  /// column order, which makes the mean exactly invariant to token order and
  /// to uniform duplication.
  std::optional<Vector> mean(std::span<const std::string> tokens) const {
    std::map<Eigen::Index, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& tok : tokens) {
      if (const auto col = column(tok)) {
        ++counts[*col];
        ++total;
      }
    }
    if (total == 0) return std::nullopt;
    Vector sum = Vector::Zero(dim());
    for (const auto& [col, n] : counts) sum += static_cast<Scalar>(n) * vectors_.col(col);
    return Vector(sum / static_cast<Scalar>(total));
  }

 private:
  Matrix vectors_;
  std::unordered_map<std::string, Eigen::Index> columns_;
};

using EmbeddingTable = BasicEmbeddingTable<double>;

/// sigma(t1, t2): cosine similarity of two term vectors.
template <typename Scalar>
std::optional<Scalar> sigma(std::string_view t1, std::string_view t2,
                            const BasicEmbeddingTable<Scalar>& table) {
  const auto c1 = table.column(t1);
  const auto c2 = table.column(t2);
  if (!c1 || !c2) return std::nullopt;
  return cosine(table.vector(*c1), table.vector(*c2));
}

/// sigma'(T1, T2): cosine similarity of the two multiset mean vectors.
template <typename Scalar>
std::optional<Scalar> sigma_prime(std::span<const std::string> t1,
                                  std::span<const std::string> t2,
                                  const BasicEmbeddingTable<Scalar>& table) {
  const auto m1 = table.mean(t1);
  if (!m1) return std::nullopt;
  const auto m2 = table.mean(t2);
  if (!m2) return std::nullopt;
  return cosine(*m1, *m2);
}

/// Reads `term v1 ... vdim` lines; an optional leading `count dim` header is
/// detected and checked.
template <typename Scalar = double>
BasicEmbeddingTable<Scalar> load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  std::optional<BasicEmbeddingTable<Scalar>> table;
  std::optional<long long> declared_count;
  std::string line;
  std::size_t lineno = 0;
  std::vector<Scalar> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string term;
    fields >> term;
    values.clear();
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        values.push_back(static_cast<Scalar>(v));
      } catch (const std::exception&) {
        throw DataError(path.string() + ":" + std::to_string(lineno) +
                        ": non-numeric component '" + tok + "'");
      }
    }
    if (lineno == 1 && values.size() == 1) {
      // `count dim` header.
      try {
        std::size_t used = 0;
        declared_count = std::stoll(term, &used);
        if (used != term.size()) throw std::invalid_argument(term);
      } catch (const std::exception&) {
        throw DataError(path.string() + ":1: malformed header");
      }
      table.emplace(static_cast<Eigen::Index>(values[0]));
      continue;
    }
    if (values.empty()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": vector has no components");
    }
    if (!table) table.emplace(static_cast<Eigen::Index>(values.size()));
    if (static_cast<Eigen::Index>(values.size()) != table->dim()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table->dim()) + " components, got " +
                      std::to_string(values.size()));
    }
    table->insert(term, Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
                            values.data(), static_cast<Eigen::Index>(values.size())));
  }
  if (!table) throw DataError(path.string() + ": no vectors");
  if (declared_count && *declared_count != table->size()) {
    throw DataError(path.string() + ": header declares " + std::to_string(*declared_count) +
                    " vectors, found " + std::to_string(table->size()));
  }
  return std::move(*table);
}

}  // namespace axiodiag
