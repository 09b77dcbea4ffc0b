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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "axiodiag/embeddings.hpp"
#include "support/synthetic.hpp"

using namespace axiodiag;

namespace {

EmbeddingTable Table2d(std::initializer_list<std::pair<const char*, std::pair<double, double>>> rows) {
  EmbeddingTable t(2);
  for (const auto& [term, v] : rows) t.insert(term, Eigen::Vector2d(v.first, v.second));
  return t;
}

Tokens T(std::initializer_list<const char*> xs) { return Tokens(xs.begin(), xs.end()); }

std::filesystem::path WriteTemp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("axiodiag_emb_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("sigma") {
  const auto e = Table2d({{"dog", {1, 0}}, {"car", {0, 1}}});
  CHECK(sigma("dog", "car", e) == 0.0);
  CHECK(sigma("dog", "dog", e) == 1.0);
  CHECK_FALSE(sigma("dog", "unknown", e).has_value());
}

TEST_CASE("sigma_prime") {
  const auto e = Table2d({{"dog", {1, 0}}, {"a", {1, 0}}, {"b", {0, 1}}});
  CHECK(sigma_prime(T({"dog"}), T({"dog"}), e) == 1.0);
  CHECK(*sigma_prime(T({"a", "b"}), T({"a"}), e) == doctest::Approx(0.7071067811865475).epsilon(1e-15));
  CHECK_FALSE(sigma_prime(T({"unknown"}), T({"a"}), e).has_value());
  CHECK_FALSE(sigma_prime(T({}), T({"a"}), e).has_value());
  // OOV tokens do not dilute the mean.
  CHECK(sigma_prime(T({"a", "zzz", "b"}), T({"a"}), e) == sigma_prime(T({"a", "b"}), T({"a"}), e));
}

TEST_CASE("zero vectors make similarity undefined") {
  auto e = Table2d({{"a", {1, 0}}, {"z", {0, 0}}, {"na", {-1, 0}}});
  CHECK_FALSE(sigma("a", "z", e).has_value());
  CHECK_FALSE(sigma_prime(T({"a", "na"}), T({"a"}), e).has_value());
}

TEST_CASE("table insertion and dimension checks") {
  EmbeddingTable e(3);
  e.insert("x", Eigen::Vector3d(1, 2, 3));
  e.insert("x", Eigen::Vector3d(3, 2, 1));
  CHECK(e.size() == 1);
  CHECK(e.vector(*e.column("x"))[0] == 3.0);
  CHECK_THROWS_AS(e.insert("y", Eigen::Vector2d(1, 2)), Error);
  CHECK_THROWS_AS(EmbeddingTable(0), Error);
}

TEST_CASE("similarity properties on random tables") {
  std::mt19937_64 rng(21);
  std::vector<std::string> terms;
  for (int i = 0; i < 10; ++i) terms.push_back("t" + std::to_string(i));
  for (int trial = 0; trial < 20; ++trial) {
    const auto e = testing::random_table(rng, terms, 1 + static_cast<Eigen::Index>(rng() % 6));
    for (const auto& a : terms) {
      CHECK(sigma(a, a, e) == 1.0);
      for (const auto& b : terms) {
        const auto ab = sigma(a, b, e);
        REQUIRE(ab.has_value());
        CHECK(ab == sigma(b, a, e));
        CHECK(*ab >= -1.0);
        CHECK(*ab <= 1.0);
      }
    }
    for (int k = 0; k < 50; ++k) {
      Tokens t1, t2;
      for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) t1.push_back(terms[rng() % terms.size()]);
      for (std::size_t i = 0, n = 1 + rng() % 6; i < n; ++i) t2.push_back(terms[rng() % terms.size()]);
      const auto s = sigma_prime(t1, t2, e);
      REQUIRE(s.has_value());
      CHECK(s == sigma_prime(t2, t1, e));
      CHECK(*s >= -1.0);
      CHECK(*s <= 1.0);
      CHECK(sigma_prime(t1, t1, e) == 1.0);
      Tokens doubled = t1;
      doubled.insert(doubled.end(), t1.begin(), t1.end());
      CHECK(sigma_prime(doubled, t2, e) == s);
      Tokens shuffled = t1;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(sigma_prime(shuffled, t2, e) == s);
    }
  }
}

TEST_CASE("load_embeddings") {
  const auto plain = load_embeddings(WriteTemp("plain.txt", "a 1 0\nb 0 1\n"));
  CHECK(plain.dim() == 2);
  CHECK(plain.size() == 2);
  const auto header = load_embeddings(WriteTemp("header.txt", "2 3\na 1 0 0\nb 0 1 0.5\n"));
  CHECK(header.dim() == 3);
  CHECK(header.vector(*header.column("b"))[2] == 0.5);
  CHECK_THROWS_AS(load_embeddings(WriteTemp("count.txt", "3 2\na 1 0\nb 0 1\n")), Error);
  CHECK_THROWS_AS(load_embeddings(WriteTemp("ragged.txt", "a 1 0\nb 0 1 2\n")), Error);
  CHECK_THROWS_AS(load_embeddings(WriteTemp("nan.txt", "a 1 x\n")), Error);
  CHECK_THROWS_AS(load_embeddings(WriteTemp("empty.txt", "")), Error);
  const auto single = load_embeddings<float>(WriteTemp("float.txt", "a 0.5 0.25\n"));
  CHECK(single.vector(0)[1] == 0.25f);
}
