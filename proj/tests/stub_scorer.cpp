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

// Test double for the external scorer protocol. Modes:
//   const V     every score is V
//   overlap     fraction of distinct query words present in the document
//   doclen      number of words in the document
//   reverse     overlap scores, emitted in reverse order after end of input
//   garbage     like const 0, but the second response has a string score
//   drop        like const 0, but the last request gets no response
//   exit N      like const 0, then exits with status N
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

std::set<std::string> Words(const std::string& text) {
  std::istringstream in(text);
  std::set<std::string> out;
  for (std::string w; in >> w;) out.insert(w);
  return out;
}

std::size_t WordCount(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) return 64;
  const std::string mode = args[0];
  const double constant = mode == "const" && args.size() > 1 ? std::stod(args[1]) : 0.0;

  std::vector<nlohmann::json> pending;
  std::string line;
  std::size_t n = 0;
  while (std::getline(std::cin, line)) {
    const auto req = nlohmann::json::parse(line);
    nlohmann::json resp = {{"qid", req.at("qid")}, {"docid", req.at("docid")}};
    const std::string query = req.at("query");
    const std::string doc = req.at("doc");
    ++n;
    if (mode == "overlap" || mode == "reverse") {
      const auto q = Words(query);
      const auto d = Words(doc);
      std::size_t hit = 0;
      for (const auto& w : q) hit += d.count(w);
      resp["score"] = q.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(q.size());
    } else if (mode == "doclen") {
      resp["score"] = WordCount(doc);
    } else if (mode == "garbage" && n == 2) {
      resp["score"] = "high";
    } else {
      resp["score"] = constant;
    }
    pending.push_back(resp);
    if (mode != "reverse" && mode != "drop") {
      std::cout << resp.dump() << '\n' << std::flush;
      pending.clear();
    }
  }
  if (mode == "drop" && !pending.empty()) pending.pop_back();
  for (auto it = pending.rbegin(); it != pending.rend(); ++it) std::cout << it->dump() << '\n';
  std::cout.flush();
  if (mode == "exit" && args.size() > 1) return std::stoi(args[1]);
  return 0;
}
