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

#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace axiodiag::detail {

/// Child process with piped stdin and stdout; stderr is inherited.
class Subprocess {
 public:
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  /// Writes all of `data`; false once the child has closed its stdin.
  bool write_all(std::string_view data);
  void close_stdin();

  /// Next line without the newline; false at end of stream.
  bool read_line(std::string& line);

  /// Waits for exit and returns the exit status (128 + signal if killed).
  int wait();

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
  bool eof_ = false;
  bool waited_ = false;
  int status_ = 0;
};

}  // namespace axiodiag::detail
