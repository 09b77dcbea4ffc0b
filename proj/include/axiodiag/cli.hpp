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

#include <ostream>
#include <span>
#include <string>

namespace axiodiag {

/// Runs one subcommand (`index`, `retrieve`, `extract`, `gen-lnc2`,
/// `score-ql`, `score-ext`, `diagnose`, `eval`, `overlap-report`).
/// `args` excludes the program name. Returns the exit status: 0 ok, 1 usage,
/// 2 data error, 3 protocol error. Errors are reported on `err` as a single
/// line `error: kind=<kind> msg=<json string>`.
int run_subcommand(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace axiodiag
