// Copyright 2026 The fpsketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The fpsketch command-line tool as a library function, so tests can drive it
// with in-memory streams.

#ifndef FPSKETCH_TOOLS_CLI_H_
#define FPSKETCH_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace fpsketch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitInvalidArgument = 3,
  kExitIo = 4,
  kExitDataFormat = 5,
};

// `args` excludes the program name. Binary and CSV outputs go to `out`
// unless a file is named; diagnostics and the run log go to `err` unless
// --log names a file.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace fpsketch::cli

#endif  // FPSKETCH_TOOLS_CLI_H_
