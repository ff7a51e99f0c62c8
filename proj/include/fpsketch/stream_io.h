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

// Reading "key,value" streams from CSV text.

#ifndef FPSKETCH_STREAM_IO_H_
#define FPSKETCH_STREAM_IO_H_

#include <istream>
#include <string>
#include <vector>

#include "absl/functional/function_ref.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fpsketch/sketch.h"

namespace fpsketch {

// Parses `key,value` lines and hands each item to `sink` as it is read.
// A non-numeric first line is taken as a header; blank lines and lines
// starting with '#' are skipped. Errors name `source` and the line number.
absl::Status ReadStreamCsv(std::istream& in, const std::string& source,
                           absl::FunctionRef<absl::Status(const StreamItem&)> sink);

absl::StatusOr<std::vector<StreamItem>> ReadStreamCsv(std::istream& in,
                                                      const std::string& source);

// Opens `path` and reads it; kNotFound when the file cannot be opened.
absl::StatusOr<std::vector<StreamItem>> LoadStreamCsvFile(const std::string& path);

}  // namespace fpsketch

#endif  // FPSKETCH_STREAM_IO_H_
