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

#include "fpsketch/stream_io.h"

#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"
#include "fpsketch/status_macros.h"

namespace fpsketch {

absl::Status ReadStreamCsv(
    std::istream& in, const std::string& source,
    absl::FunctionRef<absl::Status(const StreamItem&)> sink) {
  std::string line;
  int64_t line_number = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view text = absl::StripAsciiWhitespace(line);
    if (text.empty() || text.front() == '#') continue;
    std::vector<absl::string_view> fields = absl::StrSplit(text, ',');
    const bool first = !seen_content;
    seen_content = true;
    StreamItem item;
    bool parsed = fields.size() == 2 &&
                  absl::SimpleAtoi(absl::StripAsciiWhitespace(fields[0]), &item.key) &&
                  absl::SimpleAtoi(absl::StripAsciiWhitespace(fields[1]), &item.value);
    if (!parsed) {
      double ignored;
      const bool numeric =
          absl::SimpleAtod(absl::StripAsciiWhitespace(fields[0]), &ignored) ||
          (fields.size() > 1 &&
           absl::SimpleAtod(absl::StripAsciiWhitespace(fields[1]), &ignored));
      if (first && fields.size() == 2 && !numeric) continue;  // header row
      return absl::InvalidArgumentError(
          absl::StrCat(source, ":", line_number,
                       ": expected 'key,value' with non-negative integers, got '",
                       text, "'"));
    }
    if (absl::Status status = sink(item); !status.ok()) {
      return absl::Status(status.code(), absl::StrCat(source, ":", line_number,
                                                       ": ", status.message()));
    }
  }
  if (in.bad()) {
    return absl::DataLossError(absl::StrCat(source, ": read error"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<StreamItem>> ReadStreamCsv(
    std::istream& in, const std::string& source) {
  std::vector<StreamItem> items;
  FPSKETCH_RETURN_IF_ERROR(ReadStreamCsv(in, source, [&](const StreamItem& item) {
    items.push_back(item);
    return absl::OkStatus();
  }));
  return items;
}

absl::StatusOr<std::vector<StreamItem>> LoadStreamCsvFile(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadStreamCsv(in, path);
}

}  // namespace fpsketch
