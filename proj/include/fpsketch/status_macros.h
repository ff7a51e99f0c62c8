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

#ifndef FPSKETCH_STATUS_MACROS_H_
#define FPSKETCH_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define FPSKETCH_STATUS_CONCAT_INNER_(a, b) a##b
#define FPSKETCH_STATUS_CONCAT_(a, b) FPSKETCH_STATUS_CONCAT_INNER_(a, b)

#define FPSKETCH_RETURN_IF_ERROR(expr)        \
  do {                                        \
    ::absl::Status _fpsketch_status = (expr); \
    if (!_fpsketch_status.ok()) {             \
      return _fpsketch_status;                \
    }                                         \
  } while (0)

#define FPSKETCH_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                    \
  if (!statusor.ok()) {                                       \
    return std::move(statusor).status();                      \
  }                                                           \
  lhs = *std::move(statusor)

#define FPSKETCH_ASSIGN_OR_RETURN(lhs, rexpr) \
  FPSKETCH_ASSIGN_OR_RETURN_IMPL_(            \
      FPSKETCH_STATUS_CONCAT_(_fpsketch_statusor_, __LINE__), lhs, rexpr)

#endif  // FPSKETCH_STATUS_MACROS_H_
