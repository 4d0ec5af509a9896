/*
 * Copyright 2026 The fedgbt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fedgbt/error.h"

namespace fedgbt {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kRange: return "range error";
    case ErrorCode::kThreshold: return "threshold error";
    case ErrorCode::kRoster: return "roster error";
    case ErrorCode::kConfiguration: return "configuration error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kAuthentication: return "authentication error";
    case ErrorCode::kKey: return "key error";
    case ErrorCode::kAggregationConsistency: return "aggregation-consistency error";
    case ErrorCode::kIncompleteRound: return "incomplete-round error";
    case ErrorCode::kRuntime: return "runtime error";
  }
  return "error";
}

}  // namespace fedgbt
