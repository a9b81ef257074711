/*
 * Copyright 2026 The dpfl-pareto Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DPFL_STATUS_MACROS_H_
#define DPFL_STATUS_MACROS_H_

#include "absl/status/status.h"

// Returns from the enclosing function when `expr` yields a non-OK status.
#define DPFL_RETURN_IF_ERROR(expr)                                \
  do {                                                            \
    if (absl::Status _dpfl_status = (expr); !_dpfl_status.ok()) { \
      return _dpfl_status;                                        \
    }                                                             \
  } while (0)

#endif  // DPFL_STATUS_MACROS_H_
