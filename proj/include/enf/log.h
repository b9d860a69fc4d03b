// Copyright 2026 The enf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ENF_LOG_H_
#define ENF_LOG_H_

#include <spdlog/spdlog.h>

namespace enf {

// Configures the default logger from the ENF_LOG environment variable
// (trace, debug, info, warn, error, off). Defaults to warn. Logs go to
// stderr so stdout stays reserved for reports.
void init_logging();

}  // namespace enf

#endif  // ENF_LOG_H_
