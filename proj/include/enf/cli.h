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

#ifndef ENF_CLI_H_
#define ENF_CLI_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "enf/monitor.h"

namespace enf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Canned deterministic configurations for the motivating target:
// solo1, solo2, ensemble_nosync, ensemble_sync.
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown preset.
EnsembleConfig preset_config(std::string_view preset);

// Entry point of the `enf` tool. Reports go to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace enf

#endif  // ENF_CLI_H_
