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

#include "enf/fuzzer.h"
#include "enf/log.h"

namespace enf {

TickReport Supervisor::run_tick(Worker& worker, uint64_t tick) const {
  TickReport total;
  uint64_t restarts = 0;
  for (;;) {
    TickReport r = worker.step(tick);
    total += r;
    if (!r.halted || !worker.halts_on_crash()) break;
    bool healthy = false;
    do {
      if (++restarts > storm_limit_) {
        throw Error("crash storm: worker '" + worker.name() + "' needed more than " +
                    std::to_string(storm_limit_) + " restarts in tick " + std::to_string(tick));
      }
      healthy = worker.restart(tick);
    } while (!healthy);
    spdlog::debug("{}: restarted after crash-halt at tick {}", worker.name(), tick);
  }
  total.halted = false;
  total.restarts = restarts;
  return total;
}

}  // namespace enf
