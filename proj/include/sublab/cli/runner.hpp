// Copyright 2026 The sublab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUBLAB_CLI_RUNNER_HPP_
#define SUBLAB_CLI_RUNNER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sublab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
/// More than 10% of replicates failed.
inline constexpr int kExitReplicates = 3;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  /// Overrides the config's "seed".
  std::optional<std::uint64_t> seed;
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> artifacts;
  std::string manifest_hash;
};

const std::vector<std::string>& experiment_kinds();
std::string code_version();

/// Hash of kind, config (seed resolved) and code version. Thread count and
/// wall time are recorded in the manifest but not hashed.
std::string manifest_hash(const std::string& kind, const nlohmann::json& resolved_config);

/// Validates the whole config, then runs and writes artifacts plus
/// manifest.json into out_dir. Never throws; failures come back in the outcome.
RunOutcome run_experiment(const std::string& kind, const nlohmann::json& config,
                          const RunOptions& options);

}  // namespace sublab::cli

#endif  // SUBLAB_CLI_RUNNER_HPP_
