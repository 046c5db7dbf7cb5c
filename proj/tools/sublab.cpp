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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sublab/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sublab: subsampling MCMC experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sublab::cli::code_version());

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out_dir = ".";
  for (const auto& kind : sublab::cli::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "overrides the config seed");
    sub->add_option("--threads", threads, "worker threads; outputs do not depend on it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "artifact directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sublab::cli::kExitConfig;
  }
  CLI::App* chosen = app.get_subcommands().front();

  nlohmann::json config;
  try {
    std::ifstream in(config_path);
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << "\n";
    return sublab::cli::kExitConfig;
  }

  sublab::cli::RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  if (chosen->count("--seed")) options.seed = seed;
  const auto outcome = sublab::cli::run_experiment(chosen->get_name(), config, options);
  if (outcome.exit_code != sublab::cli::kExitOk) {
    std::cerr << outcome.message << "\n";
    return outcome.exit_code;
  }
  std::cout << "wrote";
  for (const auto& a : outcome.artifacts) std::cout << " " << a;
  std::cout << " manifest.json (" << outcome.manifest_hash << ")\n";
  return 0;
}
