// Copyright 2026 The sbqudit Authors
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

// sbq <command> [--config FILE] [--seed N] [--out PATH] [--trials N] [--threads N]

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sbq/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Single-donor W-state and third-quantization simulator"};
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned threads = 0;
  std::string out;
  app.add_option("command", command, "spectrum | protocol | bell | cavity | loss-sweep")->required();
  auto* o_config = app.add_option("--config", config_path, "INI-style run configuration");
  auto* o_seed = app.add_option("--seed", seed, "master seed (overrides [run] seed)");
  auto* o_out = app.add_option("--out", out, "data output path (overrides [run] out)");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials (overrides [run] trials)");
  auto* o_threads = app.add_option("--threads", threads, "worker threads, 0 = hardware");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: field=argv line=0 msg=" << e.what() << '\n';
    return sbq::kExitInvalid;
  }

  std::string text;
  if (*o_config) {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) {
      std::cerr << "error: field=config line=0 msg=cannot read " << config_path << '\n';
      return sbq::kExitInvalid;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }

  sbq::RunConfig cfg;
  try {
    cfg = sbq::validate_config(text);
  } catch (const sbq::ValidationError& e) {
    sbq::print_error(std::cerr, e);
    return sbq::kExitInvalid;
  }
  if (*o_seed) cfg.seed = seed;
  if (*o_out) cfg.out = out;
  if (*o_trials) cfg.trials = trials;
  if (*o_threads) cfg.threads = threads;
  return sbq::execute(command, cfg, std::cout, std::cerr);
}
