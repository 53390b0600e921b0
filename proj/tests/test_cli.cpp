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

#include "sbq/cli.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sbq;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::string& command, const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = execute(command, cfg, out, err);
  return {code, out.str(), err.str()};
}

std::string value_of(const std::string& text, const std::string& key) {
  const auto p = text.find(key + "=");
  if (p == std::string::npos) return {};
  const auto e = text.find('\n', p);
  return text.substr(p + key.size() + 1, e - p - key.size() - 1);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sbq_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_config_error(const std::string& text, const std::string& field, int line) {
  try {
    validate_config(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), field) << text;
    EXPECT_EQ(e.line(), line) << text;
  }
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig c = validate_config("");
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.trials, 1000000u);
  EXPECT_EQ(c.cavity.q_internal, 1e6);
  EXPECT_EQ(c.protocol_mode, "timebin");
  EXPECT_EQ(c.loss_grid.size(), 10u);
  EXPECT_NO_THROW(validate_config("# nothing\n\n; still nothing\n"));
}

TEST(Config, ParsesSections) {
  const RunConfig c = validate_config(
      "[cavity]\nq_internal = 1e5\n[noise]\nenabled = true\nfidelity.NMRStep = 0.99\n"
      "[loss]\nkind = normal\ngrid = 0.01, 0.05\n[run]\nseed = 99 # trailing\n[timing]\nsubglobal_permutation = yes\n");
  EXPECT_EQ(c.cavity.q_internal, 1e5);
  EXPECT_TRUE(c.noise.enabled);
  EXPECT_EQ(c.noise.fidelity(GateKind::NMRStep), 0.99);
  EXPECT_EQ(c.loss_kind, LossModel::Kind::NormalPerMode);
  EXPECT_EQ(c.loss_grid, (std::vector<double>{0.01, 0.05}));
  EXPECT_EQ(c.seed, 99u);
  EXPECT_TRUE(c.timing.subglobal_permutation);
}

TEST(Config, NegativeQualityFactorNamesField) {
  expect_config_error("[cavity]\nq_internal = -1e5\n", "cavity.q_internal", 2);
}

TEST(Config, FidelityAboveOneRejected) {
  expect_config_error("[noise]\n\nfidelity.Hadamard8 = 1.01\n", "noise.fidelity.Hadamard8", 3);
}

TEST(Config, UnknownKeysAndSections) {
  expect_config_error("[cavity]\nq_int = 3\n", "cavity.q_int", 2);
  expect_config_error("[bogus]\n", "bogus", 1);
  expect_config_error("seed = 3\n", "seed", 1);
  expect_config_error("[run]\nseed\n", "line", 2);
  expect_config_error("[run]\nseed = abc\n", "run.seed", 2);
  expect_config_error("[loss]\nkind = gauss\n", "loss.kind", 2);
  expect_config_error("[run]\ntrials = 0\n", "run.trials", 2);
  expect_config_error("[protocol]\nmode = spatial\n", "protocol.mode", 2);
}

TEST(Execute, BellDefaults) {
  const CliRun r = run("bell", RunConfig{});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(value_of(r.out, "success_mass"), "0.875000000000");
  EXPECT_EQ(value_of(r.out, "unordered_pairs"), "28");
  EXPECT_EQ(value_of(r.out, "ordered_patterns"), "56");
  EXPECT_EQ(value_of(r.out, "min_bell_fidelity"), "1.000000000000");
  EXPECT_NE(r.out.find("pattern,probability,q_normalized\n"), std::string::npos);
}

TEST(Execute, CavityLowQ) {
  RunConfig c;
  c.cavity.q_internal = 1e5;
  const CliRun r = run("cavity", c);
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NEAR(std::stod(value_of(r.out, "loss_fraction")), 0.15, 2e-3);
  EXPECT_NEAR(std::stod(value_of(run("cavity", RunConfig{}).out, "loss_fraction")), 0.0189, 5e-4);
}

TEST(Execute, SpectrumDefaults) {
  const CliRun r = run("spectrum", RunConfig{});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NEAR(std::stod(value_of(r.out, "edsr_emission_ghz")), 28.41, 1e-6);
  EXPECT_EQ(value_of(r.out, "ESR_count"), "8");
  EXPECT_EQ(value_of(r.out, "EDSR_count"), "7");
  EXPECT_NE(r.out.find("kind,from,to,frequency_ghz\n"), std::string::npos);
}

TEST(Execute, ProtocolDefaults) {
  const CliRun r = run("protocol", RunConfig{});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(value_of(r.out, "fidelity_target"), "1.000000000000");
  EXPECT_EQ(value_of(r.out, "corrected_fidelity_w8"), "1.000000000000");
  EXPECT_EQ(value_of(r.out, "total_duration_us"), "1652.664000");
  EXPECT_NE(r.out.find("step,kind,target,duration_us,noise_event\n"), std::string::npos);
  RunConfig f;
  f.protocol_mode = "frequency";
  f.outcome = 5;
  const CliRun q = run("protocol", f);
  EXPECT_EQ(value_of(q.out, "fidelity_target"), "1.000000000000");
  EXPECT_EQ(value_of(q.out, "decouple_outcome"), "-3/2");
}

TEST(Execute, LossSweepIsByteIdentical) {
  RunConfig c;
  c.trials = 50000;
  c.seed = 4242;
  c.loss_kind = LossModel::Kind::NormalPerMode;
  const CliRun a = run("loss-sweep", c);
  c.threads = 3;
  const CliRun b = run("loss-sweep", c);
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("param,analytic_rate,mc_rate,mc_stderr,distance_from_uniformity,trials,seed\n"), std::string::npos);
}

TEST(Execute, ExitCodes) {
  const CliRun unknown = run("frobnicate", RunConfig{});
  EXPECT_EQ(unknown.code, kExitInvalid);
  EXPECT_EQ(unknown.err.rfind("error: field=command line=0 msg=", 0), 0u);

  RunConfig bad;
  bad.cavity.q_coupling = -3;
  EXPECT_EQ(run("cavity", bad).code, kExitInvalid);

  RunConfig off_range;
  off_range.edsr_target_ghz = 50.0;
  const CliRun m = run("spectrum", off_range);
  EXPECT_EQ(m.code, kExitModelError);
  EXPECT_EQ(m.err.rfind("error: label=not_bracketed msg=", 0), 0u);
}

TEST(Execute, OutputFiles) {
  RunConfig c;
  c.out = scratch("trace.csv").string();
  const CliRun r = run("protocol", c);
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(slurp(c.out).rfind("step,kind,target,duration_us,noise_event\n", 0), 0u);
  EXPECT_FALSE(slurp(c.out + ".state").empty());
  EXPECT_EQ(r.out.find("step,kind"), std::string::npos);
}

TEST(Binary, RunsCommandsAndReportsErrors) {
  const std::string exe = SBQ_CLI_PATH;
  const auto out = scratch("bin_out.txt");
  const auto err = scratch("bin_err.txt");
  const auto cfg = scratch("bad.ini");
  const auto good = scratch("good.ini");
  const auto redirect = " >" + out.string() + " 2>" + err.string();

  EXPECT_EQ(shell(exe + " bell" + redirect), 0);
  EXPECT_EQ(value_of(slurp(out), "success_mass"), "0.875000000000");

  std::ofstream(good) << "[cavity]\nq_internal = 1e5\n";
  EXPECT_EQ(shell(exe + " cavity --config " + good.string() + redirect), 0);
  EXPECT_NEAR(std::stod(value_of(slurp(out), "loss_fraction")), 0.15, 2e-3);

  std::ofstream(cfg) << "[cavity]\nq_internal = -5\n";
  EXPECT_EQ(shell(exe + " cavity --config " + cfg.string() + redirect), 2);
  EXPECT_EQ(slurp(err), "error: field=cavity.q_internal line=2 msg=must be > 0\n");

  EXPECT_EQ(shell(exe + " loss-sweep --trials 20000 --seed 7" + redirect), 0);
  const std::string first = slurp(out);
  EXPECT_EQ(shell(exe + " loss-sweep --trials 20000 --seed 7 --threads 2" + redirect), 0);
  EXPECT_EQ(slurp(out), first);
  EXPECT_NE(first.find("seed=7\n"), std::string::npos);

  EXPECT_EQ(shell(exe + " nope" + redirect), 2);
  EXPECT_EQ(shell(exe + " bell --seed notanumber" + redirect), 2);
}
