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

#pragma once

// Run configuration: an INI-style text file.
//
//   # comment
//   [cavity]
//   q_internal = 1e5
//
// Unknown sections or keys are errors. Every omitted value keeps its default.

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/gates.hpp"
#include "sbq/loss.hpp"
#include "sbq/protocol.hpp"
#include "sbq/spin_model.hpp"

namespace sbq {

/// Validation failure with a source line (0 when not tied to a line).
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, int line, const std::string& what)
      : ValidationError(std::move(field), what), line_(line), message_(what) {}
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string message_;
};

struct RunConfig {
  SpinSystemParams spin;
  bool calibrate = true;
  double edsr_target_ghz = 28.41;
  double b0_low = 0.9;
  double b0_high = 1.1;

  NoiseSpec noise;
  TimingConfig timing;
  CavityParams cavity;

  std::string protocol_mode = "timebin";  // timebin | frequency
  int trajectories = 0;                   // noisy fidelity estimate, 0 = skip
  int outcome = -1;                       // decoupling outcome, -1 = sampled

  int bell_parties = 8;

  LossModel::Kind loss_kind = LossModel::Kind::Uniform;
  std::vector<double> loss_grid = default_loss_grid();
  double loss_sd = 0.005;
  bool normalized_columns = false;

  std::uint64_t seed = 1;
  std::uint64_t trials = 1'000'000;
  std::string out;
  unsigned threads = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view v, const std::string& field) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x)) {
    throw ValidationError(field, "expected a number, got '" + std::string(v) + "'");
  }
  return x;
}

inline std::int64_t parse_int(std::string_view v, const std::string& field) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ValidationError(field, "expected an integer, got '" + std::string(v) + "'");
  }
  return x;
}

inline std::uint64_t parse_u64(std::string_view v, const std::string& field) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) {
    throw ValidationError(field, "expected a non-negative integer, got '" + std::string(v) + "'");
  }
  return x;
}

inline bool parse_bool(std::string_view v, const std::string& field) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError(field, "expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> parse_list(std::string_view v, const std::string& field) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_double(trim(v.substr(0, comma)), field));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, const std::string&)>;

inline const std::map<std::string, Setter>& config_keys() {
  static const std::map<std::string, Setter> keys = [] {
    std::map<std::string, Setter> k;
    auto num = [&](const std::string& name, auto member) {
      k[name] = [member](RunConfig& c, std::string_view v, const std::string& f) { member(c) = parse_double(v, f); };
    };
    auto flag = [&](const std::string& name, auto member) {
      k[name] = [member](RunConfig& c, std::string_view v, const std::string& f) { member(c) = parse_bool(v, f); };
    };
    num("spin.b0", [](RunConfig& c) -> double& { return c.spin.b0; });
    num("spin.gamma_n", [](RunConfig& c) -> double& { return c.spin.gamma_n; });
    num("spin.gamma_e", [](RunConfig& c) -> double& { return c.spin.gamma_e; });
    num("spin.hyperfine_a", [](RunConfig& c) -> double& { return c.spin.hyperfine_a; });
    const char* axes = "xyz";
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const std::string name = std::string("spin.q_") + axes[a] + axes[b];
        k[name] = [a, b](RunConfig& c, std::string_view v, const std::string& f) {
          c.spin.quadrupole[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = parse_double(v, f);
        };
      }
    flag("spin.calibrate", [](RunConfig& c) -> bool& { return c.calibrate; });
    num("spin.edsr_target_ghz", [](RunConfig& c) -> double& { return c.edsr_target_ghz; });
    num("spin.b0_low", [](RunConfig& c) -> double& { return c.b0_low; });
    num("spin.b0_high", [](RunConfig& c) -> double& { return c.b0_high; });

    flag("noise.enabled", [](RunConfig& c) -> bool& { return c.noise.enabled; });
    flag("noise.dephasing", [](RunConfig& c) -> bool& { return c.noise.dephasing; });
    num("noise.t2_electron_us", [](RunConfig& c) -> double& { return c.noise.t2_electron_us; });
    num("noise.t2_nucleus_hadamard_us", [](RunConfig& c) -> double& { return c.noise.t2_nucleus_hadamard_us; });
    num("noise.t1_electron_s", [](RunConfig& c) -> double& { return c.noise.t1_electron_s; });
    for (int g = 0; g <= static_cast<int>(GateKind::Emission); ++g) {
      const auto kind = static_cast<GateKind>(g);
      k[std::string("noise.fidelity.") + to_string(kind)] = [kind](RunConfig& c, std::string_view v,
                                                                  const std::string& f) {
        c.noise.gate_fidelities[kind] = parse_double(v, f);
      };
    }

    num("timing.esr_us", [](RunConfig& c) -> double& { return c.timing.esr_us; });
    num("timing.edsr_us", [](RunConfig& c) -> double& { return c.timing.edsr_us; });
    num("timing.nmr_pi_us", [](RunConfig& c) -> double& { return c.timing.nmr_pi_us; });
    num("timing.hadamard8_us", [](RunConfig& c) -> double& { return c.timing.hadamard8_us; });
    num("timing.subglobal_permutation_us", [](RunConfig& c) -> double& { return c.timing.subglobal_permutation_us; });
    num("timing.emission_us", [](RunConfig& c) -> double& { return c.timing.emission_us; });
    flag("timing.subglobal_permutation", [](RunConfig& c) -> bool& { return c.timing.subglobal_permutation; });

    num("cavity.omega_c_ghz", [](RunConfig& c) -> double& { return c.cavity.omega_c_ghz; });
    num("cavity.g_mhz", [](RunConfig& c) -> double& { return c.cavity.g_mhz; });
    num("cavity.q_internal", [](RunConfig& c) -> double& { return c.cavity.q_internal; });
    num("cavity.q_coupling", [](RunConfig& c) -> double& { return c.cavity.q_coupling; });

    k["protocol.mode"] = [](RunConfig& c, std::string_view v, const std::string&) { c.protocol_mode = std::string(v); };
    k["protocol.trajectories"] = [](RunConfig& c, std::string_view v, const std::string& f) {
      c.trajectories = static_cast<int>(parse_int(v, f));
    };
    k["protocol.outcome"] = [](RunConfig& c, std::string_view v, const std::string& f) {
      c.outcome = static_cast<int>(parse_int(v, f));
    };

    k["bell.parties"] = [](RunConfig& c, std::string_view v, const std::string& f) {
      c.bell_parties = static_cast<int>(parse_int(v, f));
    };

    k["loss.kind"] = [](RunConfig& c, std::string_view v, const std::string&) {
      c.loss_kind = loss_kind_from_string(std::string(v));
    };
    k["loss.grid"] = [](RunConfig& c, std::string_view v, const std::string& f) { c.loss_grid = parse_list(v, f); };
    num("loss.sd", [](RunConfig& c) -> double& { return c.loss_sd; });
    flag("loss.normalized_columns", [](RunConfig& c) -> bool& { return c.normalized_columns; });

    k["run.seed"] = [](RunConfig& c, std::string_view v, const std::string& f) { c.seed = parse_u64(v, f); };
    k["run.trials"] = [](RunConfig& c, std::string_view v, const std::string& f) { c.trials = parse_u64(v, f); };
    k["run.out"] = [](RunConfig& c, std::string_view v, const std::string&) { c.out = std::string(v); };
    k["run.threads"] = [](RunConfig& c, std::string_view v, const std::string& f) {
      c.threads = static_cast<unsigned>(parse_u64(v, f));
    };
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Module-level invariants, checked before any computation.
inline void validate(const RunConfig& c) {
  validate(c.spin);
  if (c.calibrate) {
    if (!(c.edsr_target_ghz > 0.0)) throw ValidationError("spin.edsr_target_ghz", "must be > 0");
    if (!(c.b0_low > 0.0 && c.b0_low < c.b0_high)) throw ValidationError("spin.b0_low", "need 0 < b0_low < b0_high");
  }
  validate(c.noise);
  for (double t : {c.timing.esr_us, c.timing.edsr_us, c.timing.nmr_pi_us, c.timing.hadamard8_us,
                   c.timing.subglobal_permutation_us, c.timing.emission_us})
    if (!(t >= 0.0)) throw ValidationError("timing", "durations must be >= 0");
  validate(c.cavity);
  if (c.protocol_mode != "timebin" && c.protocol_mode != "frequency") {
    throw ValidationError("protocol.mode", "expected timebin or frequency");
  }
  if (c.trajectories < 0) throw ValidationError("protocol.trajectories", "must be >= 0");
  if (c.outcome < -1 || c.outcome >= kNuclearLevels) throw ValidationError("protocol.outcome", "must be -1 or 0..7");
  if (c.bell_parties < 2 || c.bell_parties > 32) throw ValidationError("bell.parties", "must be in [2, 32]");
  if (c.loss_grid.empty()) throw ValidationError("loss.grid", "must not be empty");
  for (double p : c.loss_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("loss.grid", "values must lie in [0, 1]");
  if (!(c.loss_sd >= 0.0)) throw ValidationError("loss.sd", "must be >= 0");
  if (c.trials < 1) throw ValidationError("run.trials", "must be >= 1");
}

/// Parses and validates. Throws ConfigError with the offending line.
inline RunConfig validate_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> line_of;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("section", lineno, "unterminated section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"spin", "noise", "timing", "cavity", "protocol", "bell", "loss", "run"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw ConfigError(section, lineno, "unknown section");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line", lineno, "expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, lineno, "key outside any section");
    const std::string field = section + "." + key;
    const auto& keys = detail::config_keys();
    const auto it = keys.find(field);
    if (it == keys.end()) throw ConfigError(field, lineno, "unknown key");
    try {
      it->second(cfg, value, field);
    } catch (const ValidationError& e) {
      throw ConfigError(e.field(), lineno, std::string(e.what()).substr(e.field().size() + 2));
    }
    line_of[field] = lineno;
  }
  try {
    validate(cfg);
  } catch (const ValidationError& e) {
    int line = 0;
    for (const auto& [f, l] : line_of)
      if (f == e.field() || f.rfind(e.field() + ".", 0) == 0 || e.field().rfind(f, 0) == 0) line = l;
    throw ConfigError(e.field(), line, std::string(e.what()).substr(e.field().size() + 2));
  }
  return cfg;
}

}  // namespace sbq
