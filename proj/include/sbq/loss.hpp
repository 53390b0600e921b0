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

// Cavity loss budget and per-mode photon loss for two W_8 photons shared by
// eight parties. Mode layout: [photon 0 modes 0..7, photon 1 modes 0..7],
// mode j of either photon belongs to party j.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/protocol.hpp"
#include "sbq/rng.hpp"
#include "sbq/state.hpp"
#include "sbq/thirdq.hpp"

namespace sbq {

inline constexpr int kLossParties = 8;
inline constexpr int kLossModes = 2 * kLossParties;

// ---------------------------------------------------------------------------
// Cavity budget.

struct CavityBudget {
  double kappa_internal_mhz = 0.0;
  double kappa_coupling_mhz = 0.0;
  double gamma_bath_mhz = 0.0;
  double gamma_port_mhz = 0.0;
  double loss_fraction = 0.0;
  double success_fraction = 0.0;
  double success_db = 0.0;  // |10 log10(success)|
};

inline CavityBudget cavity_budget(const CavityParams& c) {
  validate(c);
  CavityBudget b;
  const double omega_mhz = c.omega_c_ghz * 1e3;
  b.kappa_internal_mhz = omega_mhz / c.q_internal;
  b.kappa_coupling_mhz = omega_mhz / c.q_coupling;
  b.gamma_bath_mhz = c.g_mhz * b.kappa_internal_mhz / (c.g_mhz + b.kappa_internal_mhz);
  b.gamma_port_mhz = c.g_mhz * b.kappa_coupling_mhz / (c.g_mhz + b.kappa_coupling_mhz);
  const double total = b.gamma_bath_mhz + b.gamma_port_mhz;
  b.loss_fraction = b.gamma_bath_mhz / total;
  b.success_fraction = b.gamma_port_mhz / total;
  b.success_db = std::abs(10.0 * std::log10(b.success_fraction));
  return b;
}

// ---------------------------------------------------------------------------
// Loss models.

struct LossModel {
  enum class Kind { Uniform, NormalPerMode, IntervalRandom };
  Kind kind = Kind::Uniform;
  double p = 0.0;     // Uniform value or NormalPerMode mean
  double sd = 0.005;  // NormalPerMode
  double lo = 0.0;    // IntervalRandom
  double hi = 0.0;
  /// Explicit per-mode values; when non-empty they override `kind`.
  std::vector<double> per_mode;

  static LossModel uniform(double p) { return {Kind::Uniform, p, 0.005, 0.0, 0.0, {}}; }
  static LossModel normal_per_mode(double mean, double sd = 0.005) { return {Kind::NormalPerMode, mean, sd, 0.0, 0.0, {}}; }
  static LossModel interval(double lo, double hi) { return {Kind::IntervalRandom, 0.0, 0.005, lo, hi, {}}; }
  static LossModel explicit_modes(std::vector<double> v) { return {Kind::Uniform, 0.0, 0.005, 0.0, 0.0, std::move(v)}; }
};

inline const char* to_string(LossModel::Kind k) {
  switch (k) {
    case LossModel::Kind::Uniform: return "uniform";
    case LossModel::Kind::NormalPerMode: return "normal";
    case LossModel::Kind::IntervalRandom: return "interval";
  }
  return "?";
}

inline LossModel::Kind loss_kind_from_string(const std::string& s) {
  if (s == "uniform") return LossModel::Kind::Uniform;
  if (s == "normal") return LossModel::Kind::NormalPerMode;
  if (s == "interval") return LossModel::Kind::IntervalRandom;
  throw ValidationError("loss.kind", "expected uniform, normal or interval, got '" + s + "'");
}

inline void validate(const LossModel& m) {
  auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!m.per_mode.empty()) {
    if (static_cast<int>(m.per_mode.size()) != kLossModes) throw ValidationError("loss.per_mode", "need 16 entries");
    for (double x : m.per_mode)
      if (!unit(x)) throw ValidationError("loss.per_mode", "probabilities must lie in [0, 1]");
    return;
  }
  switch (m.kind) {
    case LossModel::Kind::Uniform:
      if (!unit(m.p)) throw ValidationError("loss.p", "must lie in [0, 1]");
      break;
    case LossModel::Kind::NormalPerMode:
      if (!unit(m.p)) throw ValidationError("loss.p", "must lie in [0, 1]");
      if (!(m.sd >= 0.0)) throw ValidationError("loss.sd", "must be >= 0");
      break;
    case LossModel::Kind::IntervalRandom:
      if (!unit(m.lo) || !unit(m.hi)) throw ValidationError("loss.interval", "bounds must lie in [0, 1]");
      if (m.lo > m.hi) throw ValidationError("loss.interval", "lo must not exceed hi");
      break;
  }
}

inline constexpr std::uint64_t kResolveStream = ~std::uint64_t{0};

/// Per-mode loss probabilities. Random kinds draw from stream
/// (seed, kResolveStream), which no Monte Carlo trial uses.
inline std::vector<double> resolve(const LossModel& m, std::uint64_t seed) {
  validate(m);
  if (!m.per_mode.empty()) return m.per_mode;
  std::vector<double> v(kLossModes, 0.0);
  RandomStream rng(seed, kResolveStream);
  for (auto& x : v) {
    switch (m.kind) {
      case LossModel::Kind::Uniform: x = m.p; break;
      case LossModel::Kind::NormalPerMode:
        do {
          x = m.p + m.sd * rng.normal();
        } while (x < 0.0 || x > 1.0);
        break;
      case LossModel::Kind::IntervalRandom: x = m.lo + (m.hi - m.lo) * rng.uniform(); break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Analytic statistics.

/// (1/64) sum_{i != j} (1 - p_i)(1 - p_{8+j}).
inline double analytic_success_under_loss(const std::vector<double>& per_mode) {
  if (static_cast<int>(per_mode.size()) != kLossModes) throw ValidationError("loss.per_mode", "need 16 entries");
  double s = 0.0;
  for (int i = 0; i < kLossParties; ++i)
    for (int j = 0; j < kLossParties; ++j)
      if (i != j) s += (1.0 - per_mode[static_cast<std::size_t>(i)]) * (1.0 - per_mode[static_cast<std::size_t>(kLossParties + j)]);
  return s / (kLossParties * kLossParties);
}

inline double analytic_success_under_loss(const LossModel& m, std::uint64_t seed = 0) {
  return analytic_success_under_loss(resolve(m, seed));
}

inline PatternReport analytic_pattern_report(const std::vector<double>& per_mode) {
  if (static_cast<int>(per_mode.size()) != kLossModes) throw ValidationError("loss.per_mode", "need 16 entries");
  const SparseState joint = tensor_product(w_state(kLossParties), w_state(kLossParties));
  PartyLayout layout = PartyLayout::one_mode_each(kLossParties);
  layout.mode_to_party.insert(layout.mode_to_party.end(), layout.mode_to_party.begin(), layout.mode_to_party.end());
  std::vector<int> copy(kLossModes, 0);
  std::fill(copy.begin() + kLossParties, copy.end(), 1);
  return pattern_report(joint, layout, copy, per_mode);
}

// ---------------------------------------------------------------------------
// Monte Carlo.

struct MonteCarloResult {
  PatternReport report;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double rate = 0.0;
  double stderr_ = 0.0;  // sqrt(rate (1 - rate) / trials)
};

namespace detail {

inline constexpr int kCells = kLossParties + 1;  // party index + 1, 0 = lost

struct Counts {
  std::array<std::uint64_t, kCells * kCells> cell{};
};

inline void run_trials(const std::vector<double>& loss, std::uint64_t seed, std::uint64_t begin, std::uint64_t end,
                       Counts& out) {
  for (std::uint64_t t = begin; t < end; ++t) {
    RandomStream rng(seed, t);
    int cell[2];
    for (int c = 0; c < 2; ++c) {
      const int mode = static_cast<int>(rng.below(kLossParties));
      const bool survives = rng.uniform() >= loss[static_cast<std::size_t>(c * kLossParties + mode)];
      cell[c] = survives ? mode + 1 : 0;
    }
    ++out.cell[static_cast<std::size_t>(cell[0] * kCells + cell[1])];
  }
}

}  // namespace detail

/// Results depend only on (per_mode, trials, seed), not on `threads`.
inline MonteCarloResult monte_carlo_success(const std::vector<double>& per_mode, std::uint64_t trials,
                                            std::uint64_t seed, unsigned threads = 0) {
  if (static_cast<int>(per_mode.size()) != kLossModes) throw ValidationError("loss.per_mode", "need 16 entries");
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));
  std::vector<detail::Counts> partial(threads);
  if (threads == 1) {
    detail::run_trials(per_mode, seed, 0, trials, partial[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t b = trials * w / threads;
      const std::uint64_t e = trials * (w + 1) / threads;
      pool.emplace_back(detail::run_trials, std::cref(per_mode), seed, b, e, std::ref(partial[w]));
    }
    for (auto& th : pool) th.join();
  }
  detail::Counts total;
  for (const auto& c : partial)
    for (std::size_t i = 0; i < total.cell.size(); ++i) total.cell[i] += c.cell[i];

  MonteCarloResult r;
  r.trials = trials;
  r.report.photons = 2;
  r.report.parties = kLossParties;
  for (int a = 0; a < detail::kCells; ++a)
    for (int b = 0; b < detail::kCells; ++b) {
      const std::uint64_t n = total.cell[static_cast<std::size_t>(a * detail::kCells + b)];
      if (n == 0) continue;
      r.report.patterns[{a - 1, b - 1}] = static_cast<double>(n) / static_cast<double>(trials);
      if (a != 0 && b != 0 && a != b) r.successes += n;
    }
  finalize(r.report);
  r.rate = static_cast<double>(r.successes) / static_cast<double>(trials);
  r.stderr_ = std::sqrt(r.rate * (1.0 - r.rate) / static_cast<double>(trials));
  return r;
}

inline MonteCarloResult monte_carlo_success(const LossModel& m, std::uint64_t trials, std::uint64_t seed,
                                            unsigned threads = 0) {
  return monte_carlo_success(resolve(m, seed), trials, seed, threads);
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SweepRow {
  double param = 0.0;
  double analytic_rate = 0.0;
  double mc_rate = 0.0;
  double mc_stderr = 0.0;
  double distance = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

struct SweepTable {
  LossModel::Kind kind = LossModel::Kind::Uniform;
  std::vector<SweepRow> rows;

  /// Fixed schema; `normalized` appends rates divided by 0.875.
  std::string csv(bool normalized = false) const {
    std::ostringstream os;
    os << "param,analytic_rate,mc_rate,mc_stderr,distance_from_uniformity,trials,seed";
    if (normalized) os << ",analytic_normalized,mc_normalized";
    os << '\n';
    const double ideal = success_probability(2, kLossParties);
    for (const auto& r : rows) {
      os << format_fixed(r.param, 6) << ',' << format_fixed(r.analytic_rate) << ',' << format_fixed(r.mc_rate) << ','
         << format_fixed(r.mc_stderr) << ',' << format_fixed(r.distance, 15) << ',' << r.trials << ',' << r.seed;
      if (normalized) os << ',' << format_fixed(r.analytic_rate / ideal) << ',' << format_fixed(r.mc_rate / ideal);
      os << '\n';
    }
    return os.str();
  }
};

/// Model at one grid point: Uniform(x), NormalPerMode(x, sd), IntervalRandom(0, x).
inline LossModel sweep_model(LossModel::Kind kind, double x, double sd = 0.005) {
  switch (kind) {
    case LossModel::Kind::Uniform: return LossModel::uniform(x);
    case LossModel::Kind::NormalPerMode: return LossModel::normal_per_mode(x, sd);
    case LossModel::Kind::IntervalRandom: return LossModel::interval(0.0, x);
  }
  return LossModel::uniform(x);
}

/// 0.01, 0.02, ..., 0.10.
inline std::vector<double> default_loss_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 10; ++i) g.push_back(i / 100.0);
  return g;
}

/// Random per-mode draws at point i use seed splitmix64(seed + i); Monte
/// Carlo trials use the master seed at every point.
inline SweepTable loss_sweep(LossModel::Kind kind, const std::vector<double>& grid, std::uint64_t trials,
                             std::uint64_t seed, double sd = 0.005, unsigned threads = 0) {
  if (grid.empty()) throw ValidationError("loss.grid", "must not be empty");
  SweepTable t;
  t.kind = kind;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto loss = resolve(sweep_model(kind, grid[i], sd), splitmix64(seed + i));
    const auto analytic = analytic_pattern_report(loss);
    const auto mc = monte_carlo_success(loss, trials, seed, threads);
    t.rows.push_back({grid[i], analytic.success_mass, mc.rate, mc.stderr_, distance_from_uniformity(analytic), trials,
                      seed});
  }
  return t;
}

}  // namespace sbq
