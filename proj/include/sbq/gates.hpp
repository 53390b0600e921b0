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

// Gate matrices, durations and the stochastic noise model.
//
// Noise is trajectory based: a gate is applied ideally, then phase-flip
// events are sampled and applied as sign flips on one of the levels the gate
// touches. Two independent sources are modeled:
//   * gate error   - probability 1 - fidelity (per-operation fidelities)
//   * dephasing    - probability 1 - exp(-duration / T2) on the subsystem the
//                    gate drives (electron T2* or nuclear T2 Hahn-echo)

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/linalg.hpp"
#include "sbq/rng.hpp"
#include "sbq/spin_model.hpp"
#include "sbq/state.hpp"

namespace sbq {

/// The 8x8 Clifford Hadamard of SU(8), entry by entry in terms of
/// a = E(4) = i and b = E(8) = exp(i pi/4).
inline CMatrix qudit_hadamard_matrix() {
  const cplx a(0.0, 1.0);
  const cplx b = std::polar(1.0, std::numbers::pi / 4.0);
  const cplx b3 = b * b * b;
  const cplx p = 0.25 * b - 0.25 * b3;    // 1/4b-1/4b^3
  const cplx m = -0.25 * b + 0.25 * b3;   // -1/4b+1/4b^3
  const cplx s = 0.25 * b + 0.25 * b3;    // 1/4b+1/4b^3
  const cplx t = -0.25 * b - 0.25 * b3;   // -1/4b-1/4b^3
  const cplx c1 = 0.25 + 0.25 * a;        // 1/4+1/4a
  const cplx c2 = -0.25 + 0.25 * a;       // -1/4+1/4a
  const cplx c3 = -0.25 - 0.25 * a;       // -1/4-1/4a
  const cplx c4 = 0.25 - 0.25 * a;        // 1/4-1/4a
  return CMatrix{
      {p, p, p, p, p, p, p, p},
      {p, c1, s, c2, m, c3, t, c4},
      {p, s, m, t, p, s, m, t},
      {p, c2, t, c1, m, c4, s, c3},
      {p, m, p, m, p, m, p, m},
      {p, c3, s, c4, m, c1, t, c2},
      {p, t, m, s, p, t, m, s},
      {p, c4, t, c3, m, c2, s, c1},
  };
}

/// Transposition of nuclear levels i and j.
inline CMatrix permutation_gate(int i, int j) {
  if (i < 0 || i >= kNuclearLevels || j < 0 || j >= kNuclearLevels) {
    throw ValidationError("permutation", "nuclear index out of range");
  }
  if (i == j) throw ValidationError("permutation", "levels must differ");
  CMatrix u = CMatrix::identity(kNuclearLevels);
  u(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = 0.0;
  u(static_cast<std::size_t>(j), static_cast<std::size_t>(j)) = 0.0;
  u(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1.0;
  u(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = 1.0;
  return u;
}

/// Swap of two composite spin levels (indices 2n+e), identity elsewhere.
inline CMatrix spin_swap(SpinLabel x, SpinLabel y) {
  CMatrix u = CMatrix::identity(kSpinDim);
  const auto i = static_cast<std::size_t>(x.index());
  const auto j = static_cast<std::size_t>(y.index());
  u(i, i) = 0.0;
  u(j, j) = 0.0;
  u(i, j) = 1.0;
  u(j, i) = 1.0;
  return u;
}

// ---------------------------------------------------------------------------
// Gate descriptions.

namespace gate {

struct Initialization {};
struct Hadamard8 {};
struct Permutation {
  int i = 0;
  int j = 1;
};
/// Electron flip conditioned on one nuclear level.
struct ESRFlip {
  int nuclear = 0;
};
/// Electron flip on all eight ESR lines at once.
struct BroadbandESR {};
/// Flip-flop |n, down> <-> |n+1, up>.
struct EDSRFlipFlop {
  int nuclear = 0;
};
/// NMR pi pulse |n, e> <-> |n+1, e>.
struct NMRStep {
  int nuclear = 0;
  int electron = 0;
};
struct PhaseCorrection {
  std::vector<double> phases;  // one per mode, radians
};

/// Jaynes-Cummings exchange |upper, 0_mode> <-> |lower, 1_mode>.
struct EmissionLine {
  SpinLabel upper;
  SpinLabel lower;
  int mode = 0;
};
/// One or more cavity lines emitting during the same window.
struct Emission {
  std::vector<EmissionLine> lines;
};

}  // namespace gate

using GateSpec = std::variant<gate::Initialization, gate::Hadamard8, gate::Permutation, gate::ESRFlip,
                              gate::BroadbandESR, gate::EDSRFlipFlop, gate::NMRStep, gate::PhaseCorrection,
                              gate::Emission>;

enum class GateKind { Initialization, Hadamard8, Permutation, ESRFlip, BroadbandESR, EDSRFlipFlop, NMRStep,
                      PhaseCorrection, Emission };

inline GateKind kind_of(const GateSpec& g) { return static_cast<GateKind>(g.index()); }

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::Initialization: return "Initialization";
    case GateKind::Hadamard8: return "Hadamard8";
    case GateKind::Permutation: return "Permutation";
    case GateKind::ESRFlip: return "ESRFlip";
    case GateKind::BroadbandESR: return "BroadbandESR";
    case GateKind::EDSRFlipFlop: return "EDSRFlipFlop";
    case GateKind::NMRStep: return "NMRStep";
    case GateKind::PhaseCorrection: return "PhaseCorrection";
    case GateKind::Emission: return "Emission";
  }
  return "?";
}

inline GateKind gate_kind_from_string(const std::string& s) {
  for (int k = 0; k <= static_cast<int>(GateKind::Emission); ++k)
    if (s == to_string(static_cast<GateKind>(k))) return static_cast<GateKind>(k);
  throw ValidationError("gate.kind", "unknown gate kind '" + s + "'");
}

/// Human-readable target column for traces.
inline std::string target_of(const GateSpec& g) {
  struct V {
    std::string operator()(const gate::Initialization&) const { return "spin"; }
    std::string operator()(const gate::Hadamard8&) const { return "nuclear"; }
    std::string operator()(const gate::Permutation& p) const {
      return "nuclear:" + std::to_string(p.i) + "<->" + std::to_string(p.j);
    }
    std::string operator()(const gate::ESRFlip& e) const { return SpinLabel{e.nuclear, 0}.str() + "<->" + SpinLabel{e.nuclear, 1}.str(); }
    std::string operator()(const gate::BroadbandESR&) const { return "electron"; }
    std::string operator()(const gate::EDSRFlipFlop& e) const {
      return SpinLabel{e.nuclear, 0}.str() + "<->" + SpinLabel{e.nuclear + 1, 1}.str();
    }
    std::string operator()(const gate::NMRStep& n) const {
      return SpinLabel{n.nuclear, n.electron}.str() + "<->" + SpinLabel{n.nuclear + 1, n.electron}.str();
    }
    std::string operator()(const gate::PhaseCorrection&) const { return "modes"; }
    std::string operator()(const gate::Emission& e) const {
      std::string s;
      for (const auto& line : e.lines) s += (s.empty() ? "" : " ") + std::string("mode:") + std::to_string(line.mode);
      return s;
    }
  };
  return std::visit(V{}, g);
}

// ---------------------------------------------------------------------------
// Durations and fidelities.

/// Gate durations in microseconds.
struct TimingConfig {
  double esr_us = 1.0;
  double edsr_us = 10.0;
  double nmr_pi_us = 30.0;
  double hadamard8_us = 100.0;
  double subglobal_permutation_us = 200.0;
  double emission_us = 0.333;
  /// Permutations via the sub-global rotation (one 200 us step) instead of a
  /// chain of adjacent NMR pi pulses.
  bool subglobal_permutation = false;
};

/// NMR pulses needed to transpose nuclear levels i and j with adjacent swaps.
constexpr int nmr_chain_length(int i, int j) noexcept {
  const int d = i > j ? i - j : j - i;
  return 2 * d - 1;
}

inline double gate_duration(const GateSpec& g, const TimingConfig& t = {}) {
  switch (kind_of(g)) {
    case GateKind::Initialization: return 0.0;
    case GateKind::Hadamard8: return t.hadamard8_us;
    case GateKind::Permutation: {
      const auto& p = std::get<gate::Permutation>(g);
      if (p.i == p.j) throw ValidationError("permutation", "levels must differ");
      return t.subglobal_permutation ? t.subglobal_permutation_us : t.nmr_pi_us * nmr_chain_length(p.i, p.j);
    }
    case GateKind::ESRFlip:
    case GateKind::BroadbandESR: return t.esr_us;
    case GateKind::EDSRFlipFlop: return t.edsr_us;
    case GateKind::NMRStep: return t.nmr_pi_us;
    case GateKind::PhaseCorrection: return 0.0;
    case GateKind::Emission: return t.emission_us;
  }
  throw ValidationError("gate.kind", "unknown gate kind");
}

/// Lookup by kind name, with `Permutation` meaning an adjacent swap.
inline double gate_duration(const std::string& kind, const TimingConfig& t = {}) {
  switch (gate_kind_from_string(kind)) {
    case GateKind::Initialization: return gate_duration(gate::Initialization{}, t);
    case GateKind::Hadamard8: return gate_duration(gate::Hadamard8{}, t);
    case GateKind::Permutation: return gate_duration(gate::Permutation{0, 1}, t);
    case GateKind::ESRFlip: return gate_duration(gate::ESRFlip{}, t);
    case GateKind::BroadbandESR: return gate_duration(gate::BroadbandESR{}, t);
    case GateKind::EDSRFlipFlop: return gate_duration(gate::EDSRFlipFlop{}, t);
    case GateKind::NMRStep: return gate_duration(gate::NMRStep{}, t);
    case GateKind::PhaseCorrection: return gate_duration(gate::PhaseCorrection{}, t);
    case GateKind::Emission: return gate_duration(gate::Emission{}, t);
  }
  throw ValidationError("gate.kind", "unknown gate kind");
}

struct NoiseSpec {
  /// Per-kind fidelity. Missing kinds are ideal.
  std::map<GateKind, double> gate_fidelities{
      {GateKind::Initialization, 0.995}, {GateKind::Hadamard8, 0.998}, {GateKind::Permutation, 0.998},
      {GateKind::NMRStep, 0.998},        {GateKind::ESRFlip, 0.995},   {GateKind::BroadbandESR, 0.995},
      {GateKind::EDSRFlipFlop, 0.995},
  };
  double t2_electron_us = 510.0;
  double t2_nucleus_hadamard_us = 247.0;
  double t1_electron_s = 2.44;
  bool enabled = false;
  /// T2 dephasing on top of gate errors (only when enabled).
  bool dephasing = true;

  double fidelity(GateKind k) const {
    const auto it = gate_fidelities.find(k);
    return it == gate_fidelities.end() ? 1.0 : it->second;
  }

  static NoiseSpec off() { return {}; }
  /// Per-operation error rates only.
  static NoiseSpec gate_errors() {
    NoiseSpec n;
    n.enabled = true;
    n.dephasing = false;
    return n;
  }
  /// Gate errors plus T2 dephasing.
  static NoiseSpec full() {
    NoiseSpec n;
    n.enabled = true;
    n.dephasing = true;
    return n;
  }
};

inline void validate(const NoiseSpec& n) {
  for (const auto& [k, f] : n.gate_fidelities)
    if (!(f > 0.0 && f <= 1.0)) {
      throw ValidationError(std::string("noise.fidelity.") + to_string(k), "must be in (0, 1]");
    }
  if (n.enabled) {
    if (!(n.t2_electron_us > 0.0)) throw ValidationError("noise.t2_electron_us", "must be > 0");
    if (!(n.t2_nucleus_hadamard_us > 0.0)) throw ValidationError("noise.t2_nucleus_hadamard_us", "must be > 0");
    if (!(n.t1_electron_s > 0.0)) throw ValidationError("noise.t1_electron_s", "must be > 0");
  }
}

struct GateOp {
  GateSpec spec;
  double duration_us = 0.0;
  double fidelity = 1.0;
};

inline void validate(const GateOp& op) {
  if (!(op.fidelity > 0.0 && op.fidelity <= 1.0)) throw ValidationError("gate.fidelity", "must be in (0, 1]");
  if (!(op.duration_us >= 0.0)) throw ValidationError("gate.duration_us", "must be >= 0");
}

inline GateOp make_gate(GateSpec spec, const TimingConfig& timing = {}, const NoiseSpec& noise = {}) {
  const double d = gate_duration(spec, timing);
  const double f = noise.fidelity(kind_of(spec));
  return {std::move(spec), d, f};
}

// ---------------------------------------------------------------------------
// Ideal action.

/// |upper, 0_mode> -> cos(theta)|upper, 0_mode> - i sin(theta)|lower, 1_mode>
/// and the reverse map, i.e. exp(-i theta (sigma+ a + h.c.)) restricted to the
/// one-excitation subspace. Everything else is untouched.
inline SparseState jc_exchange(const SparseState& state, const gate::EmissionLine& line, double theta) {
  const Register& r = state.reg();
  if (r.nuclear_dim != 8 || r.electron_dim != 2) throw ValidationError("state", "emission needs a spin register");
  if (line.mode < 0 || line.mode >= r.modes) throw ValidationError("emission.mode", "outside register");
  const double c = std::cos(theta);
  const cplx mis(0.0, -std::sin(theta));
  auto is = [](const BasisLabel& l, SpinLabel s) { return l.nuclear == s.nuclear && l.electron == s.electron; };
  AmplitudeMap out;
  for (const auto& [l, a] : state.amplitudes()) {
    if (is(l, line.upper) && !l.occupied(line.mode)) {
      BasisLabel low = l.with_photon(line.mode, true);
      low.nuclear = static_cast<std::uint8_t>(line.lower.nuclear);
      low.electron = static_cast<std::uint8_t>(line.lower.electron);
      if (low.photons() > kMaxPhotons) throw ValidationError("emission", "photon cap exceeded");
      out[l] += c * a;
      out[low] += mis * a;
    } else if (is(l, line.lower) && l.occupied(line.mode)) {
      BasisLabel up = l.with_photon(line.mode, false);
      up.nuclear = static_cast<std::uint8_t>(line.upper.nuclear);
      up.electron = static_cast<std::uint8_t>(line.upper.electron);
      out[l] += c * a;
      out[up] += mis * a;
    } else {
      out[l] += a;
    }
  }
  return SparseState::unitary_image(r, std::move(out));
}

inline SparseState apply_ideal(const SparseState& state, const GateSpec& g) {
  struct V {
    const SparseState& s;
    SparseState operator()(const gate::Initialization&) const { return s; }
    SparseState operator()(const gate::Hadamard8&) const {
      return apply_unitary(s, qudit_hadamard_matrix(), Selector::nuclear());
    }
    SparseState operator()(const gate::Permutation& p) const {
      return apply_unitary(s, permutation_gate(p.i, p.j), Selector::nuclear());
    }
    SparseState operator()(const gate::ESRFlip& e) const {
      return apply_unitary(s, spin_swap({e.nuclear, 0}, {e.nuclear, 1}), Selector::spin());
    }
    SparseState operator()(const gate::BroadbandESR&) const {
      return apply_unitary(s, CMatrix{{0.0, 1.0}, {1.0, 0.0}}, Selector::electron());
    }
    SparseState operator()(const gate::EDSRFlipFlop& e) const {
      if (e.nuclear < 0 || e.nuclear + 1 >= kNuclearLevels) throw ValidationError("edsr.nuclear", "out of range");
      return apply_unitary(s, spin_swap({e.nuclear, 0}, {e.nuclear + 1, 1}), Selector::spin());
    }
    SparseState operator()(const gate::NMRStep& n) const {
      if (n.nuclear < 0 || n.nuclear + 1 >= kNuclearLevels) throw ValidationError("nmr.nuclear", "out of range");
      if (n.electron < 0 || n.electron > 1) throw ValidationError("nmr.electron", "out of range");
      return apply_unitary(s, spin_swap({n.nuclear, n.electron}, {n.nuclear + 1, n.electron}), Selector::spin());
    }
    SparseState operator()(const gate::PhaseCorrection& p) const { return apply_mode_phases(s, p.phases); }
    SparseState operator()(const gate::Emission& e) const {
      SparseState out = s;
      for (const auto& line : e.lines) out = jc_exchange(out, line, std::numbers::pi / 2.0);
      return out;
    }
  };
  return std::visit(V{state}, g);
}

// ---------------------------------------------------------------------------
// Noise.

enum class NoiseEventKind { PreparationError, GateError, Dephasing };

inline const char* to_string(NoiseEventKind k) {
  switch (k) {
    case NoiseEventKind::PreparationError: return "prep_error";
    case NoiseEventKind::GateError: return "gate_error";
    case NoiseEventKind::Dephasing: return "dephasing";
  }
  return "?";
}

struct NoiseEvent {
  NoiseEventKind kind;
  int level = 0;  // flipped level in the subsystem's own indexing
};

struct NoisyResult {
  SparseState state;
  std::vector<NoiseEvent> events;
};

namespace detail {

enum class Subsystem { None, Nuclear, Electron, Spin };

/// Levels a gate addresses (for gate-error phase flips).
inline std::pair<Subsystem, std::vector<int>> addressed_levels(const GateSpec& g) {
  switch (kind_of(g)) {
    case GateKind::Hadamard8: return {Subsystem::Nuclear, {0, 1, 2, 3, 4, 5, 6, 7}};
    case GateKind::Permutation: {
      const auto& p = std::get<gate::Permutation>(g);
      return {Subsystem::Nuclear, {p.i, p.j}};
    }
    case GateKind::ESRFlip: {
      const int n = std::get<gate::ESRFlip>(g).nuclear;
      return {Subsystem::Spin, {SpinLabel{n, 0}.index(), SpinLabel{n, 1}.index()}};
    }
    case GateKind::BroadbandESR: return {Subsystem::Electron, {0, 1}};
    case GateKind::EDSRFlipFlop: {
      const int n = std::get<gate::EDSRFlipFlop>(g).nuclear;
      return {Subsystem::Spin, {SpinLabel{n, 0}.index(), SpinLabel{n + 1, 1}.index()}};
    }
    case GateKind::NMRStep: {
      const auto& s = std::get<gate::NMRStep>(g);
      return {Subsystem::Spin, {SpinLabel{s.nuclear, s.electron}.index(), SpinLabel{s.nuclear + 1, s.electron}.index()}};
    }
    case GateKind::Emission: {
      std::vector<int> lv;
      for (const auto& line : std::get<gate::Emission>(g).lines) {
        lv.push_back(line.upper.index());
        lv.push_back(line.lower.index());
      }
      return {Subsystem::Spin, lv};
    }
    case GateKind::Initialization:
    case GateKind::PhaseCorrection: return {Subsystem::None, {}};
  }
  return {Subsystem::None, {}};
}

/// Subsystem whose coherence time applies while the gate runs.
inline Subsystem dephasing_target(GateKind k) {
  switch (k) {
    case GateKind::Hadamard8:
    case GateKind::Permutation:
    case GateKind::NMRStep: return Subsystem::Nuclear;
    case GateKind::ESRFlip:
    case GateKind::BroadbandESR:
    case GateKind::EDSRFlipFlop:
    case GateKind::Emission: return Subsystem::Electron;
    case GateKind::Initialization:
    case GateKind::PhaseCorrection: return Subsystem::None;
  }
  return Subsystem::None;
}

inline SparseState flip_sign(const SparseState& s, Subsystem sub, int level) {
  AmplitudeMap out;
  for (const auto& [l, a] : s.amplitudes()) {
    int v = 0;
    switch (sub) {
      case Subsystem::Nuclear: v = l.nuclear; break;
      case Subsystem::Electron: v = l.electron; break;
      case Subsystem::Spin: v = 2 * l.nuclear + l.electron; break;
      case Subsystem::None: v = -1; break;
    }
    out[l] = v == level ? -a : a;
  }
  return SparseState::unitary_image(s.reg(), std::move(out));
}

}  // namespace detail

/// Samples and applies the noise events that follow `op`. Always consumes
/// exactly four uniforms from `rng` so step streams stay aligned.
inline NoisyResult inject_noise(SparseState state, const GateOp& op, const NoiseSpec& noise, RandomStream& rng) {
  const double u_err = rng.uniform();
  const double u_err_level = rng.uniform();
  const double u_deph = rng.uniform();
  const double u_deph_level = rng.uniform();
  NoisyResult res{std::move(state), {}};
  if (!noise.enabled) return res;
  const GateKind kind = kind_of(op.spec);

  if (u_err < 1.0 - op.fidelity) {
    if (kind == GateKind::Initialization) {
      // Classical preparation error: the nucleus starts in a wrong level.
      if (res.state.reg().nuclear_dim == 8 && res.state.size() > 0) {
        const int current = res.state.amplitudes().begin()->first.nuclear;
        int wrong = static_cast<int>(u_err_level * (kNuclearLevels - 1));
        if (wrong >= current) ++wrong;
        res.state = apply_unitary(res.state, permutation_gate(current, wrong), Selector::nuclear());
        res.events.push_back({NoiseEventKind::PreparationError, wrong});
      }
    } else {
      const auto [sub, levels] = detail::addressed_levels(op.spec);
      if (!levels.empty()) {
        const int level = levels[static_cast<std::size_t>(u_err_level * static_cast<double>(levels.size()))];
        res.state = detail::flip_sign(res.state, sub, level);
        res.events.push_back({NoiseEventKind::GateError, level});
      }
    }
  }

  if (noise.dephasing && op.duration_us > 0.0) {
    const auto sub = detail::dephasing_target(kind);
    const double t2 = sub == detail::Subsystem::Nuclear ? noise.t2_nucleus_hadamard_us : noise.t2_electron_us;
    const double p = sub == detail::Subsystem::None ? 0.0 : 1.0 - std::exp(-op.duration_us / t2);
    if (u_deph < p) {
      const int dim = sub == detail::Subsystem::Nuclear ? kNuclearLevels : kElectronLevels;
      const int level = static_cast<int>(u_deph_level * dim);
      res.state = detail::flip_sign(res.state, sub, level);
      res.events.push_back({NoiseEventKind::Dephasing, level});
    }
  }
  return res;
}

inline NoisyResult apply_noisy_gate(const SparseState& state, const GateOp& op, const NoiseSpec& noise,
                                    RandomStream& rng) {
  validate(op);
  return inject_noise(apply_ideal(state, op.spec), op, noise, rng);
}

inline NoisyResult apply_noisy_gate(const SparseState& state, const GateOp& op, const NoiseSpec& noise,
                                    std::uint64_t seed) {
  RandomStream rng(seed);
  return apply_noisy_gate(state, op, noise, rng);
}

}  // namespace sbq
