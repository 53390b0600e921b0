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

// W-state generation with a single 123Sb donor.
//
// Time-bin schedule (8 bins, nuclear index n <-> m_I = 7/2 - n):
//
//   Initialization, Hadamard8
//   round r = 1..7:  EDSR |0,dn> <-> |1,up>, emission into bin r-1,
//                    transposition (0, r)
//   round 8:         EDSR, emission into bin 7
//
// after which bin k (0-based) is paired with nuclear level k+1 for k < 7 and
// bin 7 with level 0. Transpositions are either a chain of 2r-1 adjacent NMR
// pi pulses or one sub-global rotation (TimingConfig::subglobal_permutation).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/gates.hpp"
#include "sbq/linalg.hpp"
#include "sbq/rng.hpp"
#include "sbq/spin_model.hpp"
#include "sbq/state.hpp"

namespace sbq {

inline constexpr int kTimeBins = 8;

struct CavityParams {
  double omega_c_ghz = 28.41;
  double g_mhz = 3.0;
  double q_internal = 1e6;
  double q_coupling = 1e4;
};

inline void validate(const CavityParams& c) {
  if (!(c.omega_c_ghz > 0.0)) throw ValidationError("cavity.omega_c_ghz", "must be > 0");
  if (!(c.g_mhz > 0.0)) throw ValidationError("cavity.g_mhz", "must be > 0");
  if (!(c.q_internal > 0.0)) throw ValidationError("cavity.q_internal", "must be > 0");
  if (!(c.q_coupling > 0.0)) throw ValidationError("cavity.q_coupling", "must be > 0");
  if (!(c.omega_c_ghz * 1e3 > 10.0 * c.g_mhz)) {
    throw ValidationError("cavity.g_mhz", "coupling must be much smaller than the cavity frequency");
  }
}

struct TraceStep {
  int index = 0;
  GateKind kind = GateKind::Initialization;
  std::string target;
  double duration_us = 0.0;
  std::vector<NoiseEvent> events;
};

struct ProtocolTrace {
  std::vector<TraceStep> steps;
  double total_duration_us = 0.0;
  std::vector<int> emitted_bins;

  /// `step,kind,target,duration_us,noise_event`, one row per step.
  std::string csv() const {
    std::ostringstream os;
    os << "step,kind,target,duration_us,noise_event\n";
    for (const auto& s : steps) {
      std::string ev;
      for (const auto& e : s.events) ev += (ev.empty() ? "" : ";") + std::string(to_string(e.kind)) + ":" + std::to_string(e.level);
      os << s.index << ',' << to_string(s.kind) << ',' << s.target << ',' << format_fixed(s.duration_us, 6) << ','
         << (ev.empty() ? "none" : ev) << '\n';
    }
    return os.str();
  }
};

struct ProtocolResult {
  SparseState state;
  ProtocolTrace trace;
  std::vector<SparseState> round_states;  // after each emission round
};

/// Rotation by g*t in {|5/2,up,0_bin>, |7/2,dn,1_bin>}.
inline SparseState jc_emission(const SparseState& state, int bin, double g_mhz, double t_us) {
  if (bin < 0 || bin >= state.reg().modes) throw ValidationError("bin", "outside register");
  for (const auto& [l, a] : state.amplitudes())
    if (l.occupied(bin)) throw ValidationError("bin", "already occupied on the support");
  return jc_exchange(state, {{1, 1}, {0, 0}, bin}, g_mhz * t_us);
}

namespace detail {

/// Runs one step: ideal action, sampled noise, trace row.
inline SparseState run_step(const SparseState& s, const GateOp& op, const NoiseSpec& noise, std::uint64_t seed,
                            ProtocolTrace& trace) {
  RandomStream rng(seed, static_cast<std::uint64_t>(trace.steps.size()));
  NoisyResult r = apply_noisy_gate(s, op, noise, rng);
  trace.steps.push_back({static_cast<int>(trace.steps.size()), kind_of(op.spec), target_of(op.spec), op.duration_us,
                         std::move(r.events)});
  trace.total_duration_us += op.duration_us;
  return std::move(r.state);
}

inline std::vector<GateSpec> transposition_steps(int r, const TimingConfig& timing) {
  if (timing.subglobal_permutation) return {gate::Permutation{0, r}};
  // (0 r) = (0 1)(1 2)...(r-1 r)...(1 2)(0 1) read right to left.
  std::vector<GateSpec> out;
  for (int k = 0; k < r; ++k) out.push_back(gate::NMRStep{k, 0});
  for (int k = r - 2; k >= 0; --k) out.push_back(gate::NMRStep{k, 0});
  return out;
}

}  // namespace detail

/// Nuclear level paired with bin k by the schedule above.
constexpr int timebin_partner(int bin) noexcept { return bin + 1 < kTimeBins ? bin + 1 : 0; }

/// The ideal output of the time-bin run (up to global phase).
inline SparseState timebin_target_state() {
  AmplitudeMap amps;
  for (int k = 0; k < kTimeBins; ++k) {
    amps[BasisLabel{static_cast<std::uint8_t>(timebin_partner(k)), 0, BasisLabel::bit(k)}] = 1.0;
  }
  return SparseState::normalized(Register::spin_photon(kTimeBins), std::move(amps));
}

inline SparseState initial_spin_state(int modes) {
  return SparseState::basis(Register::spin_photon(modes), BasisLabel{0, 0, 0});
}

inline ProtocolResult run_timebin_protocol(const NoiseSpec& noise, const CavityParams& cavity, std::uint64_t seed,
                                           const TimingConfig& timing = {}) {
  validate(noise);
  validate(cavity);
  ProtocolResult res{initial_spin_state(kTimeBins), {}, {}};
  auto step = [&](GateSpec g) { res.state = detail::run_step(res.state, make_gate(std::move(g), timing, noise), noise, seed, res.trace); };

  step(gate::Initialization{});
  step(gate::Hadamard8{});
  for (int r = 1; r <= kTimeBins; ++r) {
    step(gate::EDSRFlipFlop{0});
    const int bin = r - 1;
    for (const auto& [l, a] : res.state.amplitudes())
      if (l.occupied(bin)) throw ModelError("bin_reuse", "bin " + std::to_string(bin) + " already occupied");
    step(gate::Emission{{{{1, 1}, {0, 0}, bin}}});
    res.trace.emitted_bins.push_back(bin);
    if (r < kTimeBins)
      for (auto& g : detail::transposition_steps(r, timing)) step(std::move(g));
    res.round_states.push_back(res.state);
  }
  return res;
}

/// Duration of the noise-free schedule, from gate_duration alone.
inline double timebin_schedule_duration(const TimingConfig& timing = {}) {
  double t = gate_duration(gate::Initialization{}, timing) + gate_duration(gate::Hadamard8{}, timing);
  for (int r = 1; r <= kTimeBins; ++r) {
    t += gate_duration(gate::EDSRFlipFlop{0}, timing) + gate_duration(gate::Emission{}, timing);
    if (r < kTimeBins) t += gate_duration(gate::Permutation{0, r}, timing);
  }
  return t;
}

/// Frequency multiplexing: after the Hadamard a broadband ESR pulse excites
/// every branch and cavity n collects the photon of |n,up> -> |n,dn>.
inline ProtocolResult run_frequency_multiplex(const NoiseSpec& noise, std::uint64_t seed, const TimingConfig& timing = {}) {
  validate(noise);
  ProtocolResult res{initial_spin_state(kNuclearLevels), {}, {}};
  auto step = [&](GateSpec g) { res.state = detail::run_step(res.state, make_gate(std::move(g), timing, noise), noise, seed, res.trace); };

  step(gate::Initialization{});
  step(gate::Hadamard8{});
  step(gate::BroadbandESR{});
  gate::Emission em;
  for (int n = 0; n < kNuclearLevels; ++n) em.lines.push_back({{n, 1}, {n, 0}, n});
  step(std::move(em));
  for (int n = 0; n < kNuclearLevels; ++n) res.trace.emitted_bins.push_back(n);
  res.round_states.push_back(res.state);
  return res;
}

inline SparseState frequency_target_state() {
  AmplitudeMap amps;
  for (int n = 0; n < kNuclearLevels; ++n) amps[BasisLabel{static_cast<std::uint8_t>(n), 0, BasisLabel::bit(n)}] = 1.0;
  return SparseState::normalized(Register::spin_photon(kNuclearLevels), std::move(amps));
}

/// Mean fidelity of noisy time-bin trajectories against the noise-free output.
inline double mean_timebin_fidelity(const NoiseSpec& noise, const CavityParams& cavity, int trajectories,
                                    std::uint64_t seed, const TimingConfig& timing = {}) {
  if (trajectories < 1) throw ValidationError("trajectories", "must be >= 1");
  const SparseState ideal = run_timebin_protocol(NoiseSpec::off(), cavity, seed, timing).state;
  double sum = 0.0;
  for (int t = 0; t < trajectories; ++t) {
    const std::uint64_t s = RandomStream(seed, static_cast<std::uint64_t>(t)).next_u64();
    sum += fidelity(run_timebin_protocol(noise, cavity, s, timing).state, ideal);
  }
  return sum / trajectories;
}

// ---------------------------------------------------------------------------
// Decoupling.

struct DecoupleResult {
  int outcome = 0;             // nuclear index
  double probability = 0.0;
  SparseState photonic;        // conditional state before correction
  gate::PhaseCorrection correction;
  SparseState corrected;
};

namespace detail {

/// Mode paired with each nuclear level; throws unless the pairing is a
/// bijection with one photon per term and a common electron value.
inline std::vector<int> nuclear_mode_pairing(const SparseState& s) {
  const Register& r = s.reg();
  if (r.nuclear_dim != 8 || r.electron_dim != 2 || r.modes != kNuclearLevels) {
    throw ValidationError("state", "need an 8-level nucleus, an electron and 8 modes");
  }
  std::vector<int> mode_of(kNuclearLevels, -1);
  std::vector<bool> used(kNuclearLevels, false);
  const int electron = s.size() ? s.amplitudes().begin()->first.electron : 0;
  for (const auto& [l, a] : s.amplitudes()) {
    if (l.photons() != 1) throw ValidationError("state", "each term must carry exactly one photon");
    if (l.electron != electron) throw ValidationError("state", "electron is entangled with the photons");
    int m = 0;
    while (!l.occupied(m)) ++m;
    if (mode_of[l.nuclear] >= 0 || used[static_cast<std::size_t>(m)]) {
      throw ValidationError("state", "nuclear levels and modes are not paired one to one");
    }
    mode_of[l.nuclear] = m;
    used[static_cast<std::size_t>(m)] = true;
  }
  for (int n = 0; n < kNuclearLevels; ++n)
    if (mode_of[static_cast<std::size_t>(n)] < 0) throw ValidationError("state", "missing nuclear level in pairing");
  return mode_of;
}

}  // namespace detail

/// Decoupling for a given measurement outcome. `u` replaces the Hadamard;
/// any unitary with flat entry moduli works.
inline DecoupleResult decouple_nucleus_outcome(const SparseState& state, int outcome, const CMatrix& u) {
  const auto mode_of = detail::nuclear_mode_pairing(state);
  const SparseState rotated = apply_unitary(state, u, Selector::nuclear());
  Measurement m = project(rotated, Selector::nuclear(), outcome);
  DecoupleResult res;
  res.outcome = outcome;
  res.probability = m.probability;
  res.photonic = photonic_part(m.state);
  res.correction.phases.assign(kNuclearLevels, 0.0);
  for (int n = 0; n < kNuclearLevels; ++n) {
    res.correction.phases[static_cast<std::size_t>(mode_of[static_cast<std::size_t>(n)])] =
        -std::arg(u(static_cast<std::size_t>(outcome), static_cast<std::size_t>(n)));
  }
  res.corrected = SparseState::normalized(res.photonic.reg(),
                                          apply_mode_phases(res.photonic, res.correction.phases).amplitudes());
  return res;
}

inline DecoupleResult decouple_nucleus(const SparseState& state, std::uint64_t seed,
                                       const CMatrix& u = qudit_hadamard_matrix()) {
  detail::nuclear_mode_pairing(state);
  const Measurement m = measure_projective(apply_unitary(state, u, Selector::nuclear()), Selector::nuclear(), seed);
  return decouple_nucleus_outcome(state, m.outcome, u);
}

}  // namespace sbq
