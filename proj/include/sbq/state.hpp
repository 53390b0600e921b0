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

// Sparse pure states over  nucleus (x) electron (x) photonic modes.
//
// Modes hold 0 or 1 photon and a register carries at most four photons, so a
// basis label packs into a few bytes and protocol states have tens of terms.
// States are immutable values: every operation returns a new state.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/linalg.hpp"
#include "sbq/rng.hpp"

namespace sbq {

inline constexpr int kMaxModes = 64;
inline constexpr int kMaxPhotons = 4;
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kNormTolerance = 1e-10;

/// Shape of a composite register. A matter dimension of 1 means the
/// subsystem is absent (purely photonic states).
struct Register {
  int nuclear_dim = 1;   // 1 or 8
  int electron_dim = 1;  // 1 or 2
  int modes = 0;

  static constexpr Register photonic(int modes) { return {1, 1, modes}; }
  static constexpr Register spin_photon(int modes) { return {8, 2, modes}; }

  friend constexpr bool operator==(const Register&, const Register&) = default;
};

inline void validate(const Register& r) {
  if (r.nuclear_dim != 1 && r.nuclear_dim != 8) throw ValidationError("register.nuclear_dim", "must be 1 or 8");
  if (r.electron_dim != 1 && r.electron_dim != 2) throw ValidationError("register.electron_dim", "must be 1 or 2");
  if (r.modes < 0 || r.modes > kMaxModes) throw ValidationError("register.modes", "must be in [0, 64]");
}

/// One computational basis ket. Mode i is stored at bit (63 - i), so integer
/// order on `occupation` equals lexicographic order of the bitstring written
/// mode 0 first.
struct BasisLabel {
  std::uint8_t nuclear = 0;
  std::uint8_t electron = 0;
  std::uint64_t occupation = 0;

  static constexpr std::uint64_t bit(int mode) noexcept { return std::uint64_t{1} << (63 - mode); }

  constexpr bool occupied(int mode) const noexcept { return (occupation & bit(mode)) != 0; }
  constexpr BasisLabel with_photon(int mode, bool present) const noexcept {
    BasisLabel l = *this;
    l.occupation = present ? (l.occupation | bit(mode)) : (l.occupation & ~bit(mode));
    return l;
  }
  constexpr int photons() const noexcept { return std::popcount(occupation); }

  std::string bitstring(int modes) const {
    std::string s(static_cast<std::size_t>(modes), '0');
    for (int m = 0; m < modes; ++m)
      if (occupied(m)) s[static_cast<std::size_t>(m)] = '1';
    return s;
  }

  friend constexpr auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

using AmplitudeMap = std::map<BasisLabel, cplx>;

class SparseState {
 public:
  SparseState() = default;

  /// Normalizes, prunes entries below 1e-14 and rotates the global phase so
  /// that the first amplitude in label order is real positive.
  static SparseState normalized(const Register& reg, AmplitudeMap amps) {
    SparseState s(reg, std::move(amps));
    s.prune();
    const double n2 = s.norm2();
    if (!(n2 > 0.0)) throw ModelError("zero_norm", "cannot normalize an empty state");
    const double inv = 1.0 / std::sqrt(n2);
    const cplx first = s.amps_.begin()->second;
    const cplx phase = std::conj(first) / std::abs(first) * inv;
    for (auto& [label, a] : s.amps_) a *= phase;
    s.prune();
    return s;
  }

  /// For results of unitary maps: prunes but leaves norm and phase alone.
  /// The norm is checked against 1e-10.
  static SparseState unitary_image(const Register& reg, AmplitudeMap amps) {
    SparseState s(reg, std::move(amps));
    s.prune();
    if (std::abs(s.norm2() - 1.0) > kNormTolerance) {
      throw ModelError("norm", "unitary map changed the norm by " + std::to_string(s.norm2() - 1.0));
    }
    return s;
  }

  static SparseState basis(const Register& reg, const BasisLabel& l) { return normalized(reg, {{l, 1.0}}); }
  static SparseState vacuum(int modes) { return basis(Register::photonic(modes), {}); }

  const Register& reg() const noexcept { return reg_; }
  const AmplitudeMap& amplitudes() const noexcept { return amps_; }
  std::size_t size() const noexcept { return amps_.size(); }

  cplx amplitude(const BasisLabel& l) const {
    const auto it = amps_.find(l);
    return it == amps_.end() ? cplx{} : it->second;
  }

  double norm2() const {
    double s = 0.0;
    for (const auto& [l, a] : amps_) s += std::norm(a);
    return s;
  }

  template <class Pred>
  double probability(Pred&& pred) const {
    double s = 0.0;
    for (const auto& [l, a] : amps_)
      if (pred(l)) s += std::norm(a);
    return s;
  }

 private:
  SparseState(const Register& reg, AmplitudeMap amps) : reg_(reg), amps_(std::move(amps)) {
    validate(reg_);
    for (const auto& [l, a] : amps_) check_label(l);
  }

  void check_label(const BasisLabel& l) const {
    if (l.nuclear >= reg_.nuclear_dim) throw ValidationError("label.nuclear", "outside register");
    if (l.electron >= reg_.electron_dim) throw ValidationError("label.electron", "outside register");
    if (reg_.modes < kMaxModes && (l.occupation & ~mode_mask(reg_.modes)) != 0) {
      throw ValidationError("label.occupation", "photon outside the register's modes");
    }
    if (l.photons() > kMaxPhotons) throw ValidationError("label.occupation", "more than 4 photons");
  }

  static constexpr std::uint64_t mode_mask(int modes) noexcept {
    return modes == 0 ? 0 : (modes >= 64 ? ~std::uint64_t{0} : ~std::uint64_t{0} << (64 - modes));
  }

  void prune() {
    std::erase_if(amps_, [](const auto& kv) { return std::abs(kv.second) < kPruneThreshold; });
  }

  Register reg_{};
  AmplitudeMap amps_;
};

// ---------------------------------------------------------------------------
// Scalar products and comparisons.

inline cplx inner(const SparseState& a, const SparseState& b) {
  if (!(a.reg() == b.reg())) throw ValidationError("register", "inner product of different registers");
  cplx s{};
  for (const auto& [l, x] : a.amplitudes()) s += std::conj(x) * b.amplitude(l);
  return s;
}

inline double fidelity(const SparseState& a, const SparseState& b) { return std::norm(inner(a, b)); }

/// Equality up to global phase: |<a|b>|^2 >= 1 - 1e-9.
inline bool equal_up_to_phase(const SparseState& a, const SparseState& b, double tol = 1e-9) {
  return a.reg() == b.reg() && fidelity(a, b) >= 1.0 - tol;
}

/// normalize(alpha a + beta b).
inline SparseState superpose(cplx alpha, const SparseState& a, cplx beta, const SparseState& b) {
  if (!(a.reg() == b.reg())) throw ValidationError("register", "superposition of different registers");
  AmplitudeMap m;
  for (const auto& [l, x] : a.amplitudes()) m[l] += alpha * x;
  for (const auto& [l, x] : b.amplitudes()) m[l] += beta * x;
  return SparseState::normalized(a.reg(), std::move(m));
}

// ---------------------------------------------------------------------------
// Constructors for reference states.

/// |W_k> = k^{-1/2} sum_j |1_j>.
inline SparseState w_state(int k) {
  if (k < 1) throw ValidationError("k", "W state needs at least one mode");
  if (k > kMaxModes) throw ValidationError("k", "at most 64 modes");
  AmplitudeMap m;
  const double amp = 1.0 / std::sqrt(static_cast<double>(k));
  for (int j = 0; j < k; ++j) m[BasisLabel{}.with_photon(j, true)] = amp;
  return SparseState::normalized(Register::photonic(k), std::move(m));
}

/// a (x) b. Modes of b are appended after those of a. Each side may carry at
/// most one copy of a matter subsystem between them.
inline SparseState tensor_product(const SparseState& a, const SparseState& b) {
  const Register& ra = a.reg();
  const Register& rb = b.reg();
  if (ra.nuclear_dim > 1 && rb.nuclear_dim > 1) throw ValidationError("register", "both states carry a nucleus");
  if (ra.electron_dim > 1 && rb.electron_dim > 1) throw ValidationError("register", "both states carry an electron");
  if (ra.modes + rb.modes > kMaxModes) throw ValidationError("register", "combined register exceeds 64 modes");
  const Register out{std::max(ra.nuclear_dim, rb.nuclear_dim), std::max(ra.electron_dim, rb.electron_dim),
                     ra.modes + rb.modes};
  AmplitudeMap m;
  for (const auto& [la, xa] : a.amplitudes())
    for (const auto& [lb, xb] : b.amplitudes()) {
      BasisLabel l;
      l.nuclear = static_cast<std::uint8_t>(la.nuclear + lb.nuclear);
      l.electron = static_cast<std::uint8_t>(la.electron + lb.electron);
      l.occupation = la.occupation | (ra.modes >= 64 ? 0 : lb.occupation >> ra.modes);
      if (l.photons() > kMaxPhotons) throw ValidationError("register", "product exceeds the 4-photon cap");
      m[l] += xa * xb;
    }
  return SparseState::normalized(out, std::move(m));
}

// ---------------------------------------------------------------------------
// Subsystem selection, unitaries and measurement.

struct Selector {
  enum class Kind { Nuclear, Electron, Spin, Mode, Modes };
  Kind kind = Kind::Nuclear;
  int first = 0;  // Mode / Modes
  int count = 0;  // Modes

  static constexpr Selector nuclear() { return {Kind::Nuclear, 0, 0}; }
  static constexpr Selector electron() { return {Kind::Electron, 0, 0}; }
  /// nucleus (x) electron, composite index 2 n + e.
  static constexpr Selector spin() { return {Kind::Spin, 0, 0}; }
  static constexpr Selector mode(int m) { return {Kind::Mode, m, 1}; }
  /// A block of modes transformed as a linear-optical network on the
  /// single-photon subspace; the block vacuum is invariant.
  static constexpr Selector modes(int first, int count) { return {Kind::Modes, first, count}; }
};

namespace detail {

inline int selector_dim(const Register& r, const Selector& s) {
  switch (s.kind) {
    case Selector::Kind::Nuclear:
      if (r.nuclear_dim != 8) throw ValidationError("selector", "state has no nuclear register");
      return 8;
    case Selector::Kind::Electron:
      if (r.electron_dim != 2) throw ValidationError("selector", "state has no electron register");
      return 2;
    case Selector::Kind::Spin:
      if (r.nuclear_dim != 8 || r.electron_dim != 2) throw ValidationError("selector", "state has no spin register");
      return 16;
    case Selector::Kind::Mode:
      if (s.first < 0 || s.first >= r.modes) throw ValidationError("selector", "mode outside register");
      return 2;
    case Selector::Kind::Modes:
      if (s.count < 1 || s.first < 0 || s.first + s.count > r.modes) {
        throw ValidationError("selector", "mode block outside register");
      }
      return s.count;
  }
  return 0;
}

/// Local index of `l` within the selected subsystem; -1 for the vacuum of a
/// mode block (which every linear-optical map leaves alone).
inline int local_index(const BasisLabel& l, const Selector& s) {
  switch (s.kind) {
    case Selector::Kind::Nuclear: return l.nuclear;
    case Selector::Kind::Electron: return l.electron;
    case Selector::Kind::Spin: return 2 * l.nuclear + l.electron;
    case Selector::Kind::Mode: return l.occupied(s.first) ? 1 : 0;
    case Selector::Kind::Modes: {
      int found = -1;
      for (int m = s.first; m < s.first + s.count; ++m) {
        if (!l.occupied(m)) continue;
        if (found >= 0) throw ValidationError("selector", "mode-block unitary on more than one photon in the block");
        found = m - s.first;
      }
      return found;
    }
  }
  return 0;
}

inline BasisLabel with_local_index(BasisLabel l, const Selector& s, int idx) {
  switch (s.kind) {
    case Selector::Kind::Nuclear: l.nuclear = static_cast<std::uint8_t>(idx); break;
    case Selector::Kind::Electron: l.electron = static_cast<std::uint8_t>(idx); break;
    case Selector::Kind::Spin:
      l.nuclear = static_cast<std::uint8_t>(idx / 2);
      l.electron = static_cast<std::uint8_t>(idx % 2);
      break;
    case Selector::Kind::Mode: l = l.with_photon(s.first, idx == 1); break;
    case Selector::Kind::Modes:
      for (int m = s.first; m < s.first + s.count; ++m) l = l.with_photon(m, false);
      l = l.with_photon(s.first + idx, true);
      break;
  }
  return l;
}

}  // namespace detail

/// Applies `u` to the selected subsystem. `u` must be unitary within 1e-10.
inline SparseState apply_unitary(const SparseState& state, const CMatrix& u, const Selector& sel) {
  const int dim = detail::selector_dim(state.reg(), sel);
  if (u.rows() != static_cast<std::size_t>(dim) || !u.square()) {
    throw ValidationError("unitary", "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  }
  if (unitarity_defect(u) > 1e-10) throw ValidationError("unitary", "matrix is not unitary");
  AmplitudeMap out;
  for (const auto& [l, a] : state.amplitudes()) {
    const int col = detail::local_index(l, sel);
    if (col < 0) {
      out[l] += a;
      continue;
    }
    for (int r = 0; r < dim; ++r) {
      const cplx ur = u(static_cast<std::size_t>(r), static_cast<std::size_t>(col));
      if (ur == cplx{}) continue;
      out[detail::with_local_index(l, sel, r)] += ur * a;
    }
  }
  return SparseState::unitary_image(state.reg(), std::move(out));
}

/// Multiplies each term by exp(i sum_m phases[m] n_m). Diagonal, so it is
/// cheap and exact; used for phase corrections and per-party rotations.
inline SparseState apply_mode_phases(const SparseState& state, const std::vector<double>& phases) {
  if (static_cast<int>(phases.size()) != state.reg().modes) {
    throw ValidationError("phases", "need one phase per mode");
  }
  AmplitudeMap out;
  for (const auto& [l, a] : state.amplitudes()) {
    double theta = 0.0;
    for (int m = 0; m < state.reg().modes; ++m)
      if (l.occupied(m)) theta += phases[static_cast<std::size_t>(m)];
    out[l] = a * std::polar(1.0, theta);
  }
  return SparseState::unitary_image(state.reg(), std::move(out));
}

struct Measurement {
  int outcome = 0;
  SparseState state;
  double probability = 0.0;
};

/// Born-rule outcome probabilities of a projective measurement, indexed by
/// local outcome (nuclear index, electron index, composite index or
/// occupation of a single mode).
inline std::vector<double> outcome_probabilities(const SparseState& state, const Selector& sel) {
  if (sel.kind == Selector::Kind::Modes) throw ValidationError("selector", "measure single modes, not blocks");
  const int dim = detail::selector_dim(state.reg(), sel);
  std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
  for (const auto& [l, a] : state.amplitudes()) p[static_cast<std::size_t>(detail::local_index(l, sel))] += std::norm(a);
  return p;
}

/// Projects onto an outcome chosen by the caller and renormalizes.
inline Measurement project(const SparseState& state, const Selector& sel, int outcome) {
  const auto probs = outcome_probabilities(state, sel);
  if (outcome < 0 || outcome >= static_cast<int>(probs.size())) throw ValidationError("outcome", "out of range");
  AmplitudeMap kept;
  for (const auto& [l, a] : state.amplitudes())
    if (detail::local_index(l, sel) == outcome) kept[l] = a;
  if (kept.empty()) throw ModelError("zero_probability", "outcome has no support");
  return {outcome, SparseState::normalized(state.reg(), std::move(kept)), probs[static_cast<std::size_t>(outcome)]};
}

/// Samples an outcome from the seeded stream, then projects and renormalizes.
inline Measurement measure_projective(const SparseState& state, const Selector& sel, std::uint64_t seed) {
  const auto probs = outcome_probabilities(state, sel);
  RandomStream rng(seed);
  const double u = rng.uniform() * std::accumulate(probs.begin(), probs.end(), 0.0);
  double acc = 0.0;
  int outcome = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    outcome = static_cast<int>(k);
    acc += probs[k];
    if (u < acc) break;
  }
  return project(state, sel, outcome);
}

/// Drops the matter registers. Every term must share one nuclear and one
/// electron value, i.e. the photons are in a product state with the spins.
inline SparseState photonic_part(const SparseState& state) {
  if (state.size() == 0) throw ValidationError("state", "empty");
  const auto& first = state.amplitudes().begin()->first;
  AmplitudeMap out;
  for (const auto& [l, a] : state.amplitudes()) {
    if (l.nuclear != first.nuclear || l.electron != first.electron) {
      throw ValidationError("state", "photons are still entangled with the spin");
    }
    out[BasisLabel{0, 0, l.occupation}] += a;
  }
  return SparseState::normalized(Register::photonic(state.reg().modes), std::move(out));
}

// ---------------------------------------------------------------------------
// Party layouts and occupation statistics.

struct PartyLayout {
  int parties = 0;
  std::vector<int> mode_to_party;

  /// Mode j goes to party j.
  static PartyLayout one_mode_each(int k) {
    PartyLayout l{k, {}};
    for (int j = 0; j < k; ++j) l.mode_to_party.push_back(j);
    return l;
  }
  /// Party p holds modes [p*w, (p+1)*w).
  static PartyLayout blocks(int k, int modes_per_party) {
    PartyLayout l{k, {}};
    for (int p = 0; p < k; ++p)
      for (int j = 0; j < modes_per_party; ++j) l.mode_to_party.push_back(p);
    return l;
  }

  std::vector<int> modes_of(int party) const {
    std::vector<int> out;
    for (std::size_t m = 0; m < mode_to_party.size(); ++m)
      if (mode_to_party[m] == party) out.push_back(static_cast<int>(m));
    return out;
  }
};

inline void validate(const PartyLayout& layout, int modes) {
  if (layout.parties < 1) throw ValidationError("layout.parties", "need at least one party");
  if (static_cast<int>(layout.mode_to_party.size()) != modes) {
    throw ValidationError("layout.mode_to_party", "must assign every mode");
  }
  for (int p : layout.mode_to_party)
    if (p < 0 || p >= layout.parties) throw ValidationError("layout.mode_to_party", "party index out of range");
}

inline std::vector<int> party_counts(const BasisLabel& l, const PartyLayout& layout) {
  std::vector<int> counts(static_cast<std::size_t>(layout.parties), 0);
  for (std::size_t m = 0; m < layout.mode_to_party.size(); ++m)
    if (l.occupied(static_cast<int>(m))) ++counts[static_cast<std::size_t>(layout.mode_to_party[m])];
  return counts;
}

/// Probability of each per-party photon-count vector.
inline std::map<std::vector<int>, double> occupation_distribution(const SparseState& state, const PartyLayout& layout) {
  validate(layout, state.reg().modes);
  std::map<std::vector<int>, double> out;
  for (const auto& [l, a] : state.amplitudes()) out[party_counts(l, layout)] += std::norm(a);
  return out;
}

// ---------------------------------------------------------------------------
// First- and third-quantized pictures.

struct FirstQuantizedTerm {
  std::vector<int> modes;  // photon k sits in modes[k]
  double amplitude = 0.0;
};

/// Symmetrized first-quantized form of a singly occupied Fock ket: all N!
/// orderings of the occupied modes, lexicographic, amplitude 1/sqrt(N!).
inline std::vector<FirstQuantizedTerm> first_quantized_expansion(const std::vector<int>& occupations) {
  std::vector<int> occupied;
  for (std::size_t m = 0; m < occupations.size(); ++m) {
    if (occupations[m] < 0) throw ValidationError("occupations", "negative occupation");
    if (occupations[m] > 1) throw ValidationError("occupations", "multiple occupancy is out of scope");
    if (occupations[m] == 1) occupied.push_back(static_cast<int>(m));
  }
  if (occupied.size() > static_cast<std::size_t>(kMaxPhotons)) {
    throw ValidationError("occupations", "at most 4 photons");
  }
  double factorial = 1.0;
  for (std::size_t k = 2; k <= occupied.size(); ++k) factorial *= static_cast<double>(k);
  const double amp = 1.0 / std::sqrt(factorial);
  std::vector<FirstQuantizedTerm> out;
  do {
    out.push_back({occupied, amp});
  } while (std::next_permutation(occupied.begin(), occupied.end()));
  return out;
}

/// The maximally symmetric n-photon state with each of n parties holding one
/// photon in n local modes (party p owns modes [p*n, (p+1)*n)):
///   sum over permutations pi of  prod_p |1_{pi(p)}>_p , amplitude 1/sqrt(n!).
inline SparseState third_quantized_sigma(const std::vector<std::string>& parties, int modes_per_party = 4) {
  const int n = static_cast<int>(parties.size());
  if (n < 1 || n > kMaxPhotons) throw ValidationError("parties", "need 1 to 4 parties");
  if (modes_per_party != n) throw ValidationError("modes_per_party", "must equal the number of parties");
  if (std::set<std::string>(parties.begin(), parties.end()).size() != parties.size()) {
    throw ValidationError("parties", "duplicate party label");
  }
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  AmplitudeMap m;
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;
  const double amp = 1.0 / std::sqrt(factorial);
  do {
    BasisLabel l;
    for (int p = 0; p < n; ++p) l = l.with_photon(p * modes_per_party + perm[static_cast<std::size_t>(p)], true);
    m[l] = amp;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return SparseState::normalized(Register::photonic(n * modes_per_party), std::move(m));
}

// ---------------------------------------------------------------------------
// Text dump: "<nuclear>,<electron>,<occupation-bitstring>,<re>,<im>" per
// term, sorted by label.

inline std::string format_fixed(double x, int digits = 12) {
  const double quantum = 0.5 * std::pow(10.0, -digits);
  if (std::abs(x) < quantum) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string dump(const SparseState& state) {
  std::string out;
  for (const auto& [l, a] : state.amplitudes()) {
    out += std::to_string(l.nuclear) + "," + std::to_string(l.electron) + "," + l.bitstring(state.reg().modes) + "," +
           format_fixed(a.real()) + "," + format_fixed(a.imag()) + "\n";
  }
  return out;
}

}  // namespace sbq
