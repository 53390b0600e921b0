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

// Distribution of independent single photons to K parties, post-selection on
// one photon per party, and Bell-pair extraction.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/state.hpp"

namespace sbq {

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  Rational reduced() const {
    const std::uint64_t g = std::gcd(num, den);
    return g == 0 ? *this : Rational{num / g, den / g};
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    const auto x = a.reduced();
    const auto y = b.reduced();
    return x.num == y.num && x.den == y.den;
  }
};

namespace detail {

inline void check_nk(int n, int k) {
  if (n < 1) throw ValidationError("n", "need at least one photon");
  if (k < 1) throw ValidationError("k", "need at least one party");
  if (n > k) throw ValidationError("n", "more photons than parties");
}

inline std::uint64_t checked_pow(std::uint64_t k, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > (std::uint64_t{1} << 62) / k) throw ValidationError("n", "k^n overflows 64 bits");
    r *= k;
  }
  return r;
}

}  // namespace detail

/// K!/(K-N)! / K^N as a reduced fraction.
inline Rational success_probability_exact(int n, int k) {
  detail::check_nk(n, k);
  std::uint64_t num = 1;
  for (int j = 0; j < n; ++j) num *= static_cast<std::uint64_t>(k - j);
  return Rational{num, detail::checked_pow(static_cast<std::uint64_t>(k), n)}.reduced();
}

/// The exact fraction in floating point; prod_{j<n} (k - j)/k once k^n
/// leaves 64 bits.
inline double success_probability(int n, int k) {
  detail::check_nk(n, k);
  std::uint64_t total = 1;
  bool fits = true;
  for (int j = 0; j < n && fits; ++j) {
    fits = total <= (std::uint64_t{1} << 53) / static_cast<std::uint64_t>(k);
    total *= static_cast<std::uint64_t>(k);
  }
  if (fits) return success_probability_exact(n, k).value();
  double p = 1.0;
  for (int j = 0; j < n; ++j) p *= static_cast<double>(k - j) / k;
  return p;
}

inline constexpr std::uint64_t kEnumerationBound = 10'000'000;

/// Counts assignments of n photons to k parties with all parties distinct.
/// The result is good/k^n, not reduced.
inline Rational brute_force_success_oracle_exact(int n, int k) {
  detail::check_nk(n, k);
  if (k > 64) throw ModelError("enumeration_bound", "k above 64");
  const std::uint64_t total = detail::checked_pow(static_cast<std::uint64_t>(k), n);
  if (total > kEnumerationBound) throw ModelError("enumeration_bound", "k^n exceeds 1e7");
  std::vector<int> digit(static_cast<std::size_t>(n), 0);
  std::uint64_t good = 0;
  for (std::uint64_t c = 0; c < total; ++c) {
    std::uint64_t seen = 0;
    bool ok = true;
    for (int d : digit) {
      const std::uint64_t bit = std::uint64_t{1} << d;
      if (seen & bit) {
        ok = false;
        break;
      }
      seen |= bit;
    }
    good += ok;
    for (auto& d : digit) {
      if (++d < k) break;
      d = 0;
    }
  }
  return Rational{good, total};
}

inline double brute_force_success_oracle(int n, int k) { return brute_force_success_oracle_exact(n, k).value(); }

// ---------------------------------------------------------------------------
// Distribution and post-selection.

struct Distribution {
  SparseState state;             // post-selected, renormalized
  PartyLayout layout;            // over the combined register
  std::vector<int> copy_of_mode;
  double success_mass = 0.0;
};

/// Tensor product of photonic single-photon states, copy c's modes appended
/// after copy c-1's, then projection onto at most one photon per party.
inline Distribution distribute_and_postselect(const std::vector<SparseState>& states,
                                              const std::vector<PartyLayout>& layouts) {
  if (states.empty()) throw ValidationError("states", "need at least one photon copy");
  if (layouts.size() != states.size()) throw ValidationError("layouts", "need one layout per copy");
  Distribution d;
  d.layout.parties = layouts.front().parties;
  SparseState joint = SparseState::vacuum(0);
  for (std::size_t c = 0; c < states.size(); ++c) {
    const Register& r = states[c].reg();
    if (r.nuclear_dim != 1 || r.electron_dim != 1) throw ValidationError("states", "copies must be photonic");
    validate(layouts[c], r.modes);
    if (layouts[c].parties != d.layout.parties) throw ValidationError("layouts", "copies disagree on party count");
    joint = tensor_product(joint, states[c]);
    d.layout.mode_to_party.insert(d.layout.mode_to_party.end(), layouts[c].mode_to_party.begin(),
                                  layouts[c].mode_to_party.end());
    d.copy_of_mode.insert(d.copy_of_mode.end(), static_cast<std::size_t>(r.modes), static_cast<int>(c));
  }
  AmplitudeMap kept;
  double total = 0.0;
  for (const auto& [l, a] : joint.amplitudes()) {
    total += std::norm(a);
    const auto counts = party_counts(l, d.layout);
    bool ok = true;
    for (int n : counts) ok = ok && n <= 1;
    if (ok) kept[l] = a;
  }
  if (kept.empty()) throw ModelError("empty_postselection", "no term gives every party at most one photon");
  double mass = 0.0;
  for (const auto& [l, a] : kept) mass += std::norm(a);
  d.success_mass = mass / total;
  d.state = SparseState::normalized(joint.reg(), std::move(kept));
  return d;
}

/// Each of k parties owns one mode of each copy.
inline Distribution distribute_w_states(int copies, int k) {
  std::vector<SparseState> s(static_cast<std::size_t>(copies), w_state(k));
  std::vector<PartyLayout> l(static_cast<std::size_t>(copies), PartyLayout::one_mode_each(k));
  return distribute_and_postselect(s, l);
}

// ---------------------------------------------------------------------------
// Bell pairs.

struct BellPair {
  int first = 0;
  int second = 1;
  SparseState state;  // modes [first.c0, first.c1, second.c0, second.c1]
  double probability = 0.0;
};

namespace detail {

inline int mode_for(const Distribution& d, int party, int copy) {
  int found = -1;
  for (std::size_t m = 0; m < d.layout.mode_to_party.size(); ++m) {
    if (d.layout.mode_to_party[m] == party && d.copy_of_mode[m] == copy) {
      if (found >= 0) throw ValidationError("layout", "party owns several modes of one copy");
      found = static_cast<int>(m);
    }
  }
  if (found < 0) throw ValidationError("layout", "party owns no mode of a copy");
  return found;
}

}  // namespace detail

/// Conditions the post-selected two-photon state on the photons sitting with
/// parties `pair.first` and `pair.second` (either order).
inline BellPair extract_bell_state(const Distribution& d, std::pair<int, int> pair) {
  const auto [p, q] = pair;
  if (p == q) throw ValidationError("pair", "parties must differ");
  if (p < 0 || q < 0 || p >= d.layout.parties || q >= d.layout.parties) throw ValidationError("pair", "out of range");
  int copies = 0;
  for (int c : d.copy_of_mode) copies = std::max(copies, c + 1);
  if (copies != 2) throw ValidationError("state", "Bell extraction needs exactly two photon copies");
  const int pm[2] = {detail::mode_for(d, p, 0), detail::mode_for(d, p, 1)};
  const int qm[2] = {detail::mode_for(d, q, 0), detail::mode_for(d, q, 1)};
  AmplitudeMap out;
  double prob = 0.0;
  for (const auto& [l, a] : d.state.amplitudes()) {
    BasisLabel o;
    int hits = 0;
    for (int c = 0; c < 2; ++c) {
      if (l.occupied(pm[c])) o = o.with_photon(c, true), ++hits;
      if (l.occupied(qm[c])) o = o.with_photon(2 + c, true), ++hits;
    }
    if (hits != 2 || l.photons() != 2) continue;
    out[o] += a;
    prob += std::norm(a);
  }
  if (out.empty()) throw ModelError("zero_support", "pair never receives both photons");
  return {p, q, SparseState::normalized(Register::photonic(4), std::move(out)), prob};
}

/// (|1001> + |0110>)/sqrt(2) over [A.c0, A.c1, B.c0, B.c1].
inline SparseState psi_plus() {
  AmplitudeMap m;
  m[BasisLabel{0, 0, BasisLabel::bit(0) | BasisLabel::bit(3)}] = 1.0;
  m[BasisLabel{0, 0, BasisLabel::bit(1) | BasisLabel::bit(2)}] = 1.0;
  return SparseState::normalized(Register::photonic(4), std::move(m));
}

inline double bell_fidelity(const SparseState& s) {
  const Register& r = s.reg();
  if (r.nuclear_dim != 1 || r.electron_dim != 1 || r.modes != 4) {
    throw ValidationError("state", "need two parties with two modes each");
  }
  return fidelity(psi_plus(), s);
}

/// All unordered pairs p < q, lexicographic.
inline std::vector<BellPair> bell_pairs(const Distribution& d) {
  std::vector<BellPair> out;
  for (int p = 0; p < d.layout.parties; ++p)
    for (int q = p + 1; q < d.layout.parties; ++q) out.push_back(extract_bell_state(d, {p, q}));
  return out;
}

/// Ordered patterns (party of photon 0, party of photon 1) with support.
inline std::size_t ordered_pattern_count(const Distribution& d) {
  std::map<std::vector<int>, int> seen;
  for (const auto& [l, a] : d.state.amplitudes()) {
    std::vector<int> pat;
    for (std::size_t m = 0; m < d.copy_of_mode.size(); ++m)
      if (l.occupied(static_cast<int>(m))) pat.push_back(d.layout.mode_to_party[m]);
    seen[pat] = 1;
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Pattern statistics.

inline constexpr int kLost = -1;

struct PatternReport {
  int photons = 0;
  int parties = 0;
  /// Party per photon (kLost for a lost photon) -> probability.
  std::map<std::vector<int>, double> patterns;
  double success_mass = 0.0;
  /// q_i over the all-distinct patterns, lexicographic.
  std::map<std::vector<int>, double> normalized;

  static std::string pattern_string(const std::vector<int>& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "-" : "") + (p[i] == kLost ? std::string("x") : std::to_string(p[i]));
    return s;
  }

  /// `pattern,probability,q_normalized`; q is empty for failure patterns.
  std::string csv() const {
    std::ostringstream os;
    os << "pattern,probability,q_normalized\n";
    for (const auto& [pat, pr] : patterns) {
      os << pattern_string(pat) << ',' << format_fixed(pr) << ',';
      if (const auto it = normalized.find(pat); it != normalized.end()) os << format_fixed(it->second);
      os << '\n';
    }
    return os.str();
  }
};

inline bool all_distinct_parties(const std::vector<int>& pat) {
  for (std::size_t i = 0; i < pat.size(); ++i) {
    if (pat[i] == kLost) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (pat[i] == pat[j]) return false;
  }
  return true;
}

/// Every injective assignment of `photons` photons to `parties` parties.
inline std::vector<std::vector<int>> success_patterns(int photons, int parties) {
  detail::check_nk(photons, parties);
  std::vector<std::vector<int>> out;
  std::vector<int> pat(static_cast<std::size_t>(photons), 0);
  for (;;) {
    if (all_distinct_parties(pat)) out.push_back(pat);
    int i = photons - 1;
    while (i >= 0 && ++pat[static_cast<std::size_t>(i)] == parties) pat[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return out;
}

/// Fills success_mass and q_i from `patterns`.
inline void finalize(PatternReport& r) {
  for (const auto& pat : success_patterns(r.photons, r.parties)) r.patterns.try_emplace(pat, 0.0);
  r.success_mass = 0.0;
  for (const auto& [pat, p] : r.patterns)
    if (all_distinct_parties(pat)) r.success_mass += p;
  r.normalized.clear();
  if (r.success_mass <= 0.0) return;
  for (const auto& [pat, p] : r.patterns)
    if (all_distinct_parties(pat)) r.normalized[pat] = p / r.success_mass;
}

/// Exact pattern statistics of the (not post-selected) product of photon
/// copies under independent per-mode loss. Photon c is the one in copy c.
inline PatternReport pattern_report(const SparseState& joint, const PartyLayout& layout,
                                    const std::vector<int>& copy_of_mode, const std::vector<double>& loss) {
  const int modes = joint.reg().modes;
  validate(layout, modes);
  if (static_cast<int>(copy_of_mode.size()) != modes) throw ValidationError("copy_of_mode", "one entry per mode");
  if (!loss.empty() && static_cast<int>(loss.size()) != modes) throw ValidationError("loss", "one entry per mode");
  for (double p : loss)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("loss", "probabilities must lie in [0, 1]");
  int copies = 0;
  for (int c : copy_of_mode) copies = std::max(copies, c + 1);
  PatternReport r;
  r.photons = copies;
  r.parties = layout.parties;
  for (const auto& [l, a] : joint.amplitudes()) {
    std::vector<int> mode_of(static_cast<std::size_t>(copies), -1);
    for (int m = 0; m < modes; ++m) {
      if (!l.occupied(m)) continue;
      auto& slot = mode_of[static_cast<std::size_t>(copy_of_mode[static_cast<std::size_t>(m)])];
      if (slot >= 0) throw ValidationError("state", "copy holds more than one photon");
      slot = m;
    }
    for (int m : mode_of)
      if (m < 0) throw ValidationError("state", "copy holds no photon");
    const double w = std::norm(a);
    for (std::uint32_t lost = 0; lost < (1u << copies); ++lost) {
      double p = w;
      std::vector<int> pat(static_cast<std::size_t>(copies));
      for (int c = 0; c < copies; ++c) {
        const int m = mode_of[static_cast<std::size_t>(c)];
        const double pl = loss.empty() ? 0.0 : loss[static_cast<std::size_t>(m)];
        const bool is_lost = (lost >> c) & 1u;
        p *= is_lost ? pl : 1.0 - pl;
        pat[static_cast<std::size_t>(c)] = is_lost ? kLost : layout.mode_to_party[static_cast<std::size_t>(m)];
      }
      if (p > 0.0) r.patterns[pat] += p;
    }
  }
  finalize(r);
  return r;
}

inline double distance_from_uniformity(const PatternReport& r) {
  if (r.normalized.empty()) throw ModelError("empty_success_set", "no success pattern has probability mass");
  const double target = 1.0 / static_cast<double>(r.normalized.size());
  double d = 0.0;
  for (const auto& [pat, q] : r.normalized) d += (q - target) * (q - target);
  return d;
}

}  // namespace sbq
