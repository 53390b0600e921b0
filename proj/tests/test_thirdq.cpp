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

#include "sbq/thirdq.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sbq/rng.hpp"

using namespace sbq;

namespace {

// Independent counter: recursive count of injective maps n -> k.
std::uint64_t count_injective(int n, int k) { return n == 0 ? 1 : static_cast<std::uint64_t>(k) * count_injective(n - 1, k - 1); }

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

Distribution w8_pair() { return distribute_w_states(2, 8); }

}  // namespace

TEST(Counting, TwoPhotonsEightParties) {
  EXPECT_EQ(success_probability(2, 8), 0.875);
  const Rational r = success_probability_exact(2, 8);
  EXPECT_EQ(r.reduced(), (Rational{7, 8}));
  const Rational o = brute_force_success_oracle_exact(2, 8);
  EXPECT_EQ(o.num, 56u);
  EXPECT_EQ(o.den, 64u);
}

TEST(Counting, SinglePhotonAlwaysSucceeds) {
  for (int k = 1; k <= 64; ++k) EXPECT_EQ(success_probability(1, k), 1.0);
}

TEST(Counting, FourPhotonsSixtyFourParties) {
  const Rational r = success_probability_exact(4, 64);
  EXPECT_EQ(r.reduced(), (Rational{238266, 262144}.reduced()));
  EXPECT_NEAR(r.value(), 15249024.0 / 16777216.0, 1e-15);
  EXPECT_NEAR(success_probability(4, 64), 0.9089127, 1e-7);
  EXPECT_EQ(count_injective(4, 64), 64ull * 63 * 62 * 61);
}

TEST(Counting, TwoPartiesBruteForce) { EXPECT_EQ(brute_force_success_oracle(2, 2), 0.5); }

TEST(Counting, FormulaEqualsOracleExactly) {
  for (int n = 1; n <= 4; ++n)
    for (int k = n; k <= 10; ++k) {
      const Rational f = success_probability_exact(n, k).reduced();
      const Rational o = brute_force_success_oracle_exact(n, k).reduced();
      EXPECT_EQ(f, o) << n << "," << k;
      EXPECT_EQ(o, (Rational{count_injective(n, k), ipow(static_cast<std::uint64_t>(k), n)}.reduced()));
      EXPECT_EQ(success_probability(n, k), brute_force_success_oracle(n, k));
    }
}

TEST(Counting, Errors) {
  try {
    success_probability(3, 2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "n");
  }
  EXPECT_THROW(success_probability(0, 4), ValidationError);
  try {
    brute_force_success_oracle(5, 64);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.label(), "enumeration_bound");
  }
}

TEST(Distribute, TwoW8Copies) {
  const Distribution d = w8_pair();
  EXPECT_EQ(d.state.size(), 56u);
  EXPECT_NEAR(d.success_mass, 0.875, 1e-12);
  EXPECT_NEAR(d.state.norm2(), 1.0, 1e-12);
  for (const auto& [l, a] : d.state.amplitudes()) {
    EXPECT_EQ(l.photons(), 2);
    EXPECT_NEAR(std::norm(a), 1.0 / 56.0, 1e-12);
    for (int n : party_counts(l, d.layout)) EXPECT_LE(n, 1);
  }
}

TEST(Distribute, SingleCopyUnchanged) {
  const Distribution d = distribute_w_states(1, 8);
  EXPECT_EQ(d.success_mass, 1.0);
  EXPECT_GE(fidelity(d.state, w_state(8)), 1.0 - 1e-12);
  EXPECT_EQ(d.state.size(), 8u);
}

TEST(Distribute, TwoW2Copies) {
  const Distribution d = distribute_w_states(2, 2);
  EXPECT_EQ(d.state.size(), 2u);
  EXPECT_NEAR(d.success_mass, 0.5, 1e-12);
}

TEST(Distribute, MassMatchesFormula) {
  for (int n = 1; n <= 3; ++n)
    for (int k = n; k <= 8; ++k)
      EXPECT_NEAR(distribute_w_states(n, k).success_mass, success_probability(n, k), 1e-12) << n << "," << k;
}

TEST(Distribute, EmptyPostselection) {
  // Both photons always land with party 0.
  const SparseState one = SparseState::basis(Register::photonic(2), BasisLabel{}.with_photon(0, true));
  const PartyLayout l = PartyLayout::one_mode_each(2);
  try {
    distribute_and_postselect({one, one}, {l, l});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.label(), "empty_postselection");
  }
  EXPECT_THROW(distribute_and_postselect({}, {}), ValidationError);
  EXPECT_THROW(distribute_and_postselect({one}, {l, l}), ValidationError);
}

TEST(Bell, EveryPairIsPsiPlus) {
  const auto pairs = bell_pairs(w8_pair());
  ASSERT_EQ(pairs.size(), 28u);
  double sum = 0.0;
  for (const auto& p : pairs) {
    EXPECT_NEAR(bell_fidelity(p.state), 1.0, 1e-12) << p.first << "-" << p.second;
    EXPECT_NEAR(p.probability, 1.0 / 28.0, 1e-12);
    EXPECT_EQ(p.state.size(), 2u);
    sum += p.probability;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Bell, PairProbabilityFromCounting) {
  EXPECT_NEAR(extract_bell_state(w8_pair(), {0, 1}).probability, (2.0 / 64.0) / 0.875, 1e-12);
  EXPECT_NEAR(extract_bell_state(w8_pair(), {1, 0}).probability, 1.0 / 28.0, 1e-12);
}

TEST(Bell, OrderedAndUnorderedCounts) {
  const Distribution d = w8_pair();
  EXPECT_EQ(ordered_pattern_count(d), 56u);
  EXPECT_EQ(bell_pairs(d).size(), 28u);
}

TEST(Bell, ExtractedStateStructure) {
  const BellPair b = extract_bell_state(w8_pair(), {2, 5});
  EXPECT_EQ(b.state.reg().modes, 4);
  EXPECT_NEAR(std::norm(b.state.amplitude(BasisLabel{0, 0, BasisLabel::bit(0) | BasisLabel::bit(3)})), 0.5, 1e-12);
  EXPECT_NEAR(std::norm(b.state.amplitude(BasisLabel{0, 0, BasisLabel::bit(1) | BasisLabel::bit(2)})), 0.5, 1e-12);
}

TEST(Bell, FidelityEdgeCases) {
  EXPECT_NEAR(bell_fidelity(psi_plus()), 1.0, 1e-15);
  EXPECT_EQ(bell_fidelity(SparseState::vacuum(4)), 0.0);
  EXPECT_THROW(bell_fidelity(SparseState::vacuum(3)), ValidationError);
}

TEST(Bell, ErrorPaths) {
  const Distribution d = w8_pair();
  EXPECT_THROW(extract_bell_state(d, {3, 3}), ValidationError);
  EXPECT_THROW(extract_bell_state(d, {0, 8}), ValidationError);
  EXPECT_THROW(extract_bell_state(distribute_w_states(1, 8), {0, 1}), ValidationError);
  // Copy 1 mirrored: the pair still has support.
  const SparseState a = SparseState::basis(Register::photonic(2), BasisLabel{}.with_photon(0, true));
  const Distribution skew =
      distribute_and_postselect({a, a}, {PartyLayout::one_mode_each(2), PartyLayout{2, {1, 0}}});
  EXPECT_NO_THROW(extract_bell_state(skew, {0, 1}));
  const Distribution none = distribute_and_postselect({w_state(3), w_state(3)}, {PartyLayout::one_mode_each(3), PartyLayout::one_mode_each(3)});
  const SparseState only01 = SparseState::normalized(
      none.state.reg(), {{BasisLabel{0, 0, BasisLabel::bit(0) | BasisLabel::bit(4)}, 1.0}});
  const Distribution restricted{only01, none.layout, none.copy_of_mode, 1.0};
  try {
    extract_bell_state(restricted, {0, 2});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.label(), "zero_support");
  }
}

TEST(Bell, PerPartyPhasesChangeNothing) {
  const Distribution d = w8_pair();
  const auto base = bell_pairs(d);
  RandomStream rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> party_phase(8);
    for (auto& x : party_phase) x = 2.0 * std::numbers::pi * rng.uniform();
    std::vector<double> mode_phase(16);
    for (std::size_t m = 0; m < 16; ++m) mode_phase[m] = party_phase[static_cast<std::size_t>(d.layout.mode_to_party[m])];
    Distribution rotated = d;
    rotated.state = apply_mode_phases(d.state, mode_phase);
    const auto pairs = bell_pairs(rotated);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      EXPECT_NEAR(pairs[k].probability, base[k].probability, 1e-12);
      EXPECT_NEAR(bell_fidelity(pairs[k].state), 1.0, 1e-12);
    }
  }
}

TEST(Bell, SinglePartyPhaseOnBothModesKeepsFidelity) {
  const BellPair b = extract_bell_state(w8_pair(), {0, 1});
  for (double theta : {0.3, 1.0, 2.5, std::numbers::pi}) {
    const SparseState r = apply_mode_phases(b.state, {theta, theta, 0.0, 0.0});
    EXPECT_NEAR(bell_fidelity(r), 1.0, 1e-12);
  }
}

TEST(Patterns, LosslessTwoW8) {
  PartyLayout layout = PartyLayout::one_mode_each(8);
  layout.mode_to_party.insert(layout.mode_to_party.end(), layout.mode_to_party.begin(), layout.mode_to_party.end());
  std::vector<int> copy(16, 0);
  std::fill(copy.begin() + 8, copy.end(), 1);
  const PatternReport r = pattern_report(tensor_product(w_state(8), w_state(8)), layout, copy, {});
  EXPECT_EQ(r.patterns.size(), 64u);
  EXPECT_EQ(r.normalized.size(), 56u);
  EXPECT_NEAR(r.success_mass, 0.875, 1e-12);
  double total = 0.0, qsum = 0.0;
  for (const auto& [p, v] : r.patterns) total += v;
  for (const auto& [p, q] : r.normalized) qsum += q;
  EXPECT_NEAR(total, 1.0, 1e-10);
  EXPECT_NEAR(qsum, 1.0, 1e-12);
  EXPECT_LE(distance_from_uniformity(r), 1e-12);
}

TEST(Patterns, SuccessPatternOrder) {
  const auto pats = success_patterns(2, 3);
  const std::vector<std::vector<int>> want{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  EXPECT_EQ(pats, want);
  EXPECT_EQ(success_patterns(3, 8).size(), 336u);
}

TEST(Patterns, CsvSchema) {
  PartyLayout layout{2, {0, 1, 0, 1}};
  const PatternReport r = pattern_report(tensor_product(w_state(2), w_state(2)), layout, {0, 0, 1, 1}, {0.1, 0.1, 0.1, 0.1});
  const std::string csv = r.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "pattern,probability,q_normalized");
  EXPECT_NE(csv.find("0-1,"), std::string::npos);
  EXPECT_NE(csv.find("x-x,"), std::string::npos);
  EXPECT_NE(csv.find("0-0,0.202500000000,\n"), std::string::npos);
  EXPECT_NE(csv.find("0-1,0.202500000000,0.500000000000\n"), std::string::npos);
}

TEST(Patterns, EmptySuccessSet) {
  PartyLayout layout{2, {0, 1, 0, 1}};
  const PatternReport r = pattern_report(tensor_product(w_state(2), w_state(2)), layout, {0, 0, 1, 1}, {1.0, 1.0, 1.0, 1.0});
  try {
    distance_from_uniformity(r);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.label(), "empty_success_set");
  }
}
