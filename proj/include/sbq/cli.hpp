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

// Command dispatch shared by the `sbq` tool and its tests.
//
// Every command prints `key=value` summary lines on `out`. Tabular data goes
// to cfg.out when set, otherwise it follows the summary on `out`.
// Exit codes: 0 ok, 1 model error, 2 invalid input.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "sbq/config.hpp"
#include "sbq/error.hpp"
#include "sbq/gates.hpp"
#include "sbq/loss.hpp"
#include "sbq/protocol.hpp"
#include "sbq/spin_model.hpp"
#include "sbq/state.hpp"
#include "sbq/thirdq.hpp"

namespace sbq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitModelError = 1;
inline constexpr int kExitInvalid = 2;



namespace cli {

inline std::string num(double x, int digits = 12) { return format_fixed(x, digits); }

inline void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("io", "cannot open " + path + " for writing");
  f << body;
  if (!f) throw ModelError("io", "write to " + path + " failed");
}

/// Writes `body` to cfg.out (+suffix) or appends it to `out`.
inline void emit(const RunConfig& cfg, const std::string& suffix, const std::string& body, std::ostream& out) {
  if (cfg.out.empty()) {
    out << body;
  } else {
    write_file(cfg.out + suffix, body);
    out << "output" << (suffix.empty() ? "" : suffix.substr(1) + "_output") << "=" << cfg.out + suffix << '\n';
  }
}

inline int run_spectrum(const RunConfig& cfg, std::ostream& out) {
  SpinSystemParams p = cfg.spin;
  if (cfg.calibrate) p.b0 = calibrate_b0(p, cfg.edsr_target_ghz, cfg.b0_low, cfg.b0_high);
  const Spectrum s = spectrum(build_hamiltonian(p));
  out << "b0_tesla=" << num(p.b0) << '\n';
  out << "edsr_emission_ghz=" << num(edsr_frequency(p)) << '\n';
  for (const auto& w : hierarchy_warnings(p)) out << "warning=" << w << '\n';
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
    out << "level=" << k << " label=" << s.dominant_labels[k].str() << " energy_ghz=" << num(s.eigenvalues[k]) << '\n';
  std::ostringstream csv;
  csv << "kind,from,to,frequency_ghz\n";
  for (auto kind : {TransitionKind::ESR, TransitionKind::NMR_down, TransitionKind::NMR_up, TransitionKind::EDSR}) {
    const auto t = transition_table(s, kind);
    out << to_string(kind) << "_count=" << t.entries.size() << '\n';
    for (const auto& e : t.entries)
      csv << to_string(kind) << ',' << e.from.str() << ',' << e.to.str() << ',' << num(e.frequency_ghz) << '\n';
  }
  emit(cfg, "", csv.str(), out);
  return kExitOk;
}

inline int run_protocol(const RunConfig& cfg, std::ostream& out) {
  const bool timebin = cfg.protocol_mode == "timebin";
  const ProtocolResult r = timebin ? run_timebin_protocol(cfg.noise, cfg.cavity, cfg.seed, cfg.timing)
                                   : run_frequency_multiplex(cfg.noise, cfg.seed, cfg.timing);
  const SparseState target = timebin ? timebin_target_state() : frequency_target_state();
  std::size_t events = 0;
  for (const auto& s : r.trace.steps) events += s.events.size();
  out << "mode=" << cfg.protocol_mode << '\n';
  out << "steps=" << r.trace.steps.size() << '\n';
  out << "total_duration_us=" << num(r.trace.total_duration_us, 6) << '\n';
  out << "noise_events=" << events << '\n';
  out << "terms=" << r.state.size() << '\n';
  out << "fidelity_target=" << num(fidelity(r.state, target)) << '\n';

  const CMatrix h = qudit_hadamard_matrix();
  const DecoupleResult d = cfg.outcome >= 0 ? decouple_nucleus_outcome(r.state, cfg.outcome, h)
                                            : decouple_nucleus(r.state, RandomStream(cfg.seed, 1).next_u64(), h);
  out << "decouple_outcome=" << SpinLabel{d.outcome, 0}.m_str() << '\n';
  out << "decouple_probability=" << num(d.probability) << '\n';
  out << "corrected_fidelity_w8=" << num(fidelity(d.corrected, w_state(kNuclearLevels))) << '\n';

  if (cfg.trajectories > 0) {
    const SparseState ideal = timebin ? run_timebin_protocol(NoiseSpec::off(), cfg.cavity, cfg.seed, cfg.timing).state
                                      : run_frequency_multiplex(NoiseSpec::off(), cfg.seed, cfg.timing).state;
    double sum = 0.0;
    for (int t = 0; t < cfg.trajectories; ++t) {
      const std::uint64_t s = RandomStream(cfg.seed, static_cast<std::uint64_t>(t)).next_u64();
      const SparseState x = timebin ? run_timebin_protocol(cfg.noise, cfg.cavity, s, cfg.timing).state
                                    : run_frequency_multiplex(cfg.noise, s, cfg.timing).state;
      sum += fidelity(x, ideal);
    }
    out << "trajectories=" << cfg.trajectories << '\n';
    out << "mean_noisy_fidelity=" << num(sum / cfg.trajectories) << '\n';
  }
  emit(cfg, "", r.trace.csv(), out);
  emit(cfg, ".state", dump(r.state), out);
  return kExitOk;
}

inline int run_bell(const RunConfig& cfg, std::ostream& out) {
  const int k = cfg.bell_parties;
  const Distribution d = distribute_w_states(2, k);
  const auto pairs = bell_pairs(d);
  double sum = 0.0;
  double fmin = 1.0;
  for (const auto& p : pairs) {
    sum += p.probability;
    fmin = std::min(fmin, bell_fidelity(p.state));
  }
  out << "parties=" << k << '\n';
  out << "success_mass=" << num(d.success_mass) << '\n';
  out << "postselected_terms=" << d.state.size() << '\n';
  out << "ordered_patterns=" << ordered_pattern_count(d) << '\n';
  out << "unordered_pairs=" << pairs.size() << '\n';
  out << "pair_probability_sum=" << num(sum) << '\n';
  out << "min_bell_fidelity=" << num(fmin) << '\n';
  for (const auto& p : pairs)
    out << "pair=" << p.first << '-' << p.second << " probability=" << num(p.probability)
        << " fidelity=" << num(bell_fidelity(p.state)) << '\n';

  PartyLayout layout = PartyLayout::one_mode_each(k);
  layout.mode_to_party.insert(layout.mode_to_party.end(), layout.mode_to_party.begin(), layout.mode_to_party.end());
  std::vector<int> copy(static_cast<std::size_t>(2 * k), 0);
  std::fill(copy.begin() + k, copy.end(), 1);
  const PatternReport report = pattern_report(tensor_product(w_state(k), w_state(k)), layout, copy, {});
  emit(cfg, "", report.csv(), out);
  return kExitOk;
}

inline int run_cavity(const RunConfig& cfg, std::ostream& out) {
  const CavityBudget b = cavity_budget(cfg.cavity);
  std::ostringstream s;
  s << "kappa_internal_mhz=" << num(b.kappa_internal_mhz) << '\n';
  s << "kappa_coupling_mhz=" << num(b.kappa_coupling_mhz) << '\n';
  s << "gamma_bath_mhz=" << num(b.gamma_bath_mhz) << '\n';
  s << "gamma_port_mhz=" << num(b.gamma_port_mhz) << '\n';
  s << "loss_fraction=" << num(b.loss_fraction) << '\n';
  s << "success_fraction=" << num(b.success_fraction) << '\n';
  s << "success_db=" << num(b.success_db) << '\n';
  out << s.str();
  if (!cfg.out.empty()) emit(cfg, "", s.str(), out);
  return kExitOk;
}

inline int run_loss_sweep(const RunConfig& cfg, std::ostream& out) {
  const SweepTable t = loss_sweep(cfg.loss_kind, cfg.loss_grid, cfg.trials, cfg.seed, cfg.loss_sd, cfg.threads);
  double worst = 0.0;
  for (const auto& r : t.rows)
    if (r.mc_stderr > 0.0) worst = std::max(worst, std::abs(r.mc_rate - r.analytic_rate) / r.mc_stderr);
  out << "kind=" << to_string(t.kind) << '\n';
  out << "points=" << t.rows.size() << '\n';
  out << "trials=" << cfg.trials << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "max_mc_deviation_se=" << num(worst, 6) << '\n';
  emit(cfg, "", t.csv(cfg.normalized_columns), out);
  return kExitOk;
}

}  // namespace cli

inline void print_error(std::ostream& err, const ValidationError& e) {
  int line = 0;
  std::string msg = std::string(e.what()).substr(e.field().size() + 2);
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    line = c->line();
    msg = c->message();
  }
  err << "error: field=" << e.field() << " line=" << line << " msg=" << msg << '\n';
}

/// Runs one command. Never throws for model or input errors.
inline int execute(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
    if (command == "spectrum") return cli::run_spectrum(cfg, out);
    if (command == "protocol") return cli::run_protocol(cfg, out);
    if (command == "bell") return cli::run_bell(cfg, out);
    if (command == "cavity") return cli::run_cavity(cfg, out);
    if (command == "loss-sweep") return cli::run_loss_sweep(cfg, out);
    throw ValidationError("command", "unknown command '" + command + "'");
  } catch (const ValidationError& e) {
    print_error(err, e);
    return kExitInvalid;
  } catch (const ModelError& e) {
    err << "error: label=" << e.label() << " msg=" << std::string(e.what()).substr(e.label().size() + 2) << '\n';
    return kExitModelError;
  }
}

}  // namespace sbq
