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

// Spin Hamiltonian of a neutral 123Sb donor in silicon: a spin-7/2 nucleus
// coupled to a spin-1/2 bound electron.
//
//   H = B0 (-gamma_n Iz + gamma_e Sz) + A S.I + sum_ab Q_ab I_a I_b
//
// All energies are frequencies in GHz (h = 1).
//
// Basis conventions (these fix every transition label downstream):
//   nuclear index n = 0..7  <->  m_I = 7/2 - n   (descending)
//   electron index e = 0, 1 <->  down, up        (down is the low-energy
//                                                  manifold for gamma_e > 0)
//   composite index       =  2 n + e             (nucleus (x) electron)

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sbq/error.hpp"
#include "sbq/linalg.hpp"

namespace sbq {

inline constexpr int kNuclearLevels = 8;
inline constexpr int kElectronLevels = 2;
inline constexpr int kSpinDim = kNuclearLevels * kElectronLevels;

using QuadrupoleTensor = std::array<std::array<double, 3>, 3>;

struct SpinSystemParams {
  double b0 = 1.0;           // tesla
  double gamma_n = 5.55;     // MHz/T
  double gamma_e = 27.97;    // GHz/T
  double hyperfine_a = 101.52;  // MHz
  // kHz. Only the zz entry is set by default; the measured range is 4-50 kHz.
  QuadrupoleTensor quadrupole{{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 25.0}}};
  static constexpr double nuclear_spin = 3.5;
};

/// Throws ValidationError naming the field. Zero field and zero hyperfine are
/// accepted so that the analytic limits can be built; negative values are not.
inline void validate(const SpinSystemParams& p) {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(p.b0) || p.b0 < 0.0) throw ValidationError("spin.b0", "must be >= 0 tesla");
  if (!finite(p.gamma_n) || p.gamma_n <= 0.0) throw ValidationError("spin.gamma_n", "must be > 0");
  if (!finite(p.gamma_e) || p.gamma_e <= 0.0) throw ValidationError("spin.gamma_e", "must be > 0");
  // gamma_e is GHz/T and gamma_n MHz/T.
  if (p.gamma_e * 1e3 <= p.gamma_n) {
    throw ValidationError("spin.gamma_e", "electron gyromagnetic ratio must exceed the nuclear one");
  }
  if (!finite(p.hyperfine_a) || p.hyperfine_a < 0.0) {
    throw ValidationError("spin.hyperfine_a", "must be >= 0 MHz");
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (!finite(p.quadrupole[a][b])) throw ValidationError("spin.quadrupole", "non-finite entry");
      if (p.quadrupole[a][b] != p.quadrupole[b][a]) {
        throw ValidationError("spin.quadrupole", "tensor must be symmetric");
      }
    }
}

/// Soft check of gamma_e B0 >> A >> max|Q| (factor 10 each). Returns one
/// message per violated inequality; an empty result means the hierarchy holds.
inline std::vector<std::string> hierarchy_warnings(const SpinSystemParams& p) {
  std::vector<std::string> out;
  double q_max = 0.0;
  for (const auto& row : p.quadrupole)
    for (double q : row) q_max = std::max(q_max, std::abs(q));
  const double zeeman_mhz = p.gamma_e * p.b0 * 1e3;
  const double q_mhz = q_max * 1e-3;
  if (zeeman_mhz < 10.0 * p.hyperfine_a) out.emplace_back("gamma_e*B0 is not >> A");
  if (p.hyperfine_a < 10.0 * q_mhz) out.emplace_back("A is not >> max|Q|");
  return out;
}

namespace spin_ops {

/// Angular momentum matrices for spin j in the descending basis m = j..-j.
struct SpinMatrices {
  CMatrix x, y, z;
};

inline SpinMatrices descending(double j) {
  const auto dim = static_cast<std::size_t>(std::lround(2.0 * j + 1.0));
  CMatrix jp(dim, dim), jz(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double m = j - static_cast<double>(k);
    jz(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const CMatrix jm = jp.adjoint();
  return {0.5 * (jp + jm), cplx(0.0, -0.5) * (jp - jm), jz};
}

/// Spin-1/2 matrices in the (down, up) ordering.
inline SpinMatrices electron() {
  const cplx i(0.0, 1.0);
  CMatrix sx{{0.0, 0.5}, {0.5, 0.0}};
  CMatrix sy{{0.0, 0.5 * i}, {-0.5 * i, 0.0}};
  CMatrix sz{{-0.5, 0.0}, {0.0, 0.5}};
  return {sx, sy, sz};
}

}  // namespace spin_ops

/// Hermitian 16x16 matrix in GHz.
inline CMatrix build_hamiltonian(const SpinSystemParams& p) {
  validate(p);
  const auto nuc = spin_ops::descending(SpinSystemParams::nuclear_spin);
  const auto el = spin_ops::electron();
  const CMatrix one_n = CMatrix::identity(kNuclearLevels);
  const CMatrix one_e = CMatrix::identity(kElectronLevels);

  const double gamma_n_ghz = p.gamma_n * 1e-3;
  const double a_ghz = p.hyperfine_a * 1e-3;

  CMatrix h = p.b0 * (-gamma_n_ghz * kron(nuc.z, one_e) + p.gamma_e * kron(one_n, el.z));
  h += a_ghz * (kron(nuc.x, el.x) + kron(nuc.y, el.y) + kron(nuc.z, el.z));

  const std::array<const CMatrix*, 3> i_ops{&nuc.x, &nuc.y, &nuc.z};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double q = p.quadrupole[a][b] * 1e-6;
      if (q == 0.0) continue;
      h += q * kron((*i_ops[a]) * (*i_ops[b]), one_e);
    }
  return h;
}

/// trace(sum Q_ab I_a I_b (x) 1_e) = 2 * I(I+1)(2I+1)/3 * tr(Q), in GHz.
inline double analytic_quadrupole_trace(const SpinSystemParams& p) {
  constexpr double i = SpinSystemParams::nuclear_spin;
  const double per_axis = i * (i + 1.0) * (2.0 * i + 1.0) / 3.0 * kElectronLevels;
  return per_axis * (p.quadrupole[0][0] + p.quadrupole[1][1] + p.quadrupole[2][2]) * 1e-6;
}

struct SpinLabel {
  int nuclear = 0;   // 0 <-> m_I = +7/2
  int electron = 0;  // 0 <-> down

  constexpr int index() const noexcept { return 2 * nuclear + electron; }
  static constexpr SpinLabel from_index(int idx) noexcept { return {idx / 2, idx % 2}; }
  /// m_I in units of 1/2 (7 means +7/2).
  constexpr int twice_m() const noexcept { return 7 - 2 * nuclear; }

  /// "7/2", "-1/2", ...
  std::string m_str() const {
    const int tm = twice_m();
    return (tm < 0 ? "-" : "") + std::to_string(std::abs(tm)) + "/2";
  }

  std::string str() const { return "|" + m_str() + "," + (electron == 0 ? "down" : "up") + ">"; }

  friend constexpr bool operator==(SpinLabel, SpinLabel) = default;
};

struct Spectrum {
  std::vector<double> eigenvalues;                // GHz, ascending
  std::vector<std::vector<cplx>> eigenvectors;    // eigenvectors[k] pairs with eigenvalues[k]
  std::vector<SpinLabel> dominant_labels;
};

namespace detail {

inline double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

/// Cyclic complex Jacobi. On return `a` is (numerically) diagonal and the
/// columns of `v` are the eigenvectors.
inline void jacobi_diagonalize(CMatrix& a, CMatrix& v, double tol, int max_sweeps = 100) {
  const std::size_t n = a.rows();
  v = CMatrix::identity(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol) return;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Rephase column q so the pivot becomes real, then a real rotation.
        const cplx phase = std::conj(apq) / mag;  // e^{-i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
        const cplx gpp = c, gpq = s, gqp = -s * phase, gqq = c * phase;
        for (std::size_t k = 0; k < n; ++k) {  // A <- A G
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- G^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {  // V <- V G
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
  }
  if (off_diagonal_norm(a) > tol) {
    throw ModelError("spectrum", "Jacobi iteration did not converge");
  }
}

inline std::size_t dominant_index(std::span<const cplx> vec) {
  std::size_t best = 0;
  double best_w = -1.0;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    const double w = std::norm(vec[i]);
    if (w > best_w) {  // strict: lowest index wins ties
      best_w = w;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

/// Diagonalizes a Hermitian matrix (any size; the spin model uses 16).
/// Eigenvalues ascend; runs of numerically equal eigenvalues are ordered by
/// their dominant basis index.
inline Spectrum spectrum(const CMatrix& h) {
  if (!h.square() || h.rows() == 0) throw ValidationError("hamiltonian", "must be square");
  const double scale = std::max(1.0, h.max_abs());
  if (hermiticity_defect(h) > 1e-12 * scale) {
    throw ValidationError("hamiltonian", "matrix is not Hermitian");
  }
  const std::size_t n = h.rows();
  CMatrix a = h;
  CMatrix v;
  detail::jacobi_diagonalize(a, v, 1e-12 * scale);

  struct Pair {
    double value;
    std::vector<cplx> vec;
    std::size_t dominant;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<cplx> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
    // Fix the eigenvector phase: dominant component real positive.
    const std::size_t d = detail::dominant_index(col);
    const cplx ph = std::conj(col[d]) / std::abs(col[d]);
    for (auto& x : col) x *= ph;
    pairs.push_back({a(k, k).real(), std::move(col), d});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return x.value < y.value || (x.value == y.value && x.dominant < y.dominant);
  });
  const double tie_tol = 1e-12 * scale;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && pairs[j].value - pairs[j - 1].value <= tie_tol) ++j;
    std::sort(pairs.begin() + static_cast<std::ptrdiff_t>(i), pairs.begin() + static_cast<std::ptrdiff_t>(j),
              [](const Pair& x, const Pair& y) { return x.dominant < y.dominant; });
    i = j;
  }

  Spectrum s;
  for (auto& p : pairs) {
    s.eigenvalues.push_back(p.value);
    s.dominant_labels.push_back(SpinLabel::from_index(static_cast<int>(p.dominant)));
    s.eigenvectors.push_back(std::move(p.vec));
  }
  return s;
}

/// max_k ||H v_k - E_k v_k||.
inline double max_residual(const CMatrix& h, const Spectrum& s) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const auto hv = h.apply(s.eigenvectors[k]);
    double r = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i) r += std::norm(hv[i] - s.eigenvalues[k] * s.eigenvectors[k][i]);
    worst = std::max(worst, std::sqrt(r));
  }
  return worst;
}

/// max_{j,k} |<v_j|v_k> - delta_jk|.
inline double orthonormality_defect(const Spectrum& s) {
  double worst = 0.0;
  const std::size_t n = s.eigenvectors.size();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      cplx ip{};
      for (std::size_t i = 0; i < s.eigenvectors[j].size(); ++i)
        ip += std::conj(s.eigenvectors[j][i]) * s.eigenvectors[k][i];
      worst = std::max(worst, std::abs(ip - (j == k ? 1.0 : 0.0)));
    }
  return worst;
}

enum class TransitionKind { ESR, NMR_down, NMR_up, EDSR };

inline const char* to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::ESR: return "ESR";
    case TransitionKind::NMR_down: return "NMR_down";
    case TransitionKind::NMR_up: return "NMR_up";
    case TransitionKind::EDSR: return "EDSR";
  }
  return "?";
}

struct Transition {
  SpinLabel from;
  SpinLabel to;
  double frequency_ghz = 0.0;
};

struct TransitionTable {
  TransitionKind kind;
  std::vector<Transition> entries;
};

/// Maps every product label to its eigenvalue. Fails when the spectrum is too
/// degenerate (or too mixed) for the product labels to be meaningful.
inline std::array<double, kSpinDim> labeled_energies(const Spectrum& s) {
  if (s.eigenvalues.size() != static_cast<std::size_t>(kSpinDim)) {
    throw ValidationError("spectrum", "expected a 16-level spin spectrum");
  }
  const double scale = std::max(1.0, std::abs(s.eigenvalues.front()) + std::abs(s.eigenvalues.back()));
  for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
    if (s.eigenvalues[k] - s.eigenvalues[k - 1] <= 1e-9 * scale) {
      throw ModelError("degenerate_spectrum", "eigenvalues " + std::to_string(k - 1) + " and " +
                                                  std::to_string(k) + " coincide; labels are ambiguous");
    }
  }
  std::array<double, kSpinDim> energy{};
  std::array<bool, kSpinDim> seen{};
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const int idx = s.dominant_labels[k].index();
    if (std::norm(s.eigenvectors[k][static_cast<std::size_t>(idx)]) <= 0.5 || seen[static_cast<std::size_t>(idx)]) {
      throw ModelError("degenerate_spectrum", "eigenstate " + std::to_string(k) + " has no unique product label");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    energy[static_cast<std::size_t>(idx)] = s.eigenvalues[k];
  }
  return energy;
}

inline TransitionTable transition_table(const Spectrum& s, TransitionKind kind) {
  const auto energy = labeled_energies(s);
  auto e = [&](SpinLabel l) { return energy[static_cast<std::size_t>(l.index())]; };
  TransitionTable table{kind, {}};
  auto add = [&](SpinLabel from, SpinLabel to) {
    const double f = std::abs(e(to) - e(from));
    if (!(f > 0.0)) throw ModelError("degenerate_spectrum", "zero-frequency transition " + from.str());
    table.entries.push_back({from, to, f});
  };
  switch (kind) {
    case TransitionKind::ESR:
      for (int n = 0; n < kNuclearLevels; ++n) add({n, 0}, {n, 1});
      break;
    case TransitionKind::NMR_down:
      for (int n = 0; n + 1 < kNuclearLevels; ++n) add({n, 0}, {n + 1, 0});
      break;
    case TransitionKind::NMR_up:
      for (int n = 0; n + 1 < kNuclearLevels; ++n) add({n, 1}, {n + 1, 1});
      break;
    case TransitionKind::EDSR:
      // Flip-flop |m_I, down> <-> |m_I - 1, up>, conserving m_I + m_S.
      for (int n = 0; n + 1 < kNuclearLevels; ++n) add({n, 0}, {n + 1, 1});
      break;
  }
  return table;
}

/// Frequency of the flip-flop line |m_I, down> <-> |m_I - 1, up> with
/// m_I = 7/2 - nuclear (the emission line for nuclear = 0).
inline double edsr_frequency(const SpinSystemParams& p, int nuclear = 0) {
  if (nuclear < 0 || nuclear + 1 >= kNuclearLevels) throw ValidationError("nuclear", "EDSR line index out of range");
  const auto energy = labeled_energies(spectrum(build_hamiltonian(p)));
  return energy[static_cast<std::size_t>(SpinLabel{nuclear + 1, 1}.index())] -
         energy[static_cast<std::size_t>(SpinLabel{nuclear, 0}.index())];
}

/// Bisection for the field that puts the |7/2,down> <-> |5/2,up> line at
/// `target_ghz`. At most 60 halvings; the result is within 1 kHz or an error.
inline double calibrate_b0(SpinSystemParams p, double target_ghz, double lo, double hi) {
  if (!(lo < hi) || lo <= 0.0) throw ValidationError("bracket", "need 0 < low < high");
  auto f = [&](double b) {
    p.b0 = b;
    return edsr_frequency(p) - target_ghz;
  };
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw ModelError("not_bracketed", "target " + std::to_string(target_ghz) + " GHz is outside [" +
                                          std::to_string(lo) + ", " + std::to_string(hi) + "] T");
  }
  constexpr double kStopGhz = 1e-10;
  double mid = 0.5 * (lo + hi);
  double fmid = 0.0;
  for (int it = 0; it < 60; ++it) {
    mid = 0.5 * (lo + hi);
    fmid = f(mid);
    if (std::abs(fmid) <= kStopGhz) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(fmid) > 1e-6) throw ModelError("calibration", "bisection did not reach 1 kHz");
  return mid;
}

}  // namespace sbq
