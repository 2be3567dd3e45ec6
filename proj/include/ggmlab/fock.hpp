#pragma once

// Truncated Fock-space representation of multimode pure states. Amplitudes
// live in a sorted sparse map keyed by packed occupation tuples, which fixes
// a deterministic basis ordering. Constructors build the benchmark states
// (crystal evolution, FMSV) and their photon-added/-subtracted descendants
// by summing the closed-form series shell by shell until the discarded mass
// is certified below eps_tail.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ggmlab/covariance.hpp"
#include "ggmlab/errors.hpp"
#include "ggmlab/gaussian.hpp"

namespace ggmlab {

using Complex = std::complex<double>;

// 8 bits per mode: occupations up to 255, up to 8 modes in one key. Mode 0
// sits in the most significant byte so key order equals tuple order.
inline constexpr int kOccBits = 8;
inline constexpr int kMaxOcc = 255;
inline constexpr int kMaxModes = 8;

using FockKey = std::uint64_t;
using Amplitudes = std::map<FockKey, Complex>;

inline FockKey pack_occupation(const std::vector<int>& occ) {
  FockKey key = 0;
  for (int n : occ) {
    if (n < 0 || n > kMaxOcc)
      throw CapacityError("occupation outside the packable range [0,255]");
    key = (key << kOccBits) | static_cast<FockKey>(n);
  }
  return key;
}

inline std::vector<int> unpack_occupation(FockKey key, int n_modes) {
  std::vector<int> occ(n_modes);
  for (int i = n_modes - 1; i >= 0; --i) {
    occ[i] = static_cast<int>(key & ((1u << kOccBits) - 1));
    key >>= kOccBits;
  }
  return occ;
}

struct FockOptions {
  double eps_tail = 1e-10;
  int max_shell = 120;  // hard cap on the principal summation index
};

struct PhotonOpSpec {
  enum class Kind { Add, Subtract };
  Kind kind = Kind::Add;
  std::vector<int> counts;  // per-mode photon numbers, >= 0
};

struct FockState {
  int n_modes = 0;
  std::vector<int> cutoffs;  // per-mode max occupation present
  Amplitudes amps;
  double tail_bound = 0.0;  // upper bound on discarded squared mass

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [k, a] : amps) s += std::norm(a);
    return s;
  }

  // Rescales to unit norm and drops numerically-zero entries.
  void normalize() {
    const double n2 = squared_norm();
    if (n2 <= 0.0) throw EmptyResultError("normalize: zero-norm state");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto it = amps.begin(); it != amps.end();) {
      it->second *= inv;
      if (std::abs(it->second) < 1e-16)
        it = amps.erase(it);
      else
        ++it;
    }
  }

  void refresh_cutoffs() {
    cutoffs.assign(n_modes, 0);
    for (const auto& [k, a] : amps) {
      const auto occ = unpack_occupation(k, n_modes);
      for (int i = 0; i < n_modes; ++i)
        cutoffs[i] = std::max(cutoffs[i], occ[i]);
    }
  }

  Complex amplitude(const std::vector<int>& occ) const {
    auto it = amps.find(pack_occupation(occ));
    return it == amps.end() ? Complex(0.0) : it->second;
  }
};

namespace detail {

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

// sqrt(n!/(n-m)!)
inline double falling_weight(int n, int m) {
  return std::exp(0.5 * (log_factorial(n) - log_factorial(n - m)));
}

// sqrt((n+m)!/n!)
inline double rising_weight(int n, int m) {
  return std::exp(0.5 * (log_factorial(n + m) - log_factorial(n)));
}

inline double sqrt_binomial(int n, int k) {
  return std::exp(
      0.5 * (log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

// Sums a series shell by shell. `shell(n, amps)` adds shell n and returns its
// raw squared mass. Stops once past the mass peak and the next shell falls
// below eps_tail * 1e-2 of the running total; throws if the cap is hit first.
template <class ShellFn>
FockState build_by_shells(int n_modes, ShellFn&& shell,
                          const FockOptions& opt) {
  if (n_modes < 1 || n_modes > kMaxModes)
    throw DimensionError("build_by_shells: unsupported mode count");
  FockState st;
  st.n_modes = n_modes;
  double total = 0.0, prev = -1.0, last = 0.0;
  bool converged = false;
  int n = 0;
  for (; n <= opt.max_shell; ++n) {
    const double mass = shell(n, st.amps);
    total += mass;
    if (total > 0.0 && prev >= 0.0 && mass <= prev &&
        mass < opt.eps_tail * 1e-2 * total) {
      last = mass;
      converged = true;
      break;
    }
    prev = mass;
    last = mass;
  }
  if (!converged) {
    std::ostringstream os;
    os << "truncation: eps_tail = " << opt.eps_tail
       << " unreachable within shell cap " << opt.max_shell
       << " (achieved tail ~ " << (total > 0 ? last / total : 1.0) << ")";
    throw TruncationError(os.str());
  }
  // geometric remainder estimate from the last two shell masses
  double ratio = prev > 0.0 ? std::min(last / prev, 0.99) : 0.0;
  st.tail_bound = total > 0.0 ? (last / total) * ratio / (1.0 - ratio) : 0.0;
  st.normalize();
  st.refresh_cutoffs();
  return st;
}

}  // namespace detail

// --- constructors -----------------------------------------------------------

// Crystal-evolved vacuum in Fock form: amplitude
//   (1+n1)^{-1/2} (n2/(1+n1))^{r/2} (n3/(1+n1))^{s/2}
//   e^{-i(r phi2 + s phi3)} sqrt((r+s)!/(r! s!))   on  |r+s, r, s>.
inline FockState build_crystal_fock(const CrystalParams& p,
                                    const FockOptions& opt = {}) {
  const auto occ = crystal_occupations(p);
  const double x = occ.n2 / (1.0 + occ.n1);
  const double y = occ.n3 / (1.0 + occ.n1);
  const double pref = 1.0 / std::sqrt(1.0 + occ.n1);
  auto shell = [&](int k, Amplitudes& amps) {
    double mass = 0.0;
    for (int r = 0; r <= k; ++r) {
      const int s = k - r;
      const double mag = pref * std::pow(x, 0.5 * r) * std::pow(y, 0.5 * s) *
                         detail::sqrt_binomial(k, r);
      if (mag == 0.0) continue;
      const Complex a = std::polar(mag, -(r * p.phi2 + s * p.phi3));
      amps[pack_occupation({k, r, s})] += a;
      mass += std::norm(a);
    }
    return mass;
  };
  return detail::build_by_shells(3, shell, opt);
}

// FMSV state: amplitude
//   sech(r) (tanh(r)/2)^n sqrt(C(n,r1)) sqrt(C(n,r2))
//   on |n-r1, n-r2, r1, r2>.
inline FockState build_fmsv_fock(double r, const FockOptions& opt = {}) {
  const double base = 0.5 * std::tanh(r);
  const double pref = 1.0 / std::cosh(r);
  auto shell = [&](int n, Amplitudes& amps) {
    double mass = 0.0;
    const double bn = pref * std::pow(base, n);
    for (int r1 = 0; r1 <= n; ++r1)
      for (int r2 = 0; r2 <= n; ++r2) {
        const double a =
            bn * detail::sqrt_binomial(n, r1) * detail::sqrt_binomial(n, r2);
        amps[pack_occupation({n - r1, n - r2, r1, r2})] += a;
        mass += a * a;
      }
    return mass;
  };
  return detail::build_by_shells(4, shell, opt);
}

// --- generic ladder application ---------------------------------------------

// Applies prod_i (a_i^dag)^{m_i} (addition) or prod_i a_i^{m_i} (subtraction)
// with the factorial-ratio weights and renormalizes (post-selection). The
// reported tail is the squared mass of the outermost total-photon shell, a
// conservative indicator of truncation health.
inline FockState apply_photon_op(const FockState& state,
                                 const PhotonOpSpec& spec) {
  if (static_cast<int>(spec.counts.size()) != state.n_modes)
    throw DimensionError("apply_photon_op: counts size != n_modes");
  for (int c : spec.counts)
    if (c < 0) throw DimensionError("apply_photon_op: negative count");

  FockState out;
  out.n_modes = state.n_modes;
  const bool add = spec.kind == PhotonOpSpec::Kind::Add;
  for (const auto& [key, amp] : state.amps) {
    auto occ = unpack_occupation(key, state.n_modes);
    double w = 1.0;
    bool dead = false;
    for (int i = 0; i < state.n_modes; ++i) {
      const int m = spec.counts[i];
      if (m == 0) continue;
      if (add) {
        w *= detail::rising_weight(occ[i], m);
        occ[i] += m;
      } else {
        if (occ[i] < m) {
          dead = true;
          break;
        }
        w *= detail::falling_weight(occ[i], m);
        occ[i] -= m;
      }
    }
    if (dead) continue;
    out.amps[pack_occupation(occ)] += w * amp;
  }
  if (out.amps.empty())
    throw EmptyResultError(
        "apply_photon_op: subtraction annihilated the entire state");
  out.normalize();
  out.refresh_cutoffs();

  // Re-verify the truncation: if the input carried a tail, the mass sitting
  // on the outermost total-photon shell of the result indicates how much the
  // operation leaned on the truncation edge.
  if (state.tail_bound > 0.0) {
    int max_total = 0;
    for (const auto& [k, a] : out.amps) {
      const auto occ = unpack_occupation(k, out.n_modes);
      int t = 0;
      for (int v : occ) t += v;
      max_total = std::max(max_total, t);
    }
    double edge_mass = 0.0;
    for (const auto& [k, a] : out.amps) {
      const auto occ = unpack_occupation(k, out.n_modes);
      int t = 0;
      for (int v : occ) t += v;
      if (t == max_total) edge_mass += std::norm(a);
    }
    out.tail_bound = std::max(state.tail_bound, edge_mass);
    if (edge_mass > 1e-6)
      throw TruncationError(
          "apply_photon_op: outermost-shell mass exceeds 1e-6; rebuild the "
          "input with a smaller eps_tail");
  }
  return out;
}

// --- closed-form added/subtracted states ------------------------------------

// Photon-added FMSV, direct series construction. Dual path to
// apply_photon_op(build_fmsv_fock(...), {Add, counts}).
inline FockState build_added_fmsv(double r, const std::vector<int>& counts,
                                  const FockOptions& opt = {}) {
  if (counts.size() != 4)
    throw DimensionError("build_added_fmsv: need 4 counts");
  const double base = 0.5 * std::tanh(r);
  const double pref = 1.0 / std::cosh(r);
  const int m1 = counts[0], m2 = counts[1], m3 = counts[2], m4 = counts[3];
  auto shell = [&](int n, Amplitudes& amps) {
    double mass = 0.0;
    const double bn = pref * std::pow(base, n);
    for (int r1 = 0; r1 <= n; ++r1)
      for (int r2 = 0; r2 <= n; ++r2) {
        const double a = bn * detail::sqrt_binomial(n, r1) *
                         detail::sqrt_binomial(n, r2) *
                         detail::rising_weight(n - r1, m1) *
                         detail::rising_weight(n - r2, m2) *
                         detail::rising_weight(r1, m3) *
                         detail::rising_weight(r2, m4);
        amps[pack_occupation(
            {n - r1 + m1, n - r2 + m2, r1 + m3, r2 + m4})] += a;
        mass += a * a;
      }
    return mass;
  };
  return detail::build_by_shells(4, shell, opt);
}

// Photon-subtracted FMSV. The summation floor n >= M = max(m1+m3, m2+m4) and
// the inner ranges realize the ladder-operator support condition.
inline FockState build_subtracted_fmsv(double r, const std::vector<int>& counts,
                                       const FockOptions& opt = {}) {
  if (counts.size() != 4)
    throw DimensionError("build_subtracted_fmsv: need 4 counts");
  const double base = 0.5 * std::tanh(r);
  const double pref = 1.0 / std::cosh(r);
  const int m1 = counts[0], m2 = counts[1], m3 = counts[2], m4 = counts[3];
  const int floor_n = std::max(m1 + m3, m2 + m4);
  auto shell = [&](int n, Amplitudes& amps) {
    if (n < floor_n) return 0.0;
    double mass = 0.0;
    const double bn = pref * std::pow(base, n);
    for (int r1 = m3; r1 <= n - m1; ++r1)
      for (int r2 = m4; r2 <= n - m2; ++r2) {
        const double a = bn * detail::sqrt_binomial(n, r1) *
                         detail::sqrt_binomial(n, r2) *
                         detail::falling_weight(n - r1, m1) *
                         detail::falling_weight(n - r2, m2) *
                         detail::falling_weight(r1, m3) *
                         detail::falling_weight(r2, m4);
        amps[pack_occupation(
            {n - r1 - m1, n - r2 - m2, r1 - m3, r2 - m4})] += a;
        mass += a * a;
      }
    return mass;
  };
  return detail::build_by_shells(4, shell, opt);
}

// Photon-added crystal state, counts (m1, m2, m3) on modes (1, 2, 3).
inline FockState build_added_crystal(const CrystalParams& p,
                                     const std::vector<int>& counts,
                                     const FockOptions& opt = {}) {
  if (counts.size() != 3)
    throw DimensionError("build_added_crystal: need 3 counts");
  const auto occ = crystal_occupations(p);
  const double x = occ.n2 / (1.0 + occ.n1);
  const double y = occ.n3 / (1.0 + occ.n1);
  const double pref = 1.0 / std::sqrt(1.0 + occ.n1);
  const int m1 = counts[0], m2 = counts[1], m3 = counts[2];
  auto shell = [&](int k, Amplitudes& amps) {
    double mass = 0.0;
    for (int r = 0; r <= k; ++r) {
      const int s = k - r;
      const double mag = pref * std::pow(x, 0.5 * r) * std::pow(y, 0.5 * s) *
                         detail::sqrt_binomial(k, r) *
                         detail::rising_weight(k, m1) *
                         detail::rising_weight(r, m2) *
                         detail::rising_weight(s, m3);
      if (mag == 0.0) continue;
      const Complex a = std::polar(mag, -(r * p.phi2 + s * p.phi3));
      amps[pack_occupation({k + m1, r + m2, s + m3})] += a;
      mass += std::norm(a);
    }
    return mass;
  };
  return detail::build_by_shells(3, shell, opt);
}

// Photon-subtracted crystal state. Support: r >= m2, s >= m3, r+s >= m1.
inline FockState build_subtracted_crystal(const CrystalParams& p,
                                          const std::vector<int>& counts,
                                          const FockOptions& opt = {}) {
  if (counts.size() != 3)
    throw DimensionError("build_subtracted_crystal: need 3 counts");
  const auto occ = crystal_occupations(p);
  const double x = occ.n2 / (1.0 + occ.n1);
  const double y = occ.n3 / (1.0 + occ.n1);
  const double pref = 1.0 / std::sqrt(1.0 + occ.n1);
  const int m1 = counts[0], m2 = counts[1], m3 = counts[2];
  auto shell = [&](int k, Amplitudes& amps) {
    if (k < m1) return 0.0;
    double mass = 0.0;
    for (int r = m2; r <= k; ++r) {
      const int s = k - r;
      if (s < m3) continue;
      const double mag = pref * std::pow(x, 0.5 * r) * std::pow(y, 0.5 * s) *
                         detail::sqrt_binomial(k, r) *
                         detail::falling_weight(k, m1) *
                         detail::falling_weight(r, m2) *
                         detail::falling_weight(s, m3);
      if (mag == 0.0) continue;
      const Complex a = std::polar(mag, -(r * p.phi2 + s * p.phi3));
      amps[pack_occupation({k - m1, r - m2, s - m3})] += a;
      mass += std::norm(a);
    }
    return mass;
  };
  return detail::build_by_shells(3, shell, opt);
}

// --- reduced density matrices -----------------------------------------------

struct ReducedDensityMatrix {
  std::vector<int> kept_modes;
  std::vector<std::vector<int>> basis;  // occupation tuples over kept modes
  Eigen::MatrixXcd matrix;              // Hermitian, trace 1
};

inline int max_rdm_basis() {
  if (const char* env = std::getenv("GGMLAB_MAX_BASIS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 4096;
}

// rho_keep[(a),(b)] = sum_traced psi(a, traced) conj(psi(b, traced)),
// Hermitized as (rho + rho^dag)/2. The basis is the sorted set of kept
// tuples actually present in the state.
inline ReducedDensityMatrix reduced_density_matrix(const FockState& state,
                                                   std::vector<int> keep) {
  if (keep.empty())
    throw DimensionError("reduced_density_matrix: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int m : keep)
    if (m < 0 || m >= state.n_modes)
      throw DimensionError("reduced_density_matrix: mode index out of range");
  if (static_cast<int>(keep.size()) >= state.n_modes)
    throw DimensionError("reduced_density_matrix: keep must be a proper subset");

  std::vector<int> traced;
  for (int i = 0; i < state.n_modes; ++i)
    if (!std::binary_search(keep.begin(), keep.end(), i)) traced.push_back(i);

  auto split_key = [&](FockKey key) {
    const auto occ = unpack_occupation(key, state.n_modes);
    std::vector<int> ka, kt;
    for (int i : keep) ka.push_back(occ[i]);
    for (int i : traced) kt.push_back(occ[i]);
    return std::pair{pack_occupation(ka), pack_occupation(kt)};
  };

  // basis = sorted set of kept tuples present in the state
  std::map<FockKey, int> kept_index;
  for (const auto& [key, amp] : state.amps)
    kept_index.emplace(split_key(key).first, 0);
  int next = 0;
  for (auto& [kkey, idx] : kept_index) idx = next++;

  // group amplitudes by traced tuple
  std::map<FockKey, std::vector<std::pair<int, Complex>>> groups;
  for (const auto& [key, amp] : state.amps) {
    const auto [ka, kt] = split_key(key);
    groups[kt].emplace_back(kept_index.at(ka), amp);
  }
  const int dim = static_cast<int>(kept_index.size());
  if (dim > max_rdm_basis()) {
    std::ostringstream os;
    os << "reduced_density_matrix: basis size " << dim
       << " exceeds cap " << max_rdm_basis() << " (GGMLAB_MAX_BASIS)";
    throw CapacityError(os.str());
  }

  ReducedDensityMatrix rdm;
  rdm.kept_modes = keep;
  rdm.basis.resize(dim);
  for (const auto& [kkey, idx] : kept_index)
    rdm.basis[idx] = unpack_occupation(kkey, static_cast<int>(keep.size()));
  rdm.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [tk, entries] : groups)
    for (const auto& [i, ai] : entries)
      for (const auto& [j, aj] : entries)
        rdm.matrix(i, j) += ai * std::conj(aj);
  rdm.matrix = 0.5 * (rdm.matrix + rdm.matrix.adjoint()).eval();
  return rdm;
}

// --- moments ----------------------------------------------------------------

struct FockMoments {
  Eigen::VectorXd displacement;  // (<q1>, <p1>, ..., <qm>, <pm>)
  CovarianceMatrix cm;
  bool precision_warning = false;  // tail too large for the usual 1e-7 target
};

// First and second quadrature moments by sparse ladder contraction.
inline FockMoments covariance_from_fock(const FockState& state) {
  const int m = state.n_modes;
  Eigen::MatrixXcd alpha = Eigen::MatrixXcd::Zero(m, m);  // <a_i^dag a_j>
  Eigen::MatrixXcd beta = Eigen::MatrixXcd::Zero(m, m);   // <a_i a_j>
  Eigen::VectorXcd disp = Eigen::VectorXcd::Zero(m);      // <a_i>

  auto lookup = [&](const std::vector<int>& occ) -> Complex {
    auto it = state.amps.find(pack_occupation(occ));
    return it == state.amps.end() ? Complex(0.0) : it->second;
  };

  for (const auto& [key, c] : state.amps) {
    const auto occ = unpack_occupation(key, m);
    for (int i = 0; i < m; ++i) {
      if (occ[i] > 0) {
        auto o = occ;
        --o[i];
        disp(i) += c * std::sqrt(double(occ[i])) * std::conj(lookup(o));
      }
      for (int j = 0; j < m; ++j) {
        if (occ[j] > 0) {  // a_i^dag a_j
          auto o = occ;
          --o[j];
          const double w = std::sqrt(double(occ[j])) * std::sqrt(o[i] + 1.0);
          ++o[i];
          alpha(i, j) += c * w * std::conj(lookup(o));
        }
        {  // a_i a_j
          auto o = occ;
          if (o[j] > 0) {
            double w = std::sqrt(double(o[j]));
            --o[j];
            if (o[i] > 0) {
              w *= std::sqrt(double(o[i]));
              --o[i];
              beta(i, j) += c * w * std::conj(lookup(o));
            }
          }
        }
      }
    }
  }

  FockMoments out;
  out.displacement = Eigen::VectorXd(2 * m);
  for (int i = 0; i < m; ++i) {
    out.displacement(2 * i) = std::sqrt(2.0) * disp(i).real();
    out.displacement(2 * i + 1) = std::sqrt(2.0) * disp(i).imag();
  }
  Eigen::MatrixXd lam(2 * m, 2 * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double dd = i == j ? 0.5 : 0.0;
      const double qi = out.displacement(2 * i), pi = out.displacement(2 * i + 1);
      const double qj = out.displacement(2 * j), pj = out.displacement(2 * j + 1);
      lam(2 * i, 2 * j) =
          beta(i, j).real() + alpha(i, j).real() + dd - qi * qj;
      lam(2 * i + 1, 2 * j + 1) =
          -beta(i, j).real() + alpha(i, j).real() + dd - pi * pj;
      lam(2 * i, 2 * j + 1) = beta(i, j).imag() + alpha(i, j).imag() - qi * pj;
      lam(2 * j + 1, 2 * i) = lam(2 * i, 2 * j + 1);
    }
  out.cm = CovarianceMatrix::from_matrix(lam);
  out.precision_warning = state.tail_bound > 1e-8;
  return out;
}

// --- text dump/load ---------------------------------------------------------

// Line-oriented format:
//   ggmlab-fock <n_modes>
//   <cutoff_1> ... <cutoff_N>
//   <tail_bound>
//   <n1> ... <nN> <re> <im>     (one line per amplitude)
inline void save_fock(std::ostream& os, const FockState& state) {
  os.precision(17);
  os << "ggmlab-fock " << state.n_modes << "\n";
  for (int i = 0; i < state.n_modes; ++i)
    os << state.cutoffs[i] << (i + 1 == state.n_modes ? "" : " ");
  os << "\n" << state.tail_bound << "\n";
  for (const auto& [key, amp] : state.amps) {
    for (int v : unpack_occupation(key, state.n_modes)) os << v << " ";
    os << amp.real() << " " << amp.imag() << "\n";
  }
}

inline FockState load_fock(std::istream& is) {
  std::string magic;
  FockState st;
  if (!(is >> magic >> st.n_modes) || magic != "ggmlab-fock")
    throw DimensionError("load_fock: bad header");
  if (st.n_modes < 1 || st.n_modes > kMaxModes)
    throw DimensionError("load_fock: unsupported mode count");
  st.cutoffs.resize(st.n_modes);
  for (int& c : st.cutoffs)
    if (!(is >> c)) throw DimensionError("load_fock: bad cutoffs line");
  if (!(is >> st.tail_bound)) throw DimensionError("load_fock: bad tail line");
  std::vector<int> occ(st.n_modes);
  double re, im;
  while (true) {
    for (int i = 0; i < st.n_modes; ++i)
      if (!(is >> occ[i])) return st;
    if (!(is >> re >> im)) throw DimensionError("load_fock: bad amplitude line");
    st.amps[pack_occupation(occ)] = Complex(re, im);
  }
}

}  // namespace ggmlab
