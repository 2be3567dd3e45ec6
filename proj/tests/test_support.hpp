#pragma once

// Shared helpers for the test suites: independent brute-force oracles and
// random-state generators. Nothing here may call back into the code path it
// is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ggmlab/covariance.hpp"
#include "ggmlab/fock.hpp"

namespace ggmlab {

// Thermal eigenvalue lambda_n = e^{-beta n} (1 - e^{-beta}).
inline double thermal_weight(double beta, int n) {
  return std::exp(-beta * n) * (1.0 - std::exp(-beta));
}

// -sum_n lambda_n log2 lambda_n summed until the tail drops below 1e-15,
// with beta from the nu <-> beta map.
inline double thermal_entropy_series(double nu) {
  if (nu <= 0.5) return 0.0;
  const double beta = std::log((nu + 0.5) / (nu - 0.5));
  double s = 0.0;
  for (int n = 0;; ++n) {
    const double lam = thermal_weight(beta, n);
    if (lam < 1e-15) break;
    s -= lam * std::log2(lam);
  }
  return s;
}

// Thermal spectrum {lambda_n} for the mode nu, truncated at 1e-15.
inline std::vector<double> thermal_spectrum(double nu) {
  std::vector<double> out;
  if (nu <= 0.5 + 1e-14) return {1.0};
  const double beta = std::log((nu + 0.5) / (nu - 0.5));
  for (int n = 0;; ++n) {
    const double lam = thermal_weight(beta, n);
    if (lam < 1e-15) break;
    out.push_back(lam);
  }
  return out;
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Random symplectic built from single-mode squeezers, single-mode phase
// rotations and two-mode beam-splitter rotations (all symplectic in the
// (q,p) ordering).
inline Eigen::MatrixXd random_symplectic(int n_modes, std::mt19937& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> squeeze(-0.8, 0.8);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < n_modes; ++i) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
      const double z = std::exp(squeeze(rng));
      g(2 * i, 2 * i) = z;
      g(2 * i + 1, 2 * i + 1) = 1.0 / z;
      s = g * s;
      const double th = angle(rng);
      Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
      rot(2 * i, 2 * i) = std::cos(th);
      rot(2 * i, 2 * i + 1) = std::sin(th);
      rot(2 * i + 1, 2 * i) = -std::sin(th);
      rot(2 * i + 1, 2 * i + 1) = std::cos(th);
      s = rot * s;
    }
    for (int i = 0; i + 1 < n_modes; ++i) {
      const double th = angle(rng);
      Eigen::MatrixXd bs = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
      for (int k = 0; k < 2; ++k) {
        bs(2 * i + k, 2 * i + k) = std::cos(th);
        bs(2 * i + k, 2 * (i + 1) + k) = std::sin(th);
        bs(2 * (i + 1) + k, 2 * i + k) = -std::sin(th);
        bs(2 * (i + 1) + k, 2 * (i + 1) + k) = std::cos(th);
      }
      s = bs * s;
    }
  }
  return s;
}

// Random valid CM: thermal diagonal (nu_i >= 1/2) conjugated by a random
// symplectic.
inline CovarianceMatrix random_valid_cm(int n_modes, std::mt19937& rng) {
  std::uniform_real_distribution<double> temp(0.0, 1.5);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    const double nu = 0.5 + temp(rng);
    d(2 * i, 2 * i) = nu;
    d(2 * i + 1, 2 * i + 1) = nu;
  }
  const auto s = random_symplectic(n_modes, rng);
  return CovarianceMatrix::from_matrix(symmetrize(s * d * s.transpose()));
}

// Random sparse normalized Fock state on the given per-mode cutoffs.
inline FockState random_fock_state(const std::vector<int>& cutoffs,
                                   int n_terms, std::mt19937& rng) {
  std::uniform_real_distribution<double> re(-1.0, 1.0);
  FockState st;
  st.n_modes = static_cast<int>(cutoffs.size());
  while (static_cast<int>(st.amps.size()) < n_terms) {
    std::vector<int> occ(st.n_modes);
    for (int i = 0; i < st.n_modes; ++i)
      occ[i] = static_cast<int>(rng() % (cutoffs[i] + 1));
    st.amps[pack_occupation(occ)] = Complex(re(rng), re(rng));
  }
  st.normalize();
  st.refresh_cutoffs();
  return st;
}

// Brute-force crystal oracle: evolve |000> under
//   H = g1 (a1^dag a3^dag + a1 a3) + g2 (a2^dag a3 + a3^dag a2)
// in the truncated basis |n2+n3, n2, n3> (n1 - n2 - n3 is conserved) and
// read off the occupations. Returns {n1, n2, n3}.
inline std::array<double, 3> evolve_crystal_occupations(double g1, double g2,
                                                        double t,
                                                        int cutoff = 30) {
  std::vector<std::pair<int, int>> basis;  // (n2, n3)
  std::map<std::pair<int, int>, int> index;
  for (int n2 = 0; n2 <= cutoff; ++n2)
    for (int n3 = 0; n2 + n3 <= cutoff; ++n3) {
      index[{n2, n3}] = static_cast<int>(basis.size());
      basis.emplace_back(n2, n3);
    }
  const int dim = static_cast<int>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const auto [n2, n3] = basis[i];
    const int n1 = n2 + n3;
    auto couple = [&](int m2, int m3, double val) {
      auto it = index.find({m2, m3});
      if (it != index.end()) h(it->second, i) += val;
    };
    couple(n2, n3 + 1, g1 * std::sqrt((n1 + 1.0) * (n3 + 1.0)));
    couple(n2, n3 - 1, g1 * std::sqrt(double(n1) * n3));
    couple(n2 + 1, n3 - 1, g2 * std::sqrt((n2 + 1.0) * n3));
    couple(n2 - 1, n3 + 1, g2 * std::sqrt(double(n2) * (n3 + 1.0)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::VectorXcd phases(dim);
  for (int i = 0; i < dim; ++i)
    phases(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
  const Eigen::VectorXd e0 =
      es.eigenvectors().row(index.at({0, 0})).transpose();
  const Eigen::VectorXcd psi =
      es.eigenvectors().cast<Complex>() * phases.cwiseProduct(e0.cast<Complex>());
  std::array<double, 3> occ{0.0, 0.0, 0.0};
  for (int i = 0; i < dim; ++i) {
    const double p = std::norm(psi(i));
    occ[0] += p * (basis[i].first + basis[i].second);
    occ[1] += p * basis[i].first;
    occ[2] += p * basis[i].second;
  }
  return occ;
}

}  // namespace ggmlab
