#pragma once

// GGM of pure multimode Gaussian states from symplectic spectra of all
// reductions up to floor(N/2) modes, plus constructors for the benchmark
// states (tritter, nonlinear-crystal evolution, four-mode squeezed vacuum)
// and kink detection on GGM time series.

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "ggmlab/bipartition.hpp"
#include "ggmlab/covariance.hpp"
#include "ggmlab/errors.hpp"

namespace ggmlab {

inline constexpr double kPurityWarnTol = 1e-6;
inline constexpr double kPurityFailTol = 1e-4;

// GGM of a pure Gaussian state: 1 - max over all canonical reductions of
// prod_i 2/(1 + 2 nu_i). Impurity beyond kPurityFailTol is an error, beyond
// kPurityWarnTol a warning flag on the result.
inline GgmResult ggm_gaussian(const CovarianceMatrix& cm) {
  const SymplecticSpectrum full = symplectic_eigenvalues(cm);
  double impurity = 0.0;
  for (double nu : full.values)
    impurity = std::max(impurity, std::abs(nu - kVacuumVariance));
  if (impurity > kPurityFailTol) {
    std::ostringstream os;
    os << "ggm_gaussian: state not pure, max |nu - 1/2| = " << impurity;
    throw PurityError(os.str());
  }

  GgmResult res;
  res.purity_warning = impurity > kPurityWarnTol;
  double best = -1.0;
  for (const auto& subset : canonical_bipartitions(cm.n_modes)) {
    const auto reduced = partial_trace_cm(cm, subset);
    const double lam =
        max_eigenvalue_from_spectrum(symplectic_eigenvalues(reduced));
    res.candidates.push_back({subset, lam});
    if (lam > best) {  // ties keep the lexicographically smallest subset
      best = lam;
      res.argmax_partition = subset;
    }
  }
  res.value = 1.0 - best;
  return res;
}

// --- tritter ----------------------------------------------------------------

// Three single-mode squeezed vacua of strength r combined on a tritter.
inline CovarianceMatrix tritter_cm(double r) {
  if (!std::isfinite(r)) throw DimensionError("tritter_cm: r must be finite");
  const double rp = std::cosh(2 * r) + std::sinh(2 * r) / 3.0;
  const double rm = std::cosh(2 * r) - std::sinh(2 * r) / 3.0;
  const double s = -2.0 / 3.0 * std::sinh(2 * r);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    m(2 * i, 2 * i) = rp;
    m(2 * i + 1, 2 * i + 1) = rm;
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      m(2 * i, 2 * j) = s;
      m(2 * i + 1, 2 * j + 1) = -s;
    }
  }
  return CovarianceMatrix::from_matrix(0.5 * m);
}

inline double tritter_ggm_closed(double r) {
  const double x = std::sqrt(5.0 + 4.0 * std::cosh(4 * r)) / 3.0;
  return (x - 1.0) / (x + 1.0);
}

// --- nonlinear crystal ------------------------------------------------------

struct CrystalParams {
  double gamma1 = 0.0;  // coupling a1^dag a3^dag + h.c.
  double gamma2 = 0.0;  // coupling a2^dag a3 + h.c.
  double t = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;
};

struct CrystalOccupations {
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;  // n1 = n2 + n3 at all times
};

// Mean occupations of the evolved vacuum. The oscillatory branch holds for
// |gamma2| > |gamma1|; for |gamma1| > |gamma2| the frequency turns imaginary
// and trigonometric functions continue to hyperbolic ones. The resonant
// |gamma1| = |gamma2| point uses the power-series limit.
inline CrystalOccupations crystal_occupations(const CrystalParams& p) {
  if (p.t < 0) throw DimensionError("crystal_occupations: t must be >= 0");
  const double g1 = std::abs(p.gamma1), g2 = std::abs(p.gamma2);
  const double d = g2 * g2 - g1 * g1;
  CrystalOccupations occ;
  const double scale = g1 * g1 + g2 * g2;
  if (std::abs(d) < 1e-9 * std::max(scale, 1e-300)) {
    occ.n3 = g1 * g1 * p.t * p.t;
    occ.n2 = g1 * g1 * g2 * g2 * std::pow(p.t, 4) / 4.0;
  } else if (d > 0) {
    const double om = std::sqrt(d);
    const double half = 2.0 * std::pow(std::sin(0.5 * om * p.t), 2);  // 1-cos
    occ.n2 = g1 * g1 * g2 * g2 * half * half / (d * d);
    const double sn = std::sin(om * p.t) / om;
    occ.n3 = g1 * g1 * sn * sn;
  } else {
    const double w = std::sqrt(-d);
    const double half = 2.0 * std::pow(std::sinh(0.5 * w * p.t), 2);  // cosh-1
    occ.n2 = g1 * g1 * g2 * g2 * half * half / (d * d);
    const double sh = std::sinh(w * p.t) / w;
    occ.n3 = g1 * g1 * sh * sh;
  }
  occ.n1 = occ.n2 + occ.n3;
  return occ;
}

// Covariance matrix of the crystal-evolved state; diagonal single-mode
// reductions (n_i + 1/2) I_2.
inline CovarianceMatrix crystal_cm(const CrystalParams& p) {
  const auto occ = crystal_occupations(p);
  const double f1 = occ.n1 + 0.5, f2 = occ.n2 + 0.5, f3 = occ.n3 + 0.5;
  const double a2 = std::sqrt(occ.n2 * (1 + occ.n1)) * std::cos(p.phi2);
  const double b2 = std::sqrt(occ.n2 * (1 + occ.n1)) * std::sin(p.phi2);
  const double a3 = std::sqrt(occ.n3 * (1 + occ.n1)) * std::cos(p.phi3);
  const double b3 = std::sqrt(occ.n3 * (1 + occ.n1)) * std::sin(p.phi3);
  const double c = std::sqrt(occ.n2 * occ.n3) * std::cos(p.phi2 - p.phi3);
  const double dd = std::sqrt(occ.n2 * occ.n3) * std::sin(p.phi2 - p.phi3);
  Eigen::MatrixXd m(6, 6);
  m << f1, 0, a2, -b2, a3, -b3,
       0, f1, -b2, -a2, -b3, -a3,
       a2, -b2, f2, 0, c, dd,
       -b2, -a2, 0, f2, -dd, c,
       a3, -b3, c, -dd, f3, 0,
       -b3, -a3, dd, c, 0, f3;
  return CovarianceMatrix::from_matrix(m);
}

// --- four-mode squeezed vacuum ----------------------------------------------

// 8x8 circulant block CM of the FMSV state with squeezing r.
inline CovarianceMatrix fmsv_cm(double r) {
  if (!std::isfinite(r)) throw DimensionError("fmsv_cm: r must be finite");
  const double c2 = std::cosh(r) * std::cosh(r);
  const double s2 = std::sinh(r) * std::sinh(r);
  const double sh = 0.5 * std::sinh(2 * r);
  Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d sz;
  sz << 1, 0, 0, -1;
  // block offsets 0..3 around the ring: C, S, A, S
  const Eigen::Matrix2d ring[4] = {c2 * i2, sh * sz, s2 * i2, sh * sz};
  Eigen::MatrixXd m(8, 8);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      m.block<2, 2>(2 * i, 2 * j) = ring[(j - i + 4) % 4];
  return CovarianceMatrix::from_matrix(0.5 * m);
}

// The three candidate maximal eigenvalues of FMSV reductions.
inline double fmsv_ggm_closed(double r) {
  const double single = 2.0 / (1.0 + std::cosh(r) * std::cosh(r));
  const double alternate = 2.0 / (1.0 + std::cosh(2 * r));
  const double adjacent = std::pow(2.0 / (1.0 + std::cosh(r)), 2);
  return 1.0 - std::max({single, alternate, adjacent});
}

// --- kinks ------------------------------------------------------------------

struct Kink {
  double t_lo = 0.0, t_hi = 0.0;  // bracketing samples
  std::vector<int> before, after;  // argmax subsets on either side
};

// Intervals where the argmax reduction changes between consecutive samples.
// A change is reported only when the two top candidates genuinely cross,
// i.e. their eigenvalue difference changes sign over the interval.
inline std::vector<Kink> detect_kinks(
    const std::vector<std::pair<double, GgmResult>>& series) {
  if (series.size() < 2)
    throw DimensionError("detect_kinks: need at least 2 samples");
  auto eig_of = [](const GgmResult& r, const std::vector<int>& subset) {
    for (const auto& c : r.candidates)
      if (c.modes == subset) return c.max_eigenvalue;
    throw DimensionError("detect_kinks: candidate subset missing from result");
  };
  std::vector<Kink> kinks;
  for (std::size_t i = 0; i + 1 < series.size(); ++i) {
    const auto& [t0, r0] = series[i];
    const auto& [t1, r1] = series[i + 1];
    if (r0.argmax_partition == r1.argmax_partition) continue;
    const double d0 = eig_of(r0, r0.argmax_partition) -
                      eig_of(r0, r1.argmax_partition);
    const double d1 = eig_of(r1, r0.argmax_partition) -
                      eig_of(r1, r1.argmax_partition);
    if (d0 >= 0.0 && d1 <= 0.0)
      kinks.push_back({t0, t1, r0.argmax_partition, r1.argmax_partition});
  }
  return kinks;
}

}  // namespace ggmlab
