#pragma once

// Covariance-matrix algebra for multimode bosonic states: validity
// certification, partial trace, Williamson (symplectic) spectra, and the
// thermal-product quantities reconstructed from a spectrum.
//
// Conventions (the only supported ones):
//   * quadrature ordering (q1, p1, q2, p2, ..., qm, pm)
//   * vacuum variance 1/2, i.e. vacuum CM = (1/2) I
//   * physical validity  Lambda + (i/2) J >= 0,  equivalently nu_i >= 1/2
//   * entropies in bits (log base 2)

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ggmlab/errors.hpp"

namespace ggmlab {

inline constexpr double kVacuumVariance = 0.5;
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPhysicalTol = 1e-9;
inline constexpr double kPureTol = 1e-8;

struct CovarianceMatrix {
  int n_modes = 0;
  Eigen::MatrixXd entries;  // 2 n_modes x 2 n_modes, symmetric

  static CovarianceMatrix vacuum(int n_modes) {
    if (n_modes < 1) throw DimensionError("vacuum: n_modes must be positive");
    CovarianceMatrix cm;
    cm.n_modes = n_modes;
    cm.entries =
        kVacuumVariance * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes);
    return cm;
  }

  // Checks squareness, even dimension and symmetry; symmetrizes roundoff.
  static CovarianceMatrix from_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
      throw DimensionError("covariance matrix must be square");
    if (m.rows() == 0 || m.rows() % 2 != 0)
      throw DimensionError("covariance matrix dimension must be even");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol) {
      std::ostringstream os;
      os << "covariance matrix not symmetric, max |L_ij - L_ji| = " << asym;
      throw DimensionError(os.str());
    }
    CovarianceMatrix cm;
    cm.n_modes = static_cast<int>(m.rows()) / 2;
    cm.entries = 0.5 * (m + m.transpose());
    return cm;
  }
};

struct SymplecticSpectrum {
  std::vector<double> values;  // sorted descending, one per mode
};

struct ValidityReport {
  bool ok = false;
  double margin = 0.0;  // min eigenvalue of Lambda + (i/2) J
};

// J = direct sum of [[0,1],[-1,0]] blocks in (q,p) ordering.
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int i = 0; i < n_modes; ++i) {
    j(2 * i, 2 * i + 1) = 1.0;
    j(2 * i + 1, 2 * i) = -1.0;
  }
  return j;
}

// Uncertainty-relation certificate. With vacuum variance 1/2 the bonafide
// condition reads Lambda + (i/2) J >= 0; the vacuum saturates it.
inline ValidityReport validate_cm(const CovarianceMatrix& cm) {
  const int d = 2 * cm.n_modes;
  Eigen::MatrixXcd h = cm.entries.cast<std::complex<double>>();
  h += std::complex<double>(0.0, 0.5) *
       symplectic_form(cm.n_modes).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("validate_cm: Hermitian eigensolver failed");
  ValidityReport rep;
  rep.margin = es.eigenvalues().minCoeff();
  rep.ok = rep.margin >= -kPhysicalTol;
  (void)d;
  return rep;
}

// Principal submatrix keeping the (q,p) rows/columns of `keep`, in canonical
// mode order.
inline CovarianceMatrix partial_trace_cm(const CovarianceMatrix& cm,
                                         std::vector<int> keep) {
  if (keep.empty()) throw DimensionError("partial_trace_cm: empty keep set");
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (int m : keep)
    if (m < 0 || m >= cm.n_modes)
      throw DimensionError("partial_trace_cm: mode index out of range");
  const int k = static_cast<int>(keep.size());
  Eigen::MatrixXd out(2 * k, 2 * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      out.block<2, 2>(2 * a, 2 * b) =
          cm.entries.block<2, 2>(2 * keep[a], 2 * keep[b]);
  CovarianceMatrix res;
  res.n_modes = k;
  res.entries = std::move(out);
  return res;
}

// Williamson spectrum as the moduli of the eigenvalues of i J Lambda.
// Eigenvalues come in +-nu pairs; the pairs must match to 1e-9 relative.
inline SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& cm) {
  const int m = cm.n_modes;
  Eigen::MatrixXcd ijl = std::complex<double>(0.0, 1.0) *
                         (symplectic_form(m) * cm.entries)
                             .cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(ijl);
  if (es.info() != Eigen::Success)
    throw NumericalError(
        "symplectic_eigenvalues: complex eigensolver did not converge");
  std::vector<double> mags(2 * m);
  for (int i = 0; i < 2 * m; ++i) mags[i] = std::abs(es.eigenvalues()(i));
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  SymplecticSpectrum spec;
  spec.values.reserve(m);
  for (int i = 0; i < m; ++i) {
    const double a = mags[2 * i], b = mags[2 * i + 1];
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (std::abs(a - b) / scale > 1e-9) {
      std::ostringstream os;
      os << "symplectic_eigenvalues: +-nu pair mismatch, |" << a << "| vs |"
         << b << "|";
      throw NumericalError(os.str());
    }
    spec.values.push_back(0.5 * (a + b));
  }
  return spec;
}

namespace detail {
// Clamp the band [1/2 - tol, 1/2) to exactly 1/2; reject anything lower.
inline double clamp_nu(double nu) {
  if (nu < kVacuumVariance - kPhysicalTol) {
    std::ostringstream os;
    os << "invalid symplectic eigenvalue nu = " << nu << " < 1/2";
    throw InvalidSpectrumError(os.str());
  }
  return std::max(nu, kVacuumVariance);
}
}  // namespace detail

// Largest eigenvalue of the thermal-product state with the given spectrum:
// prod_i 2/(1 + 2 nu_i). Equals 1 iff every mode is pure.
inline double max_eigenvalue_from_spectrum(const SymplecticSpectrum& spec) {
  double prod = 1.0;
  for (double nu : spec.values) prod *= 2.0 / (1.0 + 2.0 * detail::clamp_nu(nu));
  return prod;
}

// Single-mode thermal entropy in bits,
//   g(nu) = (nu + 1/2) log2(nu + 1/2) - (nu - 1/2) log2(nu - 1/2),
// continuously extended by g(1/2) = 0.
inline double thermal_entropy_term(double nu) {
  nu = detail::clamp_nu(nu);
  const double lo = nu - 0.5;
  if (lo <= 0.0) return 0.0;
  return (nu + 0.5) * std::log2(nu + 0.5) - lo * std::log2(lo);
}

// Von Neumann entropy (bits) of the Gaussian state with this spectrum.
inline double gaussian_entropy(const SymplecticSpectrum& spec) {
  double s = 0.0;
  for (double nu : spec.values) s += thermal_entropy_term(nu);
  return s;
}

}  // namespace ggmlab
