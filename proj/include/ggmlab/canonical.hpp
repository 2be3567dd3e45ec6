#pragma once

// Canonical GGM for arbitrary pure Fock states: 1 minus the largest reduced
// eigenvalue over all canonical mode bipartitions. The default eigenvalue
// extraction is power iteration on rho = A A^dag applied matrix-free through
// the sparse amplitude matrix A of the split; small problems use a full
// Hermitian solve. The SVD-based Schmidt spectrum doubles as an independent
// oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "ggmlab/bipartition.hpp"
#include "ggmlab/errors.hpp"
#include "ggmlab/fock.hpp"

namespace ggmlab {

namespace detail {

inline constexpr int kDenseEigCutoff = 64;
inline constexpr double kPowerTol = 1e-12;
inline constexpr int kPowerMaxIter = 100000;

// Top eigenvalue of the PSD map v -> apply(v) on C^dim via power iteration.
// Returns -1 on slow convergence so callers can fall back.
template <class ApplyFn>
double power_iterate(int dim, ApplyFn&& apply) {
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i)
    v(i) = Complex(1.0 + 1e-3 * ((i * 2654435761u) % 97) / 97.0, 0.0);
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    Eigen::VectorXcd w = apply(v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;  // state orthogonal to the range; rho v = 0
    const double next = std::real(v.dot(w));
    w /= nw;
    if (it > 0 && std::abs(next - lam) < kPowerTol * std::max(1.0, next))
      return next;
    lam = next;
    v.swap(w);
  }
  return -1.0;
}

// Sparse amplitude matrix of `state` across the split: rows = sorted side-A
// tuples, cols = sorted side-B tuples.
inline Eigen::SparseMatrix<Complex> split_matrix(const FockState& state,
                                                 const std::vector<int>& side_a) {
  std::vector<int> side_b;
  for (int i = 0; i < state.n_modes; ++i)
    if (!std::binary_search(side_a.begin(), side_a.end(), i))
      side_b.push_back(i);
  auto split_key = [&](FockKey key) {
    const auto occ = unpack_occupation(key, state.n_modes);
    std::vector<int> ka, kb;
    for (int i : side_a) ka.push_back(occ[i]);
    for (int i : side_b) kb.push_back(occ[i]);
    return std::pair{pack_occupation(ka), pack_occupation(kb)};
  };
  std::map<FockKey, int> rows, cols;
  for (const auto& [key, amp] : state.amps) {
    const auto [ka, kb] = split_key(key);
    rows.emplace(ka, 0);
    cols.emplace(kb, 0);
  }
  int idx = 0;
  for (auto& [k, v] : rows) v = idx++;
  idx = 0;
  for (auto& [k, v] : cols) v = idx++;

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(state.amps.size());
  for (const auto& [key, amp] : state.amps) {
    const auto [ka, kb] = split_key(key);
    trips.emplace_back(rows.at(ka), cols.at(kb), amp);
  }
  Eigen::SparseMatrix<Complex> m(static_cast<int>(rows.size()),
                                 static_cast<int>(cols.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

// Largest squared singular value of the split matrix.
inline double split_max_eigenvalue(const Eigen::SparseMatrix<Complex>& a) {
  const bool rows_smaller = a.rows() <= a.cols();
  const int dim = static_cast<int>(rows_smaller ? a.rows() : a.cols());
  if (dim <= kDenseEigCutoff) {
    Eigen::MatrixXcd gram;
    if (rows_smaller)
      gram = (a * a.adjoint()).toDense();
    else
      gram = (a.adjoint() * a).toDense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                       Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericalError("split_max_eigenvalue: dense eigensolver failed");
    return es.eigenvalues().maxCoeff();
  }
  auto apply = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    if (rows_smaller) return a * (a.adjoint() * v);
    return a.adjoint() * (a * v);
  };
  const double lam = power_iterate(dim, apply);
  if (lam >= 0.0) return lam;
  throw NumericalError(
      "split_max_eigenvalue: power iteration did not converge");
}

}  // namespace detail

// Largest eigenvalue of a reduced density matrix. Power iteration with
// tolerance 1e-12 on increments; full Hermitian solve for dimension <= 64 or
// on slow convergence.
inline double max_eigenvalue_rdm(const ReducedDensityMatrix& rdm) {
  const int dim = static_cast<int>(rdm.matrix.rows());
  if (dim > detail::kDenseEigCutoff) {
    const double lam = detail::power_iterate(
        dim, [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
          return rdm.matrix * v;
        });
    if (lam >= 0.0) return lam;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm.matrix,
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("max_eigenvalue_rdm: eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

// Schmidt coefficients (squared singular values) across the split, sorted
// descending; they sum to 1 for a normalized state.
inline std::vector<double> schmidt_spectrum(const FockState& state,
                                            const ModeBipartition& split) {
  std::vector<int> side_a = split.side_a;
  std::sort(side_a.begin(), side_a.end());
  if (side_a.empty() ||
      static_cast<int>(side_a.size()) > split.n_total / 2 ||
      side_a.back() >= state.n_modes)
    throw DimensionError("schmidt_spectrum: invalid bipartition");
  Eigen::MatrixXcd dense = detail::split_matrix(state, side_a).toDense();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense);
  std::vector<double> out(svd.singularValues().size());
  for (int i = 0; i < svd.singularValues().size(); ++i)
    out[i] = svd.singularValues()(i) * svd.singularValues()(i);
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

// Canonical GGM of a pure Fock state.
inline GgmResult ggm_fock(const FockState& state) {
  GgmResult res;
  double best = -1.0;
  for (const auto& subset : canonical_bipartitions(state.n_modes)) {
    const auto a = detail::split_matrix(state, subset);
    const double lam = detail::split_max_eigenvalue(a);
    res.candidates.push_back({subset, lam});
    if (lam > best) {
      best = lam;
      res.argmax_partition = subset;
    }
  }
  res.value = 1.0 - best;
  return res;
}

}  // namespace ggmlab
