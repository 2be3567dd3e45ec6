#pragma once

// Canonical mode bipartitions and the GGM result record shared by the
// Gaussian (symplectic) and Fock (canonical) engines.

#include <vector>

#include "ggmlab/errors.hpp"

namespace ggmlab {

struct ModeBipartition {
  std::vector<int> side_a;  // sorted, nonempty, |side_a| <= n_total/2
  int n_total = 0;
};

// One evaluated reduction: the mode subset and the maximal eigenvalue of the
// corresponding reduced state.
struct GgmCandidate {
  std::vector<int> modes;
  double max_eigenvalue = 0.0;
};

struct GgmResult {
  double value = 0.0;                 // 1 - max over candidates
  std::vector<int> argmax_partition;  // subset achieving the max
  std::vector<GgmCandidate> candidates;
  bool purity_warning = false;
};

// All subsets of {0,...,n-1} with 1 <= |A| <= floor(n/2), lexicographic.
// For even n, half-size subsets are kept only when they contain mode 0
// (A:B and B:A carry identical Schmidt spectra).
inline std::vector<std::vector<int>> canonical_bipartitions(int n_modes) {
  if (n_modes < 2)
    throw DimensionError("canonical_bipartitions: need at least 2 modes");
  std::vector<std::vector<int>> out;
  const int half = n_modes / 2;
  for (int m = 1; m <= half; ++m) {
    std::vector<int> idx(m);
    for (int i = 0; i < m; ++i) idx[i] = i;
    while (true) {
      if (!(n_modes % 2 == 0 && m == half && idx[0] != 0)) out.push_back(idx);
      // next combination
      int i = m - 1;
      while (i >= 0 && idx[i] == n_modes - m + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace ggmlab
