#pragma once

// Relative-entropy non-Gaussianity of pure Fock states and the fractional
// GGM enhancement over the parent Gaussian state.

#include <cmath>

#include "ggmlab/covariance.hpp"
#include "ggmlab/errors.hpp"
#include "ggmlab/fock.hpp"

namespace ggmlab {

// delta_NG = S(rho_G) - S(rho), where rho_G is the Gaussian state with the
// same first and second moments. For a pure rho this is just the entropy of
// the moment-matched Gaussian state, and it is non-negative.
inline double delta_ng(const FockState& state) {
  const FockMoments mom = covariance_from_fock(state);
  return gaussian_entropy(symplectic_eigenvalues(mom.cm));
}

// f_G = (G(state) - G(baseline)) / G(baseline).
inline double fractional_enhancement(double state_ggm, double baseline_ggm) {
  if (baseline_ggm <= 0.0)
    throw InvalidSpectrumError(
        "fractional_enhancement: baseline GGM must be positive");
  return (state_ggm - baseline_ggm) / baseline_ggm;
}

struct NonGaussReport {
  double delta_ng = 0.0;
  double ggm = 0.0;
  double f_g = 0.0;
  double reference_ggm = 0.0;
  double r = 0.0;
  PhotonOpSpec spec;
};

}  // namespace ggmlab
