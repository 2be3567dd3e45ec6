#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ggmlab/canonical.hpp"
#include "ggmlab/gaussian.hpp"
#include "ggmlab/nongauss.hpp"
#include "test_support.hpp"

using namespace ggmlab;

TEST_CASE("delta_ng vanishes on Gaussian states") {
  CHECK(delta_ng(build_fmsv_fock(0.4, {1e-13, 200})) ==
        doctest::Approx(0.0).epsilon(1e-5));
  CHECK(delta_ng(build_crystal_fock({0.5, 0.8, 1.0}, {1e-13, 200})) ==
        doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("benchmark non-Gaussianity and enhancement values at r = 0.4") {
  const double r = 0.4;
  const double base = ggm_fock(build_fmsv_fock(r, {1e-12, 200})).value;

  SUBCASE("two photons subtracted from one mode") {
    const auto st = build_subtracted_fmsv(r, {2, 0, 0, 0}, {1e-12, 200});
    CHECK(delta_ng(st) == doctest::Approx(2.7548).epsilon(2e-3));
    CHECK(fractional_enhancement(ggm_fock(st).value, base) ==
          doctest::Approx(1.8234).epsilon(2e-2));
  }
  SUBCASE("two photons added to one mode") {
    const auto st = build_added_fmsv(r, {2, 0, 0, 0}, {1e-12, 200});
    CHECK(delta_ng(st) == doctest::Approx(2.7548).epsilon(2e-3));
    CHECK(fractional_enhancement(ggm_fock(st).value, base) ==
          doctest::Approx(0.1639).epsilon(2e-2));
  }
  SUBCASE("five-plus-one two-mode subtraction") {
    const auto st = build_subtracted_fmsv(r, {5, 1, 0, 0}, {1e-12, 200});
    CHECK(delta_ng(st) == doctest::Approx(3.6208).epsilon(2e-3));
  }
}

TEST_CASE("single-mode add/subtract symmetry of delta_ng") {
  const double r = 0.4;
  for (int m : {1, 2, 4}) {
    const double d_add = delta_ng(build_added_fmsv(r, {m, 0, 0, 0}));
    const double d_sub = delta_ng(build_subtracted_fmsv(r, {m, 0, 0, 0}));
    CHECK(d_add == doctest::Approx(d_sub).epsilon(1e-4));
  }
}

TEST_CASE("two-mode operations: addition de-Gaussifies faster") {
  const double r = 0.4;
  for (auto counts : {std::vector<int>{2, 1, 0, 0}, {3, 2, 0, 0}}) {
    const double d_add = delta_ng(build_added_fmsv(r, counts));
    const double d_sub = delta_ng(build_subtracted_fmsv(r, counts));
    CHECK(d_add > d_sub + 1e-3);
  }
}

TEST_CASE("delta_ng grows with the photon count") {
  const double r = 0.4;
  double prev = 0.0;
  for (int m : {1, 2, 3, 4}) {
    const double d = delta_ng(build_subtracted_fmsv(r, {m, 0, 0, 0}));
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("fractional_enhancement basics") {
  CHECK(fractional_enhancement(0.6, 0.3) == doctest::Approx(1.0));
  CHECK(fractional_enhancement(0.3, 0.3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fractional_enhancement(0.5, 0.0), InvalidSpectrumError);
}
