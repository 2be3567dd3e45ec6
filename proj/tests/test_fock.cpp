#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ggmlab/fock.hpp"
#include "test_support.hpp"

using namespace ggmlab;

namespace {

double max_amp_diff(const FockState& a, const FockState& b) {
  double worst = 0.0;
  for (const auto& [k, v] : a.amps)
    worst = std::max(worst, std::abs(v - (b.amps.count(k) ? b.amps.at(k)
                                                          : Complex(0.0))));
  for (const auto& [k, v] : b.amps)
    if (!a.amps.count(k)) worst = std::max(worst, std::abs(v));
  return worst;
}

// align global phases before comparing (both real-positive here, but keep it
// robust for phased crystal states)
double phase_aligned_diff(const FockState& a, const FockState& b) {
  Complex overlap = 0.0;
  for (const auto& [k, v] : a.amps)
    if (b.amps.count(k)) overlap += std::conj(v) * b.amps.at(k);
  if (std::abs(overlap) == 0.0) return 1.0;
  FockState c = b;
  const Complex phase = std::conj(overlap) / std::abs(overlap);
  for (auto& [k, v] : c.amps) v *= phase;
  return max_amp_diff(a, c);
}

}  // namespace

TEST_CASE("build_crystal_fock: vacuum and occupation moments") {
  const auto vac = build_crystal_fock({0.7, 0.9, 0.0});
  REQUIRE(vac.amps.size() == 1);
  CHECK(std::abs(vac.amplitude({0, 0, 0}) - 1.0) < 1e-14);

  const CrystalParams p{0.8, 0.5, 1.0};
  const auto st = build_crystal_fock(p, {1e-12, 200});
  CHECK(st.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto occ = crystal_occupations(p);
  // <a_i^dag a_i> from the diagonal of the alpha block via covariance
  const auto mom = covariance_from_fock(st);
  CHECK(mom.cm.entries(0, 0) == doctest::Approx(occ.n1 + 0.5).epsilon(1e-8));
  CHECK(mom.cm.entries(2, 2) == doctest::Approx(occ.n2 + 0.5).epsilon(1e-8));
  CHECK(mom.cm.entries(4, 4) == doctest::Approx(occ.n3 + 0.5).epsilon(1e-8));
}

TEST_CASE("build_fmsv_fock: vacuum limit and closed-form covariance") {
  const auto vac = build_fmsv_fock(0.0);
  REQUIRE(vac.amps.size() == 1);
  CHECK(std::abs(vac.amplitude({0, 0, 0, 0}) - 1.0) < 1e-14);

  const double r = 0.4;
  const auto st = build_fmsv_fock(r, {1e-12, 200});
  const auto mom = covariance_from_fock(st);
  CHECK((mom.cm.entries - fmsv_cm(r).entries).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(mom.displacement.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("covariance_from_fock: crystal state reproduces the closed CM") {
  const CrystalParams p{0.5, 0.8, 1.3, 0.3, 0.7};
  const auto st = build_crystal_fock(p, {1e-12, 200});
  const auto mom = covariance_from_fock(st);
  CHECK((mom.cm.entries - crystal_cm(p).entries).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("apply_photon_op basics") {
  const auto fmsv = build_fmsv_fock(0.4);
  SUBCASE("all-zero counts is the identity") {
    const auto same =
        apply_photon_op(fmsv, {PhotonOpSpec::Kind::Add, {0, 0, 0, 0}});
    CHECK(max_amp_diff(fmsv, same) < 1e-14);
  }
  SUBCASE("single-term survival under subtraction") {
    FockState st;
    st.n_modes = 4;
    st.amps[pack_occupation({1, 0, 0, 0})] = 1.0 / std::sqrt(2.0);
    st.amps[pack_occupation({0, 1, 0, 0})] = 1.0 / std::sqrt(2.0);
    st.refresh_cutoffs();
    const auto out =
        apply_photon_op(st, {PhotonOpSpec::Kind::Subtract, {1, 0, 0, 0}});
    REQUIRE(out.amps.size() == 1);
    CHECK(std::abs(out.amplitude({0, 0, 0, 0}) - 1.0) < 1e-14);
  }
  SUBCASE("subtraction of absent photons is an error") {
    FockState st;
    st.n_modes = 4;
    st.amps[pack_occupation({0, 0, 0, 0})] = 1.0;
    st.refresh_cutoffs();
    CHECK_THROWS_AS(
        apply_photon_op(st, {PhotonOpSpec::Kind::Subtract, {1, 0, 0, 0}}),
        EmptyResultError);
  }
}

TEST_CASE("dual-path identity: ladder application vs closed forms (FMSV)") {
  const double r = 0.4;
  const FockOptions deep{1e-22, 200};
  const auto fmsv = build_fmsv_fock(r, deep);
  for (auto counts : {std::vector<int>{2, 0, 0, 0}, {1, 1, 0, 0}, {3, 0, 2, 0},
                      {0, 2, 0, 1}}) {
    const auto added =
        apply_photon_op(fmsv, {PhotonOpSpec::Kind::Add, counts});
    CHECK(max_amp_diff(added, build_added_fmsv(r, counts, deep)) < 1e-10);
    const auto sub =
        apply_photon_op(fmsv, {PhotonOpSpec::Kind::Subtract, counts});
    CHECK(max_amp_diff(sub, build_subtracted_fmsv(r, counts, deep)) < 1e-8);
  }
}

TEST_CASE("dual-path identity: ladder application vs closed forms (crystal)") {
  const CrystalParams p{0.8, 0.5, 1.0, 0.2, 0.5};
  const FockOptions deep{1e-22, 200};
  const auto st = build_crystal_fock(p, deep);
  for (auto counts : {std::vector<int>{5, 0, 0}, {1, 1, 0}, {2, 0, 1}}) {
    const auto added = apply_photon_op(st, {PhotonOpSpec::Kind::Add, counts});
    CHECK(phase_aligned_diff(added, build_added_crystal(p, counts, deep)) < 1e-8);
    const auto sub =
        apply_photon_op(st, {PhotonOpSpec::Kind::Subtract, counts});
    CHECK(phase_aligned_diff(sub, build_subtracted_crystal(p, counts, deep)) < 1e-8);
  }
  // zero counts reproduce the parents
  CHECK(phase_aligned_diff(st, build_added_crystal(p, {0, 0, 0}, deep)) < 1e-12);
  CHECK(max_amp_diff(build_fmsv_fock(0.4, {1e-22, 200}),
                     build_subtracted_fmsv(0.4, {0, 0, 0, 0}, {1e-22, 200})) < 1e-12);
}

TEST_CASE("freezing: alternate-mode subtraction depends only on the total") {
  const double r = 0.4;
  const FockOptions deep{1e-22, 200};
  for (int M : {2, 4, 6}) {
    const auto ref = build_subtracted_fmsv(r, {M, 0, 0, 0}, deep);
    for (int m1 = 0; m1 <= M; ++m1) {
      const auto other = build_subtracted_fmsv(r, {m1, 0, M - m1, 0}, deep);
      CHECK(max_amp_diff(ref, other) < 1e-12);
    }
  }
  // freezing also holds with m2 fixed to a constant
  const auto ref = build_subtracted_fmsv(r, {4, 1, 0, 0}, {1e-22, 200});
  for (int m1 : {0, 1, 3}) {
    CHECK(max_amp_diff(ref, build_subtracted_fmsv(r, {m1, 1, 4 - m1, 0},
                                                  {1e-22, 200})) < 1e-12);
  }
}

TEST_CASE("no freezing under addition") {
  const double r = 0.4;
  const int M = 6;
  bool differs = false;
  const auto ref = build_added_fmsv(r, {M, 0, 0, 0});
  for (int m1 = 0; m1 < M; ++m1)
    if (max_amp_diff(ref, build_added_fmsv(r, {m1, 0, M - m1, 0})) > 1e-6)
      differs = true;
  CHECK(differs);
}

TEST_CASE("reduced_density_matrix invariants") {
  SUBCASE("product state reduces to a rank-1 projector") {
    FockState st;
    st.n_modes = 2;
    // (|0> + |2>)/sqrt(2) (x) |1>
    st.amps[pack_occupation({0, 1})] = 1.0 / std::sqrt(2.0);
    st.amps[pack_occupation({2, 1})] = 1.0 / std::sqrt(2.0);
    st.refresh_cutoffs();
    const auto rdm = reduced_density_matrix(st, {0});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm.matrix);
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("FMSV single-mode RDM carries the thermal spectrum") {
    const double r = 0.4;
    const auto st = build_fmsv_fock(r, {1e-13, 200});
    const auto rdm = reduced_density_matrix(st, {0});
    CHECK((rdm.matrix - rdm.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(rdm.matrix.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm.matrix);
    const auto thermal = thermal_spectrum(0.5 * std::pow(std::cosh(r), 2));
    const int dim = static_cast<int>(es.eigenvalues().size());
    for (std::size_t n = 0; n < std::min<std::size_t>(thermal.size(), 8); ++n)
      CHECK(es.eigenvalues()(dim - 1 - static_cast<int>(n)) ==
            doctest::Approx(thermal[n]).epsilon(1e-7));
  }
  SUBCASE("errors") {
    const auto st = build_fmsv_fock(0.3);
    CHECK_THROWS_AS(reduced_density_matrix(st, {}), DimensionError);
    CHECK_THROWS_AS(reduced_density_matrix(st, {0, 1, 2, 3}), DimensionError);
  }
}

TEST_CASE("vacuum moments") {
  FockState st;
  st.n_modes = 3;
  st.amps[pack_occupation({0, 0, 0})] = 1.0;
  st.refresh_cutoffs();
  const auto mom = covariance_from_fock(st);
  CHECK(mom.displacement.cwiseAbs().maxCoeff() == 0.0);
  CHECK((mom.cm.entries - 0.5 * Eigen::MatrixXd::Identity(6, 6))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("truncation cap raises an error") {
  CHECK_THROWS_AS(build_fmsv_fock(2.0, {1e-10, 10}), TruncationError);
}

TEST_CASE("text dump/load round-trips exactly") {
  std::mt19937 rng(21);
  const auto st = random_fock_state({3, 4, 2}, 17, rng);
  std::stringstream ss;
  save_fock(ss, st);
  const auto back = load_fock(ss);
  CHECK(back.n_modes == st.n_modes);
  CHECK(back.cutoffs == st.cutoffs);
  REQUIRE(back.amps.size() == st.amps.size());
  for (const auto& [k, v] : st.amps) CHECK(back.amps.at(k) == v);
}

TEST_CASE("norm conservation through partial trace") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto st = random_fock_state({3, 3, 3, 3}, 25, rng);
    for (auto keep : {std::vector<int>{0}, {1, 3}, {0, 2}}) {
      const auto rdm = reduced_density_matrix(st, keep);
      CHECK(std::abs(rdm.matrix.trace().real() - 1.0) < 1e-10);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rdm.matrix);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}
