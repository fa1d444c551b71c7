#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pqslab/criteria.hpp"
#include "support.hpp"

using namespace pqslab;

namespace {

constexpr double kPi = std::numbers::pi;

NormalizedMoments fixed(const SectorState& s) { return moments(Ensemble{{{1.0, s}}}); }

NormalizedMoments poisson_ground(double mean, double g_over_kappa) {
  return moments(attach([&](int n) { return ground_state(n, {1.0, g_over_kappa}); }, poisson_distribution(mean)));
}

}  // namespace

TEST_CASE("Hillery-Zubairy value") {
  const auto coh = moments(coherent_product_ensemble(50.0, 50.0, 0.0));
  CHECK(std::abs(e_hz(coh) - 1.0) < 1e-6);
  CHECK(e_hz(fixed(su2_coherent_x(50))) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e_hz(fixed(phase_eigenstate(100, 0.0))) > 2.0);
  Ensemble vac{{{1.0, SectorState{0, Eigen::VectorXcd::Ones(1)}}}};
  CHECK_THROWS_AS(e_hz(moments(vac)), UndefinedCriterion);
  CHECK_THROWS_AS(e_ph(moments(vac)), UndefinedCriterion);
}

TEST_CASE("normalized HZ value") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 50; ++t) {
    const int n = testing::uniform_int(rng, 1, 60);
    const auto m = fixed(testing::random_state(rng, n));
    CHECK(std::abs(e_ph(m) - e_hz(m)) < 1e-12 * std::max(1.0, e_hz(m)));
  }
  // Each non-vacuum sector of the coherent product is an SU(2) coherent
  // state with normalized mean 1/2, so Var J~y = <N+>/4 and only the vacuum
  // weight P0 spreads J~x: Var J~x = P0 (1 - P0) / 4.
  for (double mean : {2.0, 5.0, 40.0, 100.0}) {
    const auto ens = coherent_product_ensemble(0.5 * mean, 0.5 * mean, 0.0);
    const auto m = moments(ens);
    const double p0 = 1.0 - m.nonvacuum_weight;
    const double expected = 0.5 + 0.5 * p0 * (1.0 - p0) / m.mean_n_plus;
    CHECK(e_ph(m) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("duplicating an ensemble leaves the ratios unchanged") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 20; ++t) {
    const auto ens = testing::random_ensemble(rng, 20, 5);
    Ensemble twice;
    for (const auto& m : ens.members) {
      twice.members.push_back({0.5 * m.weight, m.state});
      twice.members.push_back({0.5 * m.weight, m.state});
    }
    const auto a = moments(ens), b = moments(twice);
    if (a.mean_n_plus == 0.0) continue;
    CHECK(e_hz(a) == doctest::Approx(e_hz(b)).epsilon(1e-12));
    CHECK(e_ph(a) == doctest::Approx(e_ph(b)).epsilon(1e-12));
  }
}

TEST_CASE("spin squeezing for fixed n") {
  const auto c = xi_s(fixed(su2_coherent_x(100)));
  CHECK(c.y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.z == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(xi_s(fixed(su2_coherent_x(1)), 1).y == doctest::Approx(1.0).epsilon(1e-12));

  // Weak attraction squeezes Jy directly in the well basis.
  const auto sq = xi_s(fixed(ground_state(100, {1.0, -0.01})));
  CHECK(sq.y < 1.0);
  // Repulsion squeezes Jz.
  CHECK(xi_s(fixed(ground_state(100, {1.0, 1.0}))).z < 1.0);

  CHECK_THROWS_AS(xi_s(moments(coherent_product_ensemble(5.0, 5.0, 0.0))), FixedNOnly);
  CHECK_THROWS_AS(xi_s(fixed(su2_coherent_x(10)), 12), FixedNOnly);
  CHECK_THROWS_AS(xi_s(fixed(su2_coherent(10, 0.0, 0.0))), UndefinedCriterion);
}

TEST_CASE("normalized spin squeezing") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 50; ++t) {
    const int n = testing::uniform_int(rng, 1, 50);
    const auto m = fixed(frame_fix(testing::random_state(rng, n)));
    if (std::abs(m.mean_t[0]) < 1e-6) continue;
    const auto a = xi_s(m), b = xi_s_ph(m);
    CHECK(std::abs(a.y - b.y) < 1e-12 * std::max(1.0, a.y));
    CHECK(std::abs(a.z - b.z) < 1e-12 * std::max(1.0, a.z));
  }
  CHECK_THROWS_AS(xi_s_ph(fixed(su2_coherent(10, 0.0, 0.0))), UndefinedCriterion);

  // Poisson and fixed-n curves nearly overlay for a squeezed ground state.
  const auto p = xi_s_ph(poisson_ground(100.0, 0.5));
  const auto f = xi_s(fixed(ground_state(100, {1.0, 0.5})));
  CHECK(p.z == doctest::Approx(f.z).epsilon(0.2));
}

TEST_CASE("particle-separable mixtures never beat the shot-noise floor") {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 1000; ++t) {
    const auto m = moments(testing::random_coherent_mixture(rng, 40, 6));
    if (std::abs(m.mean_t[0]) < 1e-9) continue;
    const auto x = xi_s_ph(m);
    CHECK(x.y >= 1.0 - 1e-9);
    CHECK(x.z >= 1.0 - 1e-9);
  }
}

TEST_CASE("mode-separable ensembles satisfy the raw HZ bound") {
  // The raw variances of the number-diagonal reduction equal those of the
  // full product state, for which Var Jx + Var Jy >= <N>/2.
  std::mt19937_64 rng(55);
  for (int t = 0; t < 1000; ++t) {
    const auto m = moments(testing::random_mode_separable(rng, 6, 4));
    if (m.mean_n == 0.0) continue;
    CHECK(e_hz(m) >= 1.0 - 1e-9);
  }
}

TEST_CASE("phase-sensitivity measure") {
  for (int n : {4, 30, 100}) CHECK(eta_ph(fixed(su2_coherent_x(n))) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eta_ph(fixed(phase_eigenstate(100, 0.0))) > 2.0);
  CHECK(eta_ph(fixed(optimal_pqs_state(400).state)) < 1.0);

  std::mt19937_64 rng(56);
  for (int t = 0; t < 50; ++t) {
    const auto m = moments(frame_fix(testing::random_ensemble(rng, 30, 5)));
    if (std::abs(m.mean_t[0]) < 1e-6) continue;
    const double direct = std::sqrt(m.mean_n * (m.var_t(0) + m.var_t(1))) / std::abs(m.mean_t[0]);
    CHECK(eta_ph(m) == doctest::Approx(direct).epsilon(1e-12));
    const double worst = delta_phi(m, kPi / 4);
    CHECK(eta_ph(m) * eta_ph(m) == doctest::Approx(m.mean_n * worst * worst).epsilon(1e-12));
  }
}

TEST_CASE("phase uncertainty curve") {
  const auto coh = fixed(su2_coherent_x(100));
  std::vector<double> grid;
  for (int k = 1; k < 36; ++k) grid.push_back(kPi * k / 36.0);
  for (const auto& p : delta_phi_curve(coh, grid).points) CHECK(p.delta_phi == doctest::Approx(0.1).epsilon(1e-10));

  const auto divergent = delta_phi_curve(coh, {0.0, kPi, kPi / 2});
  CHECK(divergent.points[0].divergent);
  CHECK(std::isinf(divergent.points[0].delta_phi));
  CHECK(divergent.points[1].divergent);
  CHECK_FALSE(divergent.points[2].divergent);

  std::mt19937_64 rng(57);
  for (int t = 0; t < 40; ++t) {
    const auto m = moments(frame_fix(testing::random_ensemble(rng, 30, 5)));
    if (std::abs(m.mean_t[0]) < 1e-6) continue;
    const double mx2 = m.mean_t[0] * m.mean_t[0];
    CHECK(delta_phi(m, kPi / 2) == doctest::Approx(xi_s_ph(m).y / std::sqrt(m.mean_n)).epsilon(1e-12));
    const auto curve = delta_phi_curve(m, {kPi / 4, 3 * kPi / 4, 0.3});
    CHECK(curve.worst_case * curve.worst_case == doctest::Approx((m.var_t(0) + m.var_t(1)) / mx2).epsilon(1e-12));
    // The exact variant adds the covariance term.
    const double off = 0.9;
    const double c = std::cos(off), s = std::sin(off);
    const double exact2 = (c * c * m.var_t(0) + s * s * m.var_t(1) + 2 * s * c * m.cov_t(0, 1)) / (s * s * mx2);
    CHECK(delta_phi(m, off, true) == doctest::Approx(std::sqrt(exact2)).epsilon(1e-12));
  }

  // Symmetric states carry no Jx-Jy covariance and the two forms agree.
  const auto g = poisson_ground(60.0, -0.02);
  const auto pqs = fixed(optimal_pqs_state(60).state);
  for (double off : {0.2, kPi / 4, 1.3, kPi / 2, 2.4}) {
    CHECK(std::abs(delta_phi(g, off) - delta_phi(g, off, true)) < 1e-10);
    CHECK(std::abs(delta_phi(pqs, off) - delta_phi(pqs, off, true)) < 1e-10);
  }
}

TEST_CASE("limits and asymptote") {
  CHECK(cj_asymptote(4.0) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(cj_asymptote(13.5) == doctest::Approx(27.0 / 8.0).epsilon(1e-14));
  CHECK(sql_limit(100.0) == doctest::Approx(0.1));
  CHECK(heisenberg_limit(100.0) == doctest::Approx(0.01));
}

TEST_CASE("criterion report") {
  const auto fixed_report = evaluate_criteria(fixed(ground_state(100, {1.0, -0.01})));
  CHECK(fixed_report.xi_s_y.has_value());
  CHECK(fixed_report.entangled_modes());
  CHECK(fixed_report.entangled_particles());

  const auto poisson_report = evaluate_criteria(poisson_ground(100.0, -0.01));
  CHECK_FALSE(poisson_report.xi_s_y.has_value());
  CHECK_FALSE(poisson_report.xi_s_z.has_value());
  REQUIRE(poisson_report.e_ph.has_value());
  REQUIRE(poisson_report.e_hz.has_value());
  CHECK(*poisson_report.e_ph < 1.0);
  // Number noise adds about Var(N) (<Jx>/N)^2 = <N>/4 to Var Jx.
  CHECK(*poisson_report.e_hz > *fixed_report.e_hz + 0.4);

  const auto flat = evaluate_criteria(fixed(su2_coherent(10, 0.0, 0.0)));
  CHECK_FALSE(flat.xi_s_ph_y.has_value());
  CHECK_FALSE(flat.eta_ph.has_value());
  CHECK(flat.e_ph.has_value());
}
