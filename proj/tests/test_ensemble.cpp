#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pqslab/ensemble.hpp"
#include "support.hpp"

using namespace pqslab;

namespace {

double poisson_pmf(double mean, int n) { return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0)); }

Ensemble single(const SectorState& s) { return Ensemble{{{1.0, s}}}; }

// Full-state first and second moments of the coherent product from its Fock
// amplitudes, inter-sector coherences included.
struct FockMoments {
  Vec3 mean{};
  Mat3 second{};
};

FockMoments fock_moments(const Eigen::MatrixXcd& fock) {
  const int cut = static_cast<int>(fock.rows()) - 1;
  // Jx, Jy, Jz and their products never change the total number, so only
  // sector blocks contribute; evaluate sector by sector.
  FockMoments out;
  for (int n = 0; n <= 2 * cut; ++n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
    for (int na = std::max(0, n - cut); na <= std::min(n, cut); ++na) v(na) = fock(na, n - na);
    if (v.squaredNorm() == 0.0) continue;
    const auto d = testing::dense_spin(n);
    const Eigen::MatrixXcd* ops[3] = {&d.jx, &d.jy, &d.jz};
    for (int i = 0; i < 3; ++i) {
      out.mean[i] += testing::dense_expect(*ops[i], v);
      for (int j = 0; j < 3; ++j) out.second[i][j] += testing::dense_expect(0.5 * (*ops[i] * *ops[j] + *ops[j] * *ops[i]), v);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("number distribution validation") {
  NumberDistribution d({{4, 0.25}, {2, 0.75}});
  CHECK(d.support().front().first == 2);
  CHECK(d.mean() == doctest::Approx(2.5));
  CHECK(d.variance() == doctest::Approx(0.75));
  CHECK(NumberDistribution::delta(7).is_delta());
  CHECK(NumberDistribution::delta(7).variance() == 0.0);
  CHECK_THROWS_AS(NumberDistribution({{-1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(NumberDistribution({{1, 0.5}, {1, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(NumberDistribution({{1, 1.5}, {2, -0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(NumberDistribution({{1, 0.5}, {2, 0.49}}), std::invalid_argument);
  CHECK_THROWS_AS(NumberDistribution({}), std::invalid_argument);
}

TEST_CASE("truncated Poisson distribution") {
  const auto one = poisson_distribution(1.0);
  CHECK(one.support().front().first == 0);
  CHECK(one.support().front().second == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));

  const auto d = poisson_distribution(100.0, 1e-12);
  double total = 0.0, kept = 0.0;
  for (auto [n, p] : d.support()) {
    total += p;
    kept += poisson_pmf(100.0, n);
  }
  CHECK(std::abs(total - 1.0) < 1e-9);
  CHECK(1.0 - kept <= 1e-12 + 1e-15);
  CHECK(d.support().front().first >= 0);
  CHECK(d.support().back().first <= 180);
  CHECK(std::abs(std::sqrt(d.variance()) / 10.0 - 1.0) < 0.005);
  CHECK(d.mean() == doctest::Approx(100.0).epsilon(1e-9));

  // Contiguous and minimal: dropping either end pushes the omitted mass over the bound.
  const auto& s = d.support();
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].first == s[i - 1].first + 1);
  const double smaller_end = std::min(poisson_pmf(100.0, s.front().first), poisson_pmf(100.0, s.back().first));
  CHECK(1.0 - kept + smaller_end > 1e-12);

  CHECK_THROWS_AS(poisson_distribution(0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_distribution(10.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_distribution(10.0, 1e-3), std::invalid_argument);
}

TEST_CASE("attach") {
  const auto single_member = attach([](int n) { return su2_coherent_x(n); }, NumberDistribution::delta(6));
  REQUIRE(single_member.members.size() == 1);
  CHECK(single_member.fixed_n() == 6);

  const auto two = attach([](int n) { return phase_eigenstate(n, 0.0); }, NumberDistribution({{2, 0.5}, {4, 0.5}}));
  REQUIRE(two.members.size() == 2);
  CHECK(two.members[0].weight == 0.5);
  CHECK(two.members[1].weight == 0.5);
  CHECK(two.members[1].state.n == 4);
  CHECK_FALSE(two.fixed_n().has_value());
  two.validate();

  auto failing = [](int n) -> SectorState {
    if (n == 3) throw std::runtime_error("no state");
    return su2_coherent_x(n);
  };
  try {
    attach(failing, NumberDistribution({{2, 0.5}, {3, 0.5}}));
    FAIL("expected SectorError");
  } catch (const SectorError& e) {
    CHECK(e.n() == 3);
  }
  CHECK_THROWS_AS(attach([](int) { return su2_coherent_x(1); }, NumberDistribution::delta(2)), SectorError);
}

TEST_CASE("ensemble validation") {
  Ensemble bad{{{0.6, su2_coherent_x(2)}, {0.3, su2_coherent_x(3)}}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  Ensemble neg{{{1.2, su2_coherent_x(2)}, {-0.2, su2_coherent_x(3)}}};
  CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
  auto s = su2_coherent_x(2);
  s.amplitudes *= 1.01;
  CHECK_THROWS_AS(single(s).validate(), std::invalid_argument);
}

TEST_CASE("coherent product ensemble") {
  const auto sym = coherent_product_ensemble(30.0, 30.0, 0.0);
  for (const auto& m : sym.members) {
    CHECK((m.state.amplitudes - su2_coherent_x(m.state.n).amplitudes).norm() < 1e-12);
  }
  const auto empty_b = coherent_product_ensemble(20.0, 0.0, 0.0);
  for (const auto& m : empty_b.members) CHECK(std::norm(m.state.amplitudes(m.state.n)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(coherent_product_ensemble(0.0, 0.0, 0.0), std::invalid_argument);

  SUBCASE("moments match a two-mode Fock-space computation") {
    struct Case {
      double a2, b2, phase;
    };
    for (const Case c : {Case{3.0, 5.0, 0.4}, Case{10.0, 10.0, -1.2}, Case{15.0, 4.0, 2.9}, Case{0.5, 1.5, 0.0}}) {
      const int cut = 75;
      const auto fock = testing::coherent_fock(std::sqrt(c.a2), std::polar(std::sqrt(c.b2), c.phase), cut);
      const auto ref = fock_moments(fock);
      const auto m = moments(coherent_product_ensemble(c.a2, c.b2, c.phase));
      CHECK(m.mean_n == doctest::Approx(c.a2 + c.b2).epsilon(1e-10));
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(m.mean[i] - ref.mean[i]) < 1e-8);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(m.second[i][j] - ref.second[i][j]) < 1e-8);
      }
    }
  }
}

TEST_CASE("normalized expectations") {
  Ensemble vac{{{1.0, SectorState{0, Eigen::VectorXcd::Ones(1)}}}};
  for (auto op : {SpinComponent::X, SpinComponent::Y, SpinComponent::Z}) CHECK(normalized_expectation(vac, op) == 0.0);
  CHECK(moments(vac).mean_n_plus == 0.0);

  CHECK(normalized_expectation(single(su2_coherent_x(50)), SpinComponent::X) == doctest::Approx(0.5).epsilon(1e-14));
  Ensemble mixed{{{0.5, su2_coherent_x(2)}, {0.5, su2_coherent_x(4)}}};
  CHECK(normalized_expectation(mixed, SpinComponent::X) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normalized_expectation(mixed, SpinComponent::Phi, std::numbers::pi / 3) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("moments against direct sums") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 60; ++t) {
    const auto ens = testing::random_ensemble(rng, 25, 6);
    const auto m = moments(ens);
    for (int axis = 0; axis < 3; ++axis) {
      const auto ref = testing::normalized_stat(ens, axis);
      CHECK(m.mean_t[axis] == doctest::Approx(ref.mean).epsilon(1e-12).scale(1.0));
      CHECK(m.var_t(axis) == doctest::Approx(ref.var).epsilon(1e-11).scale(1.0));
      CHECK(m.conditional_var_t[axis] == doctest::Approx(ref.conditional).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("fixed-n ensembles scale by powers of n") {
  std::mt19937_64 rng(42);
  for (int n : {1, 3, 50}) {
    const auto s = testing::random_state(rng, n);
    const auto m = moments(single(s));
    const auto raw = spin_moments(s);
    CHECK(m.fixed_n == n);
    for (int i = 0; i < 3; ++i) {
      CHECK(m.mean_t[i] == doctest::Approx(raw.mean[i] / n).epsilon(1e-14).scale(1.0));
      CHECK(m.var_t(i) == doctest::Approx(m.var(i) / (1.0 * n * n)).epsilon(1e-12).scale(1.0));
    }
    CHECK(m.cov_t(0, 1) == doctest::Approx(raw.covariance(0, 1) / (1.0 * n * n)).epsilon(1e-12).scale(1.0));
  }
  CHECK(moments(single(su2_coherent_x(50))).var_jy_t() == doctest::Approx(1.0 / 200.0).epsilon(1e-12));
}

TEST_CASE("normalized variance inequality and number sanity over random ensembles") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 1000; ++t) {
    const auto ens = testing::random_ensemble(rng, 30, 8);
    const auto m = moments(ens);
    for (int axis = 0; axis < 3; ++axis) {
      CHECK(m.var_t(axis) - m.conditional_var_t[axis] >= -1e-10);
      CHECK(m.var_t(axis) >= -1e-12);
    }
    CHECK(m.mean_n_plus <= 1.0 + 1e-15);
    CHECK(m.mean_n * m.mean_n_plus >= m.nonvacuum_weight * m.nonvacuum_weight - 1e-12);
  }
}

TEST_CASE("first moments are linear in the weights") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const auto a = testing::random_ensemble(rng, 20, 4);
    const auto b = testing::random_ensemble(rng, 20, 4);
    const double lambda = testing::uniform(rng, 0.0, 1.0);
    Ensemble mix;
    for (const auto& m : a.members) mix.members.push_back({lambda * m.weight, m.state});
    for (const auto& m : b.members) mix.members.push_back({(1.0 - lambda) * m.weight, m.state});
    const auto ma = moments(a), mb = moments(b), mm = moments(mix);
    for (int i = 0; i < 3; ++i) {
      CHECK(mm.mean_t[i] == doctest::Approx(lambda * ma.mean_t[i] + (1 - lambda) * mb.mean_t[i]).epsilon(1e-12).scale(1.0));
      CHECK(mm.second_t[i][i] ==
            doctest::Approx(lambda * ma.second_t[i][i] + (1 - lambda) * mb.second_t[i][i]).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("reduction order does not depend on member order") {
  std::mt19937_64 rng(45);
  Ensemble ens;
  const auto w = testing::random_weights(rng, 7);
  for (int i = 0; i < 7; ++i) ens.members.push_back({w[i], testing::random_state(rng, 3 * i + 1)});
  Ensemble reversed = ens;
  std::reverse(reversed.members.begin(), reversed.members.end());
  const auto a = moments(ens), b = moments(reversed);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.mean_t[i] == b.mean_t[i]);
    for (int j = 0; j < 3; ++j) CHECK(a.second_t[i][j] == b.second_t[i][j]);
  }
}

TEST_CASE("moment rotations agree with state rotations") {
  std::mt19937_64 rng(46);
  for (int t = 0; t < 20; ++t) {
    const auto ens = testing::random_ensemble(rng, 15, 4);
    const Vec3 axis{0.36, 0.48, 0.8};
    const double angle = testing::uniform(rng, -3.0, 3.0);
    Ensemble rotated;
    for (const auto& m : ens.members) {
      rotated.members.push_back({m.weight, apply_unitary(su2_rotation(m.state.n, axis, angle).matrix, m.state)});
    }
    const auto via_moments = summarize(rotate(member_moments(ens), rotation_matrix(axis, angle)));
    const auto via_states = moments(rotated);
    for (int i = 0; i < 3; ++i) {
      CHECK(via_moments.mean_t[i] == doctest::Approx(via_states.mean_t[i]).epsilon(1e-11).scale(1.0));
      for (int j = 0; j < 3; ++j) {
        CHECK(via_moments.second_t[i][j] == doctest::Approx(via_states.second_t[i][j]).epsilon(1e-11).scale(1.0));
      }
    }
  }
}

TEST_CASE("frame fixing") {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 20; ++t) {
    const auto ens = testing::random_ensemble(rng, 15, 5);
    const auto before = moments(ens);
    const auto fixed = moments(frame_fix(ens));
    CHECK(fixed.mean_t[0] == doctest::Approx(std::hypot(before.mean_t[0], before.mean_t[1])).epsilon(1e-12));
    CHECK(std::abs(fixed.mean_t[1]) < 1e-13);
    CHECK(fixed.var_t(0) + fixed.var_t(1) == doctest::Approx(before.var_t(0) + before.var_t(1)).epsilon(1e-12));
    const auto fixed_m = summarize(frame_fix(member_moments(ens)));
    CHECK(fixed_m.mean_t[0] == doctest::Approx(fixed.mean_t[0]).epsilon(1e-12));
    CHECK(fixed_m.var_t(0) == doctest::Approx(fixed.var_t(0)).epsilon(1e-11).scale(1.0));
  }
  CHECK(frame_angle(moments(Ensemble{{{1.0, su2_coherent(4, 0.0, 0.0)}}})) == 0.0);
}

TEST_CASE("Mach-Zehnder preparation: moment route and state route agree") {
  const auto dist = poisson_distribution(30.0, 1e-10);
  const auto ens = attach([](int n) { return ground_state(n, {1.0, 0.2}); }, dist);
  const auto by_state = mz_prepare(ens);
  const auto by_moment = mz_prepare(member_moments(ens));
  CHECK(by_state.alpha == doctest::Approx(by_moment.alpha).epsilon(1e-12).scale(1.0));
  CHECK(by_state.frame_beta == doctest::Approx(by_moment.frame_beta).epsilon(1e-10).scale(1.0));
  const auto a = moments(by_state.ensemble);
  const auto b = summarize(by_moment.ensemble);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.mean_t[i] == doctest::Approx(b.mean_t[i]).epsilon(1e-10).scale(1.0));
    for (int j = 0; j < 3; ++j) CHECK(a.second_t[i][j] == doctest::Approx(b.second_t[i][j]).epsilon(1e-10).scale(1.0));
  }
  CHECK(a.mean_t[0] > 0.0);
  CHECK(std::abs(a.mean_t[1]) < 1e-12);

  // The optimized phase is no worse than a fine scan.
  const auto mm = member_moments(ens);
  const Vec3 mean = summarize(mm).mean_t;
  auto transverse = [&](double alpha) {
    const Mat3 r = mz_prepare_rotation(alpha);
    double x = 0, y = 0;
    for (int j = 0; j < 3; ++j) {
      x += r[0][j] * mean[j];
      y += r[1][j] * mean[j];
    }
    return std::hypot(x, y);
  };
  const double best = transverse(optimal_mz_phase(mm));
  for (int i = 0; i <= 720; ++i) CHECK(best >= transverse(-std::numbers::pi / 2 + i * std::numbers::pi / 720) - 1e-12);

  // A fixed phase is honoured.
  CHECK(mz_prepare(mm, 0.3).alpha == 0.3);
}
