#pragma once

// Seeded generators and dense reference computations shared by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pqslab/ensemble.hpp"
#include "pqslab/sector.hpp"
#include "pqslab/states.hpp"

namespace testing {

using pqslab::cplx;

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double gauss(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline pqslab::SectorState random_state(std::mt19937_64& rng, int n) {
  pqslab::SectorState s;
  s.n = n;
  s.amplitudes.resize(n + 1);
  for (int k = 0; k <= n; ++k) s.amplitudes(k) = cplx(gauss(rng), gauss(rng));
  s.amplitudes.normalize();
  return s;
}

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t count) {
  std::vector<double> w(count);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - uniform(rng, 0.0, 1.0)) + 1e-3;
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

/// Arbitrary block-diagonal ensemble; n = 0 members appear occasionally and
/// several members may share a sector.
inline pqslab::Ensemble random_ensemble(std::mt19937_64& rng, int max_n, int max_members) {
  const int count = uniform_int(rng, 1, max_members);
  const auto w = random_weights(rng, count);
  pqslab::Ensemble ens;
  for (int i = 0; i < count; ++i) {
    const int n = uniform_int(rng, 0, 8) == 0 ? 0 : uniform_int(rng, 1, max_n);
    ens.members.push_back({w[i], random_state(rng, n)});
  }
  return ens;
}

/// Mixture of SU(2) coherent sector states in random directions: separable
/// in the particles of every sector.
inline pqslab::Ensemble random_coherent_mixture(std::mt19937_64& rng, int max_n, int max_members) {
  const int count = uniform_int(rng, 1, max_members);
  const auto w = random_weights(rng, count);
  pqslab::Ensemble ens;
  for (int i = 0; i < count; ++i) {
    const int n = uniform_int(rng, 1, max_n);
    const double polar = std::acos(uniform(rng, -1.0, 1.0));
    const double azimuth = uniform(rng, -M_PI, M_PI);
    ens.members.push_back({w[i], pqslab::su2_coherent(n, polar, azimuth)});
  }
  return ens;
}

/// Splits a two-mode pure state given by Fock amplitudes c(na, nb) into its
/// number sectors. Index k of sector n is na = k.
inline void append_sectors(const Eigen::MatrixXcd& fock, double weight, pqslab::Ensemble& ens) {
  const int na_max = static_cast<int>(fock.rows()) - 1;
  const int nb_max = static_cast<int>(fock.cols()) - 1;
  const double total = fock.squaredNorm();
  for (int n = 0; n <= na_max + nb_max; ++n) {
    pqslab::SectorState s;
    s.n = n;
    s.amplitudes = Eigen::VectorXcd::Zero(n + 1);
    for (int na = std::max(0, n - nb_max); na <= std::min(n, na_max); ++na) s.amplitudes(na) = fock(na, n - na);
    const double p = s.amplitudes.squaredNorm() / total;
    if (p < 1e-300) continue;
    s.amplitudes.normalize();
    ens.members.push_back({weight * p, s});
  }
}

/// Mixture of products |phi_a>|phi_b> of random single-mode states with
/// Fock support up to `cutoff`, reduced to its number-diagonal part.
inline pqslab::Ensemble random_mode_separable(std::mt19937_64& rng, int cutoff, int max_products) {
  const int count = uniform_int(rng, 1, max_products);
  const auto w = random_weights(rng, count);
  pqslab::Ensemble ens;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXcd a(cutoff + 1), b(cutoff + 1);
    const int la = uniform_int(rng, 0, cutoff);
    const int lb = uniform_int(rng, 0, cutoff);
    for (int k = 0; k <= cutoff; ++k) {
      a(k) = k <= la ? cplx(gauss(rng), gauss(rng)) : cplx(0.0);
      b(k) = k <= lb ? cplx(gauss(rng), gauss(rng)) : cplx(0.0);
    }
    append_sectors(a * b.transpose(), w[i], ens);
  }
  return ens;
}

/// Two-mode Fock amplitudes of the coherent product |alpha>|beta>.
inline Eigen::MatrixXcd coherent_fock(cplx alpha, cplx beta, int cutoff) {
  Eigen::VectorXcd a(cutoff + 1), b(cutoff + 1);
  for (int k = 0; k <= cutoff; ++k) {
    const double norm = std::exp(-0.5 * std::lgamma(k + 1.0));
    a(k) = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, k) * norm;
    b(k) = std::exp(-0.5 * std::norm(beta)) * std::pow(beta, k) * norm;
  }
  return a * b.transpose();
}

/// Sector operators from bosonic matrix elements in the |n_a, n_b> basis,
/// n_a = k: a^dag b |na, nb> = sqrt((na+1) nb) |na+1, nb-1>.
struct DenseSpin {
  Eigen::MatrixXcd jx, jy, jz;
};

inline DenseSpin dense_spin(int n) {
  const int d = n + 1;
  Eigen::MatrixXcd ab = Eigen::MatrixXcd::Zero(d, d);  // a^dag b
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
  for (int na = 0; na <= n; ++na) {
    const int nb = n - na;
    jz(na, na) = 0.5 * (na - nb);
    if (nb > 0) ab(na + 1, na) = std::sqrt(static_cast<double>((na + 1) * nb));
  }
  const Eigen::MatrixXcd ba = ab.adjoint();
  return {0.5 * (ab + ba), cplx(0.0, -0.5) * (ab - ba), jz};
}

inline double dense_expect(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& v) { return (v.adjoint() * op * v)(0, 0).real(); }

/// Mean and variance of O over an ensemble with the generalized-inverse
/// normalization, straight from the definitions.
struct NormalizedStat {
  double mean = 0.0;
  double var = 0.0;
  double conditional = 0.0;  // sum_n P_n (n+)^2 Var_n(O)
};

inline NormalizedStat normalized_stat(const pqslab::Ensemble& ens, int axis) {
  double s1 = 0.0, s2 = 0.0, cond = 0.0;
  for (const auto& mem : ens.members) {
    const int n = mem.state.n;
    const auto sp = dense_spin(n);
    const Eigen::MatrixXcd& op = axis == 0 ? sp.jx : axis == 1 ? sp.jy : sp.jz;
    const double inv = n > 0 ? 1.0 / n : 0.0;
    const double m1 = dense_expect(op, mem.state.amplitudes);
    const double m2 = dense_expect(op * op, mem.state.amplitudes);
    s1 += mem.weight * m1 * inv;
    s2 += mem.weight * m2 * inv * inv;
    cond += mem.weight * (m2 - m1 * m1) * inv * inv;
  }
  return {s1, s2 - s1 * s1, cond};
}

// min over a of lambda_min(Jx^2 + Jy^2 - 2a Jx) + a^2, which equals the
// minimum of Var(Jx) + Var(Jy) over the sector (Var O = min_a <(O - a)^2>,
// and the z-rotation symmetry lets (a, b) lie on the x axis).
inline double brute_force_cj(int n) {
  const auto d = dense_spin(n);
  const Eigen::MatrixXcd base = d.jx * d.jx + d.jy * d.jy;
  auto h = [&](double a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(base - 2.0 * a * d.jx, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) + a * a;
  };
  const double j = 0.5 * n;
  const int grid = 4000;
  double best_a = 0.0, best = h(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double a = j * i / grid;
    const double v = h(a);
    if (v < best) {
      best = v;
      best_a = a;
    }
  }
  double lo = std::max(0.0, best_a - j / grid), hi = std::min(j, best_a + j / grid);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = hi - r * (hi - lo), e = lo + r * (hi - lo);
    if (h(c) < h(e)) hi = e; else lo = c;
  }
  return std::min(best, h(0.5 * (lo + hi)));
}

}  // namespace testing
