#include "pqslab/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "pqslab/kernels.hpp"
#include "pqslab/tridiag.hpp"

namespace pqslab {

SpinMoments spin_moments(const SectorState& state) {
  const auto& tables = kernels::sector_tables(state.n);
  const kernels::SectorSums s = kernels::sector_sums(state.amplitudes.data(), tables);
  const double casimir = 0.25 * state.n * (state.n + 2.0);
  const double inv = s.norm > 0.0 ? 1.0 / s.norm : 0.0;

  SpinMoments out;
  out.n = state.n;
  out.mean = {s.p1.real() * inv, s.p1.imag() * inv, s.z1 * inv};
  const double xx = 0.5 * (s.p2.real() * inv + casimir - s.z2 * inv);
  const double yy = 0.5 * (-s.p2.real() * inv + casimir - s.z2 * inv);
  const double xy = 0.5 * s.p2.imag() * inv;
  const double xz = 0.5 * s.p1z.real() * inv;
  const double yz = 0.5 * s.p1z.imag() * inv;
  const double zz = s.z2 * inv;
  out.second = {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
  return out;
}

double planar_variance(const SectorState& state) { return spin_moments(state).planar_variance(); }

double expectation(const Eigen::MatrixXcd& op, const SectorState& state) {
  return state.amplitudes.dot(op * state.amplitudes).real();
}

SectorState phase_eigenstate(int n, double theta) {
  const SectorBasis basis(n);
  SectorState s{n, Eigen::VectorXcd(static_cast<Eigen::Index>(basis.dim()))};
  const double amp = 1.0 / std::sqrt(static_cast<double>(basis.dim()));
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    s.amplitudes(static_cast<Eigen::Index>(k)) = std::polar(amp, basis.m(k) * theta);
  }
  return s;
}

double default_pqs_sigma(int n) {
  const double j = 0.5 * n;
  return std::pow(0.5 * j * j, 2.0 / 3.0);
}

SectorState gaussian_pqs_state(int n, const PqsSpec& spec) {
  if (!(spec.sigma_m > 0.0) || !std::isfinite(spec.sigma_m)) {
    throw std::invalid_argument("PQS envelope variance must be positive and finite");
  }
  const SectorBasis basis(n);
  SectorState s{n, Eigen::VectorXcd(static_cast<Eigen::Index>(basis.dim()))};
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double m = basis.m(k);
    s.amplitudes(static_cast<Eigen::Index>(k)) = std::polar(std::exp(-m * m / (4.0 * spec.sigma_m)), m * spec.theta);
  }
  s.amplitudes.normalize();
  return s;
}

SectorState su2_coherent(int n, double polar, double azimuth) {
  const SectorBasis basis(n);
  SectorState s{n, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim()))};
  const double c = std::cos(0.5 * polar);
  const double sn = std::sin(0.5 * polar);
  const double log_c = std::log(std::fabs(c));
  const double log_s = std::log(std::fabs(sn));
  const double lg_n = std::lgamma(n + 1.0);
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    // n_a = k bosons in mode a, n - k in mode b.
    const double kk = static_cast<double>(k);
    const double nb = n - kk;
    double mag = 0.0;
    const bool c_zero = c == 0.0 && kk > 0.0;
    const bool s_zero = sn == 0.0 && nb > 0.0;
    if (!c_zero && !s_zero) {
      double log_mag = 0.5 * (lg_n - std::lgamma(kk + 1.0) - std::lgamma(nb + 1.0));
      if (kk > 0.0) log_mag += kk * log_c;
      if (nb > 0.0) log_mag += nb * log_s;
      mag = std::exp(log_mag);
    }
    double sign = 1.0;
    if (c < 0.0 && (static_cast<int>(k) % 2) == 1) sign = -sign;
    if (sn < 0.0 && ((n - static_cast<int>(k)) % 2) == 1) sign = -sign;
    s.amplitudes(static_cast<Eigen::Index>(k)) = std::polar(sign * mag, -basis.m(k) * azimuth);
  }
  s.amplitudes.normalize();
  return s;
}

SectorState su2_coherent_x(int n) {
  SectorState s = su2_coherent(n, 0.5 * std::numbers::pi, 0.0);
  // Binomial amplitudes are real; drop rounding residue in the phase.
  for (auto& a : s.amplitudes) a = cplx(std::abs(a), 0.0);
  return s;
}

SectorState rotate_z(const SectorState& state, double angle) {
  const SectorBasis basis(state.n);
  SectorState out = state;
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    out.amplitudes(static_cast<Eigen::Index>(k)) *= std::polar(1.0, -basis.m(k) * angle);
  }
  return out;
}

SectorState frame_fix(const SectorState& state) {
  const SpinMoments mom = spin_moments(state);
  const double x = mom.mean[0];
  const double y = mom.mean[1];
  const double scale = std::max(1.0, 0.5 * state.n);
  if (std::hypot(x, y) <= 1e-13 * scale) return state;
  SectorState out = state;
  if (y == 0.0) {
    if (x < 0.0) {
      // Rotation by pi about z; (-1)^k differs from e^{i m pi} by a global phase.
      for (Eigen::Index k = 1; k < out.amplitudes.size(); k += 2) out.amplitudes(k) = -out.amplitudes(k);
    }
    return out;
  }
  const double beta = std::atan2(y, x);
  for (Eigen::Index k = 0; k < out.amplitudes.size(); ++k) {
    out.amplitudes(k) *= std::polar(1.0, static_cast<double>(k) * beta);
  }
  return out;
}

SectorState apply_unitary(const Eigen::MatrixXcd& unitary, const SectorState& state) {
  if (unitary.rows() != state.amplitudes.size() || unitary.cols() != state.amplitudes.size()) {
    throw std::invalid_argument("unitary dimension does not match sector n = " + std::to_string(state.n));
  }
  return {state.n, unitary * state.amplitudes};
}

SectorState mz_prepare(const SectorState& state, double alpha) {
  return apply_unitary(mz_unitary_cached(state.n), rotate_z(state, alpha));
}

namespace {

SymTridiagonal as_sym(const TridiagonalHamiltonian& h) { return {h.diag, h.off}; }

// y = T x for a real symmetric tridiagonal T.
Eigen::VectorXd tridiag_apply(const std::vector<double>& diag, const std::vector<double>& off, const Eigen::VectorXd& x) {
  const auto d = x.size();
  Eigen::VectorXd y(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    double v = diag[static_cast<std::size_t>(k)] * x(k);
    if (k > 0) v += off[static_cast<std::size_t>(k - 1)] * x(k - 1);
    if (k + 1 < d) v += off[static_cast<std::size_t>(k)] * x(k + 1);
    y(k) = v;
  }
  return y;
}

}  // namespace

GroundStateResult solve_ground_state(int n, const HamiltonianParams& params) {
  if (!std::isfinite(params.kappa) || !std::isfinite(params.g)) {
    throw std::invalid_argument("Hamiltonian parameters must be finite");
  }
  const SectorBasis basis(n);
  const SymTridiagonal h = as_sym(hamiltonian_tridiagonal(n, params));
  const LowestPairs low = tridiagonal_lowest(h, 2);

  GroundStateResult res;
  res.energy = low.values[0];
  res.gap = low.values.size() > 1 ? low.values[1] - low.values[0] : std::numeric_limits<double>::infinity();
  const double hnorm = h.norm_inf();
  res.degenerate = low.values.size() > 1 && res.gap < 1e-12 * hnorm;

  Eigen::VectorXd v = low.vectors[0];
  if (res.degenerate) {
    // Jx restricted to the lowest two-dimensional eigenspace.
    std::vector<double> zero(basis.dim(), 0.0);
    std::vector<double> half_ladder = basis.ladder_coefficients();
    for (double& l : half_ladder) l *= 0.5;
    const Eigen::VectorXd& v0 = low.vectors[0];
    const Eigen::VectorXd& v1 = low.vectors[1];
    const Eigen::VectorXd jx0 = tridiag_apply(zero, half_ladder, v0);
    const Eigen::VectorXd jx1 = tridiag_apply(zero, half_ladder, v1);
    Eigen::Matrix2d a;
    a << v0.dot(jx0), v0.dot(jx1), v1.dot(jx0), v1.dot(jx1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    const Eigen::Vector2d top = es.eigenvectors().col(1);
    v = top(0) * v0 + top(1) * v1;
    v.normalize();
  }
  res.state = frame_fix({n, v.cast<cplx>()});
  return res;
}

SectorState ground_state(int n, const HamiltonianParams& params) { return solve_ground_state(n, params).state; }

namespace {

struct PqsRun {
  SectorState state;
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
  int iterations = 0;
};

// Self-consistent descent: with a = (x, y) the current mean, the lowest
// eigenvector of Jx^2 + Jy^2 - 2x Jx - 2y Jy never increases
// Var(Jx) + Var(Jy), since <M> + |a|^2 = f + |<J> - a|^2.
PqsRun self_consistent(SectorState start, double tol, int max_iters) {
  const int n = start.n;
  const SectorBasis basis(n);
  const double casimir = 0.25 * n * (n + 2.0);
  HermTridiagonal m;
  m.diag.resize(basis.dim());
  for (std::size_t k = 0; k < basis.dim(); ++k) m.diag[k] = casimir - basis.m(k) * basis.m(k);
  m.off.resize(basis.dim() - 1);
  const std::vector<double> ladder = basis.ladder_coefficients();

  PqsRun run;
  run.state = std::move(start);
  SpinMoments mom = spin_moments(run.state);
  run.f = mom.planar_variance();
  for (int it = 1; it <= max_iters; ++it) {
    const cplx shift(mom.mean[0], -mom.mean[1]);
    for (std::size_t k = 0; k < ladder.size(); ++k) m.off[k] = -ladder[k] * shift;
    HermLowest low = hermitian_lowest(m, 1);
    SectorState next{n, std::move(low.vectors[0])};
    next.amplitudes.normalize();
    const SpinMoments next_mom = spin_moments(next);
    const double f = next_mom.planar_variance();
    run.iterations = it;
    const bool done = std::fabs(run.f - f) < tol;
    if (f <= run.f) {
      run.state = std::move(next);
      run.f = f;
      mom = next_mom;
    } else {
      // Rounding-level increase only; the exact map is monotone.
      run.converged = true;
      break;
    }
    if (done) {
      run.converged = true;
      break;
    }
  }
  return run;
}

SectorState random_start(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double azimuth = 2.0 * std::numbers::pi * unit(rng);
  const SectorBasis basis(n);
  SectorState s{n, Eigen::VectorXcd(static_cast<Eigen::Index>(basis.dim()))};
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const double mag = 0.05 + unit(rng);
    const double jitter = 0.3 * (unit(rng) - 0.5);
    s.amplitudes(static_cast<Eigen::Index>(k)) = std::polar(mag, -basis.m(k) * azimuth + jitter);
  }
  s.amplitudes.normalize();
  return s;
}

}  // namespace

OptimalPqsResult optimal_pqs_state(int n, const OptimalPqsOptions& options) {
  if (n < 1) throw std::invalid_argument("optimal PQS requires n >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("optimal PQS tolerance must be positive");
  if (options.max_iters < 1) throw std::invalid_argument("optimal PQS needs max_iters >= 1");

  PqsRun best = self_consistent(gaussian_pqs_state(n, {default_pqs_sigma(n), 0.0}), options.tol, options.max_iters);
  std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(n));
  for (int r = 0; r < options.restarts; ++r) {
    PqsRun run = self_consistent(random_start(n, rng), options.tol, options.max_iters);
    if (run.f < best.f - options.tol) best = std::move(run);
  }

  OptimalPqsResult out;
  out.state = frame_fix(best.state);
  out.cj = best.f;
  out.converged = best.converged;
  out.iterations = best.iterations;
  return out;
}

OptimalPqsResult optimal_pqs_state(int n, double tol, int max_iters) {
  OptimalPqsOptions opt;
  opt.tol = tol;
  opt.max_iters = max_iters;
  return optimal_pqs_state(n, opt);
}

}  // namespace pqslab
