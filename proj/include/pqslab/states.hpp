#pragma once

// Pure states inside one fixed-n sector.

#include <cstdint>

#include <Eigen/Dense>

#include "pqslab/sector.hpp"

namespace pqslab {

struct SectorState {
  int n = 0;
  Eigen::VectorXcd amplitudes;  // index k <-> m = k - n/2

  double norm_defect() const { return std::abs(amplitudes.squaredNorm() - 1.0); }
};

/// First moments <J> and symmetrized second moments <(J_i J_j + J_j J_i)/2>.
struct SpinMoments {
  int n = 0;
  Vec3 mean{};
  Mat3 second{};

  double variance(int axis) const { return second[axis][axis] - mean[axis] * mean[axis]; }
  double covariance(int a, int b) const { return second[a][b] - mean[a] * mean[b]; }
  /// Var(Jx) + Var(Jy).
  double planar_variance() const { return variance(0) + variance(1); }
};

SpinMoments spin_moments(const SectorState& state);

/// Relative-phase eigenstate sum_m e^{i m theta} |J,m> / sqrt(n+1).
SectorState phase_eigenstate(int n, double theta);

struct PqsSpec {
  double sigma_m = 1.0;  // variance of |c_m|^2 in m before truncation
  double theta = 0.0;
};

/// (J^2/2)^{2/3}, the asymptotically optimal envelope variance.
double default_pqs_sigma(int n);

/// |c_m|^2 proportional to exp(-m^2 / (2 sigma_m)), phases e^{i m theta},
/// truncated to |m| <= J and renormalized. Throws unless sigma_m > 0.
SectorState gaussian_pqs_state(int n, const PqsSpec& spec);

struct OptimalPqsOptions {
  double tol = 1e-13;
  int max_iters = 20000;
  int restarts = 5;
  std::uint64_t seed = 20240917;
};

struct OptimalPqsResult {
  SectorState state;
  double cj = 0.0;  // achieved min of Var(Jx) + Var(Jy)
  bool converged = false;
  int iterations = 0;  // of the best run
};

/// Minimizes Var(Jx) + Var(Jy) over sector n >= 1 by self-consistent
/// iteration from the Gaussian warm start and seeded random restarts.
/// The result is frame fixed (<Jx> >= 0, <Jy> = 0).
OptimalPqsResult optimal_pqs_state(int n, const OptimalPqsOptions& options = {});
OptimalPqsResult optimal_pqs_state(int n, double tol, int max_iters);

/// Var(Jx) + Var(Jy) of a state.
double planar_variance(const SectorState& state);

/// SU(2) coherent state along (sin t cos p, sin t sin p, cos t).
SectorState su2_coherent(int n, double polar, double azimuth);

/// Maximal-Jx eigenstate: binomial amplitudes sqrt(C(n, J+m)) / 2^{n/2}.
SectorState su2_coherent_x(int n);

struct GroundStateResult {
  SectorState state;
  double energy = 0.0;
  double gap = 0.0;
  bool degenerate = false;
};

/// Lowest eigenvector of the two-well Hamiltonian, frame fixed.
/// A degenerate lowest level (gap < 1e-12 ||H||) is flagged and resolved by
/// taking the vector of the lowest two-dimensional eigenspace with the
/// largest <Jx>.
GroundStateResult solve_ground_state(int n, const HamiltonianParams& params);
SectorState ground_state(int n, const HamiltonianParams& params);

/// exp(-i angle Jz) |psi>: c_m -> e^{-i m angle} c_m.
SectorState rotate_z(const SectorState& state, double angle);

/// Rotates about z so that <Jx> >= 0 and <Jy> = 0. States with vanishing
/// transverse mean are returned unchanged.
SectorState frame_fix(const SectorState& state);

SectorState apply_unitary(const Eigen::MatrixXcd& unitary, const SectorState& state);

/// Input phase shift exp(-i alpha Jz) followed by the Mach-Zehnder input
/// beamsplitter.
SectorState mz_prepare(const SectorState& state, double alpha);

/// Hermitian expectation <psi| A |psi> (real part).
double expectation(const Eigen::MatrixXcd& op, const SectorState& state);

}  // namespace pqslab
