#pragma once

// Number-fluctuating ensembles: block-diagonal mixtures of fixed-n pure
// states, and their moments of the number-normalized spin J~ = J N+.

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pqslab/states.hpp"

namespace pqslab {

class NumberDistribution {
 public:
  using Entry = std::pair<int, double>;  // (n, P_n)

  /// Validates: n >= 0 and distinct, P_n >= 0, sum within 1e-9 of 1.
  /// Entries are stored sorted by n.
  explicit NumberDistribution(std::vector<Entry> support);

  static NumberDistribution delta(int n);

  const std::vector<Entry>& support() const { return support_; }
  bool is_delta() const { return support_.size() == 1; }
  double mean() const;
  double variance() const;

 private:
  std::vector<Entry> support_;
};

/// Poisson pmf truncated to the smallest window around the mode whose
/// omitted mass is <= tail_mass, renormalized. Requires mean > 0 and
/// 0 < tail_mass <= 1e-6.
NumberDistribution poisson_distribution(double mean, double tail_mass = 1e-12);

struct EnsembleMember {
  double weight = 0.0;
  SectorState state;
};

struct Ensemble {
  std::vector<EnsembleMember> members;

  /// Throws std::invalid_argument on negative weights, weights not summing
  /// to 1 within 1e-9, or states off unit norm by more than 1e-10.
  void validate() const;
  /// Common n when every member shares it.
  std::optional<int> fixed_n() const;
};

/// Raised by attach; carries the sector that failed.
class SectorError : public std::runtime_error {
 public:
  SectorError(int n, const std::string& what);
  int n() const { return n_; }

 private:
  int n_;
};

using StateFactory = std::function<SectorState(int)>;

/// One member per support point. The factory may be called concurrently.
Ensemble attach(const StateFactory& factory, const NumberDistribution& dist);

/// |alpha>|beta> reduced to its number-diagonal part: Poisson weights with
/// mean alpha_sq + beta_sq and per-sector SU(2) coherent states.
Ensemble coherent_product_ensemble(double alpha_sq, double beta_sq, double rel_phase, double tail_mass = 1e-12);

/// Per-member spin moments with weights; rotations act exactly on them.
struct MomentMember {
  double weight = 0.0;
  SpinMoments moments;
};
using MomentEnsemble = std::vector<MomentMember>;

MomentEnsemble member_moments(const Ensemble& ens);

/// mean -> R mean, second -> R second R^T for every member.
MomentEnsemble rotate(const MomentEnsemble& ens, const Mat3& r);

struct NormalizedMoments {
  Vec3 mean_t{};    // <J~_i>
  Mat3 second_t{};  // <(J~_i J~_j + J~_j J~_i)/2>
  Vec3 mean{};      // raw <J_i>
  Mat3 second{};    // raw symmetrized second moments
  Vec3 conditional_var_t{};  // sum_n P_n (n+)^2 Var_n(J_i)
  double mean_n = 0.0;
  double mean_n_plus = 0.0;
  double nonvacuum_weight = 0.0;
  std::optional<int> fixed_n;

  double var_t(int axis) const { return second_t[axis][axis] - mean_t[axis] * mean_t[axis]; }
  double cov_t(int a, int b) const { return second_t[a][b] - mean_t[a] * mean_t[b]; }
  double var(int axis) const { return second[axis][axis] - mean[axis] * mean[axis]; }

  double mean_jx_t() const { return mean_t[0]; }
  double mean_jy_t() const { return mean_t[1]; }
  double mean_jz_t() const { return mean_t[2]; }
  double var_jx_t() const { return var_t(0); }
  double var_jy_t() const { return var_t(1); }
  double var_jz_t() const { return var_t(2); }
  double cov_jxjy_t() const { return cov_t(0, 1); }
  double mean_jx() const { return mean[0]; }
  double var_jx() const { return var(0); }
  double var_jy() const { return var(1); }
  double var_jz() const { return var(2); }
};

/// Reduction runs in ascending (n, member index) order.
NormalizedMoments summarize(const MomentEnsemble& ens);
NormalizedMoments moments(const Ensemble& ens);

enum class SpinComponent { X, Y, Z, Phi };

/// sum_members weight <O> n+ for O = Jx, Jy, Jz or cos(a) Jx + sin(a) Jy.
double normalized_expectation(const Ensemble& ens, SpinComponent op, double angle = 0.0);

/// z-rotation angle beta with R_z(-beta) bringing the normalized mean onto
/// +x; 0 when the transverse mean vanishes.
double frame_angle(const NormalizedMoments& m);

/// Single ensemble-wide z-rotation so that <J~x> >= 0, <J~y> = 0.
Ensemble frame_fix(const Ensemble& ens);
MomentEnsemble frame_fix(const MomentEnsemble& ens);

/// Input phase alpha maximizing the transverse normalized mean after the
/// beamsplitter: 181-point grid on [-pi/2, pi/2] plus golden-section refine.
double optimal_mz_phase(const MomentEnsemble& ens);

/// Rotation matrix of exp(-i alpha Jz) followed by the beamsplitter.
Mat3 mz_prepare_rotation(double alpha);

/// Input phase (optimized when alpha is empty), beamsplitter, frame fix.
struct MzPrepared {
  Ensemble ensemble;
  double alpha = 0.0;
  double frame_beta = 0.0;
};
MzPrepared mz_prepare(const Ensemble& ens, std::optional<double> alpha = std::nullopt);

struct MzPreparedMoments {
  MomentEnsemble ensemble;
  double alpha = 0.0;
  double frame_beta = 0.0;
};
MzPreparedMoments mz_prepare(const MomentEnsemble& ens, std::optional<double> alpha = std::nullopt);

}  // namespace pqslab
