#pragma once

// Entanglement and phase-sensitivity figures of merit computed from
// ensemble moments.

#include <optional>
#include <stdexcept>
#include <vector>

#include "pqslab/ensemble.hpp"

namespace pqslab {

/// The quantity's denominator vanishes for this ensemble.
class UndefinedCriterion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An unnormalized quantity requested for a fluctuating-number ensemble.
class FixedNOnly : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (Var Jx + Var Jy) / (<N>/2) with raw variances.
double e_hz(const NormalizedMoments& m);

/// (Var J~x + Var J~y) / (<N+>/2).
double e_ph(const NormalizedMoments& m);

struct SqueezingPair {
  double y = 0.0;
  double z = 0.0;
};

/// sqrt(n) dJ^{Y,Z} / |<Jx>|; only for ensembles with a single n.
SqueezingPair xi_s(const NormalizedMoments& m);
/// As above, also checking that the ensemble sits in sector fixed_n.
SqueezingPair xi_s(const NormalizedMoments& m, int fixed_n);

/// sqrt(<N>) dJ~^{Y,Z} / |<J~x>|.
SqueezingPair xi_s_ph(const NormalizedMoments& m);

/// sqrt(<N> <N+> E_ph / 2) / |<J~x>|.
double eta_ph(const NormalizedMoments& m);

struct PhaseNoisePoint {
  double offset = 0.0;       // phi - theta'
  double delta_phi = 0.0;    // +inf when divergent
  bool divergent = false;    // offset at 0 or pi (mod pi)
};

struct PhaseNoiseCurve {
  std::vector<PhaseNoisePoint> points;
  double worst_case = 0.0;  // max over offsets pi/4 and 3pi/4
};

/// Delta phi^2 = (Var J~x cot^2 + Var J~y) / <J~x>^2, or with
/// exact_covariance the full Var(J~^phi) / (sin^2 <J~x>^2).
PhaseNoiseCurve delta_phi_curve(const NormalizedMoments& m, const std::vector<double>& offsets,
                                bool exact_covariance = false);
double delta_phi(const NormalizedMoments& m, double offset, bool exact_covariance = false);

/// 3 (2J)^{2/3} / 8.
double cj_asymptote(double j);

/// 1/sqrt(<N>) and 1/<N>.
double sql_limit(double mean_n);
double heisenberg_limit(double mean_n);

struct CriterionReport {
  std::optional<double> e_hz;
  std::optional<double> e_ph;
  std::optional<double> xi_s_y;
  std::optional<double> xi_s_z;
  std::optional<double> xi_s_ph_y;
  std::optional<double> xi_s_ph_z;
  std::optional<double> eta_ph;

  bool entangled_modes() const { return e_ph && *e_ph < 1.0; }
  bool entangled_particles() const {
    return (xi_s_ph_y && *xi_s_ph_y < 1.0) || (xi_s_ph_z && *xi_s_ph_z < 1.0);
  }
  bool subshot_all_angles() const { return eta_ph && *eta_ph < 1.0; }
};

/// Every criterion that is defined for the moments; undefined ones stay empty.
CriterionReport evaluate_criteria(const NormalizedMoments& m);

}  // namespace pqslab
