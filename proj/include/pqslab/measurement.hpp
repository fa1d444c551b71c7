#pragma once

// Single-shot interferometer counting and the two-setting phase estimator.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "pqslab/ensemble.hpp"

namespace pqslab {

struct MeasurementSetting {
  double phi = 0.0;    // unknown phase
  double theta = 0.0;  // reference phase

  /// phi - theta reduced to (-pi, pi].
  double offset() const;
};

struct ShotRecord {
  int n_plus = 0;
  int n_minus = 0;

  int n() const { return n_plus + n_minus; }
  /// 2m = n_plus - n_minus (exact).
  int twice_m() const { return n_plus - n_minus; }
  double m() const { return 0.5 * twice_m(); }
};

struct Outcome {
  int n = 0;
  int twice_m = 0;
  double prob = 0.0;
};

/// Joint (N, J^{phi-theta}) outcome probabilities, ordered by member then
/// ascending m.
std::vector<Outcome> outcome_distribution(const Ensemble& ens, const MeasurementSetting& setting);

/// Inverse-CDF sampler over a fixed outcome list.
class OutcomeSampler {
 public:
  explicit OutcomeSampler(std::vector<Outcome> outcomes);

  std::size_t draw(std::mt19937_64& rng) const;
  const Outcome& outcome(std::size_t i) const { return outcomes_[i]; }
  /// m n+ of outcome i.
  double normalized_value(std::size_t i) const { return values_[i]; }

 private:
  std::vector<Outcome> outcomes_;
  std::vector<double> cdf_;
  std::vector<double> values_;
};

/// uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng);

/// Seed for an independent stream keyed by (seed, a, b, c).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

std::vector<ShotRecord> sample_shots(const Ensemble& ens, const MeasurementSetting& setting, int shots,
                                     std::uint64_t seed);

/// Mean over shots of m n+ (vacuum shots contribute 0).
double ratio_estimate(const std::vector<ShotRecord>& records);

class UndeterminedPhase : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct EstimationResult {
  double r0 = 0.0;  // reading at reference theta'
  double r1 = 0.0;  // reading of the orthogonal setting
  double phi_hat = 0.0;     // quiet-reading estimate
  double phi_hat_ls = 0.0;  // theta' + atan2(-r1, r0)
  int chosen_setting = 0;   // 0: theta', 1: orthogonal setting
  int shots_used = 0;
};

/// Readings follow r0 = cos(phi - theta') c, r1 = -sin(phi - theta') c.
/// The least-squares estimate locates the phase; the setting lying in a
/// quiet quadrant (|sin| >= |cos| selects setting 0) is then inverted
/// alone for phi_hat. Throws UndeterminedPhase for r0 = r1 = 0.
EstimationResult estimate_phase(double r0, double r1, double calibration, double theta_ref = 0.0);

/// Reference phase at which the orthogonal reading is taken; its mean is
/// -sin(phi - theta') c.
double orthogonal_reference(double theta_ref);

struct RmsRow {
  double offset = 0.0;          // true phi - theta'
  double rms = 0.0;             // raw RMS of phi_hat - phi
  double rms_normalized = 0.0;  // rms * sqrt(shots per setting)
  double rms_ls_normalized = 0.0;
  double bias = 0.0;                 // mean of phi_hat - phi
  double quiet_fraction_setting0 = 0.0;
  double analytic = 0.0;  // delta phi of the quiet setting for one shot
};

struct RmsScanOptions {
  int shots_per_setting = 10000;
  int trials = 200;
  std::uint64_t seed = 12345;
  double theta_ref = 0.0;
};

/// RMS estimator error for each true offset. Trial streams are keyed by
/// (seed, offset index, trial, setting), so results do not depend on the
/// thread count. The ensemble is expected frame fixed.
std::vector<RmsRow> rms_error_scan(const Ensemble& ens, const std::vector<double>& offsets,
                                   const RmsScanOptions& options);

}  // namespace pqslab
