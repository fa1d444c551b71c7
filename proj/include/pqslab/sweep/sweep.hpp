#pragma once

// Parameter sweeps behind the command-line tool.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqslab/criteria.hpp"
#include "pqslab/ensemble.hpp"
#include "pqslab/measurement.hpp"
#include "pqslab/sweep/config.hpp"
#include "pqslab/sweep/output.hpp"

namespace pqslab::sweep {

/// A solver did not converge; maps to exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StateKind { Ground, PqsOptimal, PqsGaussian, Phase, Coherent };
enum class NumberModel { Fixed, Poisson };

std::string to_string(StateKind k);
std::string to_string(NumberModel m);

struct StateSpec {
  StateKind kind = StateKind::Ground;
  NumberModel number_model = NumberModel::Poisson;
  int n = 100;
  double mean_n = 100.0;
  double tail_mass = 1e-12;
  double kappa = 1.0;
  double theta = 0.0;                  // phase / Gaussian PQS offset
  std::optional<double> sigma_m;       // Gaussian PQS; default (J^2/2)^{2/3}
  double polar = 1.5707963267948966;   // coherent: intensity split
  double rel_phase = 0.0;              // coherent azimuth
  double pqs_tol = 1e-13;
  int pqs_max_iters = 20000;
  std::string mz = "auto";             // auto: repulsive ground states only
  std::optional<double> mz_phase;      // fixed input phase instead of optimizing
};

struct SweepSpec {
  StateSpec state;
  std::vector<double> g_over_kappa;  // signed g/kappa grid (ground states)
  std::string grid_description;
  std::vector<double> offsets;       // delta phi offsets, radians
  bool exact_covariance = false;
};

/// Keys: state, number_model, n, mean_n, tail_mass, kappa, theta, sigma_m,
/// polar, rel_phase, pqs_tol, pqs_max_iters, mz, mz_phase.
StateSpec read_state_spec(Config& cfg);

/// StateSpec keys plus g_over_kappa (list) or g_branch, g_min, g_max,
/// g_points_per_decade; offsets_over_pi; exact_covariance.
SweepSpec read_sweep_spec(Config& cfg);

/// |g/kappa| log grid from g_min to g_max (inclusive) with the given density,
/// signed by branch ("attractive", "repulsive" or "both").
std::vector<double> log_grid(double g_min, double g_max, int points_per_decade, const std::string& branch);

NumberDistribution number_distribution(const StateSpec& spec);

/// Ensemble before any interferometer preparation.
Ensemble build_ensemble(const StateSpec& spec, double g_over_kappa);

bool wants_mz(const StateSpec& spec, double g_over_kappa);

struct PointResult {
  double g_over_kappa = 0.0;
  NormalizedMoments moments;
  CriterionReport report;
  bool mz_applied = false;
  double mz_alpha = 0.0;
  std::optional<PhaseNoiseCurve> curve;
};

/// Moments after the optional preparation (applied at moment level).
PointResult evaluate_point(const StateSpec& spec, double g_over_kappa, const std::vector<double>& offsets = {},
                           bool exact_covariance = false);

/// Ensemble after the optional preparation (state level, for sampling).
Ensemble prepared_ensemble(const StateSpec& spec, double g_over_kappa, bool* mz_applied = nullptr,
                           double* mz_alpha = nullptr);

Table criteria_table(const SweepSpec& spec);
Json sweep_metadata(const SweepSpec& spec);

struct EstimateSpec {
  StateSpec state;
  double g_over_kappa = 0.0;
  std::vector<double> offsets;
  RmsScanOptions scan;
};

/// StateSpec keys plus g_over_kappa (single), offsets_over_pi, shots,
/// trials, theta_ref. The seed comes from the command line.
EstimateSpec read_estimate_spec(Config& cfg, std::uint64_t seed);
Json run_estimate(const EstimateSpec& spec);
Table estimate_table(const Json& report);

/// Amplitudes and moments of one sector state (fixed n).
Json state_report(const StateSpec& spec, double g_over_kappa);
Table state_table(const Json& report);

}  // namespace pqslab::sweep
