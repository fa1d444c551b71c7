#include "pqslab/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "pqslab/criteria.hpp"
#include "pqslab/kernels.hpp"
#include "pqslab/parallel.hpp"
#include "pqslab/tridiag.hpp"

namespace pqslab {

namespace {

double wrap(double angle) { return std::remainder(angle, 2.0 * std::numbers::pi); }

// Real eigenvectors of Jx in sector n; column j has eigenvalue j - n/2.
const Eigen::MatrixXd& jx_eigenvectors(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;
  }
  const SectorBasis basis(n);
  SymTridiagonal jx;
  jx.diag.assign(basis.dim(), 0.0);
  jx.off = basis.ladder_coefficients();
  for (double& o : jx.off) o *= 0.5;
  auto vectors = std::make_unique<Eigen::MatrixXd>(tridiagonal_eigensystem(jx).vectors);
  std::lock_guard lock(mutex);
  return *cache.emplace(n, std::move(vectors)).first->second;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double MeasurementSetting::offset() const { return wrap(phi - theta); }

std::vector<Outcome> outcome_distribution(const Ensemble& ens, const MeasurementSetting& setting) {
  const double angle = setting.offset();
  std::vector<std::vector<Outcome>> per_member(ens.members.size());
  parallel_for(ens.members.size(), [&](std::size_t i) {
    const EnsembleMember& mem = ens.members[i];
    const int n = mem.state.n;
    const Eigen::MatrixXd& v = jx_eigenvectors(n);
    // <e^{-i a Jz} v_j | psi> = v_j^T e^{i a Jz} psi.
    const SectorState rotated = rotate_z(mem.state, -angle);
    std::vector<double> probs(static_cast<std::size_t>(n) + 1);
    kernels::project_abs2(v.data(), probs.size(), rotated.amplitudes.data(), probs.data());
    auto& out = per_member[i];
    out.reserve(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
      out.push_back({n, 2 * static_cast<int>(j) - n, mem.weight * probs[j]});
    }
  });
  std::vector<Outcome> all;
  for (auto& block : per_member) all.insert(all.end(), block.begin(), block.end());
  return all;
}

OutcomeSampler::OutcomeSampler(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
  if (outcomes_.empty()) throw std::invalid_argument("empty outcome distribution");
  cdf_.reserve(outcomes_.size());
  values_.reserve(outcomes_.size());
  double acc = 0.0;
  for (const Outcome& o : outcomes_) {
    acc += std::max(o.prob, 0.0);
    cdf_.push_back(acc);
    values_.push_back(o.n > 0 ? 0.5 * o.twice_m / o.n : 0.0);
  }
  if (!(acc > 0.0)) throw std::invalid_argument("outcome distribution has zero mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::size_t OutcomeSampler::draw(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return splitmix64(s ^ c);
}

std::vector<ShotRecord> sample_shots(const Ensemble& ens, const MeasurementSetting& setting, int shots,
                                     std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample_shots needs shots >= 1");
  const OutcomeSampler sampler(outcome_distribution(ens, setting));
  std::mt19937_64 rng(seed);
  std::vector<ShotRecord> records;
  records.reserve(static_cast<std::size_t>(shots));
  for (int s = 0; s < shots; ++s) {
    const Outcome& o = sampler.outcome(sampler.draw(rng));
    records.push_back({(o.n + o.twice_m) / 2, (o.n - o.twice_m) / 2});
  }
  return records;
}

double ratio_estimate(const std::vector<ShotRecord>& records) {
  if (records.empty()) throw std::invalid_argument("ratio_estimate needs at least one record");
  double sum = 0.0;
  for (const ShotRecord& r : records) {
    if (r.n() > 0) sum += r.m() / r.n();
  }
  return sum / static_cast<double>(records.size());
}

double orthogonal_reference(double theta_ref) { return theta_ref - 0.5 * std::numbers::pi; }

EstimationResult estimate_phase(double r0, double r1, double calibration, double theta_ref) {
  if (!(calibration > 0.0)) throw std::invalid_argument("calibration must be positive");
  if (r0 == 0.0 && r1 == 0.0) throw UndeterminedPhase("both readings vanish; phase undetermined");

  EstimationResult res;
  res.r0 = r0;
  res.r1 = r1;
  const double ls = std::atan2(-r1, r0);
  res.phi_hat_ls = wrap(theta_ref + ls);

  double delta = 0.0;
  if (std::fabs(std::sin(ls)) >= std::fabs(std::cos(ls))) {
    res.chosen_setting = 0;
    const double c = std::clamp(r0 / calibration, -1.0, 1.0);
    delta = std::acos(c);
    if (-r1 < 0.0) delta = -delta;
  } else {
    res.chosen_setting = 1;
    const double s = std::clamp(-r1 / calibration, -1.0, 1.0);
    delta = std::asin(s);
    if (r0 < 0.0) delta = std::numbers::pi - delta;
  }
  res.phi_hat = wrap(theta_ref + delta);
  return res;
}

std::vector<RmsRow> rms_error_scan(const Ensemble& ens, const std::vector<double>& offsets,
                                   const RmsScanOptions& options) {
  if (options.trials < 100) throw std::invalid_argument("rms_error_scan needs trials >= 100");
  if (options.shots_per_setting < 1) throw std::invalid_argument("rms_error_scan needs shots >= 1");
  const NormalizedMoments mom = moments(ens);
  const double calibration = std::hypot(mom.mean_t[0], mom.mean_t[1]);
  const double root_shots = std::sqrt(static_cast<double>(options.shots_per_setting));

  std::vector<RmsRow> rows;
  for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
    const double delta = offsets[oi];
    const double phi = options.theta_ref + delta;
    const OutcomeSampler s0(outcome_distribution(ens, {phi, options.theta_ref}));
    const OutcomeSampler s1(outcome_distribution(ens, {phi, orthogonal_reference(options.theta_ref)}));

    struct TrialResult {
      double err = 0.0;
      double err_ls = 0.0;
      int setting = 0;
    };
    std::vector<TrialResult> trials(static_cast<std::size_t>(options.trials));
    parallel_for(trials.size(), [&](std::size_t t) {
      auto reading = [&](const OutcomeSampler& s, std::uint64_t which) {
        std::mt19937_64 rng(derive_seed(options.seed, oi, t, which));
        double sum = 0.0;
        for (int k = 0; k < options.shots_per_setting; ++k) sum += s.normalized_value(s.draw(rng));
        return sum / options.shots_per_setting;
      };
      const double r0 = reading(s0, 0);
      const double r1 = reading(s1, 1);
      const EstimationResult est = estimate_phase(r0, r1, calibration, options.theta_ref);
      trials[t] = {wrap(est.phi_hat - phi), wrap(est.phi_hat_ls - phi), est.chosen_setting};
    });

    RmsRow row;
    row.offset = delta;
    double sq = 0.0;
    double sq_ls = 0.0;
    double bias = 0.0;
    int quiet0 = 0;
    for (const TrialResult& t : trials) {
      sq += t.err * t.err;
      sq_ls += t.err_ls * t.err_ls;
      bias += t.err;
      if (t.setting == 0) ++quiet0;
    }
    const double count = static_cast<double>(trials.size());
    row.rms = std::sqrt(sq / count);
    row.rms_normalized = row.rms * root_shots;
    row.rms_ls_normalized = std::sqrt(sq_ls / count) * root_shots;
    row.bias = bias / count;
    row.quiet_fraction_setting0 = quiet0 / count;
    const bool setting0_quiet = std::fabs(std::sin(delta)) >= std::fabs(std::cos(delta));
    row.analytic = setting0_quiet ? delta_phi(mom, delta) : delta_phi(mom, delta + 0.5 * std::numbers::pi);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pqslab
