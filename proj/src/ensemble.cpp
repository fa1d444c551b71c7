#include "pqslab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pqslab/parallel.hpp"

namespace pqslab {

namespace {

constexpr double kWeightTolerance = 1e-9;

Vec3 mat_vec(const Mat3& r, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
  return out;
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat3 congruence(const Mat3& r, const Mat3& s) {
  Mat3 rt{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rt[i][j] = r[j][i];
  return mat_mul(mat_mul(r, s), rt);
}

double poisson_pmf(int n, double mean) {
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

}  // namespace

NumberDistribution::NumberDistribution(std::vector<Entry> support) : support_(std::move(support)) {
  if (support_.empty()) throw std::invalid_argument("number distribution has empty support");
  std::sort(support_.begin(), support_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto [n, p] = support_[i];
    if (n < 0) throw std::invalid_argument("number distribution has negative n = " + std::to_string(n));
    if (i > 0 && support_[i - 1].first == n) {
      throw std::invalid_argument("number distribution repeats n = " + std::to_string(n));
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("number distribution has invalid P at n = " + std::to_string(n));
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("number distribution sums to " + std::to_string(total) + ", not 1");
  }
}

NumberDistribution NumberDistribution::delta(int n) { return NumberDistribution({{n, 1.0}}); }

double NumberDistribution::mean() const {
  double m = 0.0;
  for (const auto& [n, p] : support_) m += p * n;
  return m;
}

double NumberDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& [n, p] : support_) v += p * (n - m) * (n - m);
  return v;
}

NumberDistribution poisson_distribution(double mean, double tail_mass) {
  if (!(mean > 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be positive");
  if (!(tail_mass > 0.0) || tail_mass > 1e-6) throw std::invalid_argument("Poisson tail mass must lie in (0, 1e-6]");

  // The pmf is unimodal, so growing the window toward the larger neighbour
  // gives the smallest contiguous window for a given covered mass.
  const int mode = static_cast<int>(std::floor(mean));
  int lo = mode;
  int hi = mode;
  double covered = poisson_pmf(mode, mean);
  double p_lo = lo > 0 ? poisson_pmf(lo - 1, mean) : 0.0;
  double p_hi = poisson_pmf(hi + 1, mean);
  while (1.0 - covered > tail_mass) {
    if (lo > 0 && p_lo >= p_hi) {
      covered += p_lo;
      --lo;
      p_lo = lo > 0 ? poisson_pmf(lo - 1, mean) : 0.0;
    } else {
      covered += p_hi;
      ++hi;
      p_hi = poisson_pmf(hi + 1, mean);
    }
    if (p_lo == 0.0 && p_hi == 0.0) break;
  }

  std::vector<NumberDistribution::Entry> support;
  double total = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const double p = poisson_pmf(n, mean);
    support.emplace_back(n, p);
    total += p;
  }
  for (auto& e : support) e.second /= total;
  return NumberDistribution(std::move(support));
}

void Ensemble::validate() const {
  if (members.empty()) throw std::invalid_argument("ensemble has no members");
  double total = 0.0;
  for (const auto& m : members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw std::invalid_argument("ensemble member in sector " + std::to_string(m.state.n) + " has invalid weight");
    }
    if (m.state.amplitudes.size() != m.state.n + 1) {
      throw std::invalid_argument("state dimension does not match sector " + std::to_string(m.state.n));
    }
    if (m.state.norm_defect() > 1e-10) {
      throw std::invalid_argument("state in sector " + std::to_string(m.state.n) + " is not normalized");
    }
    total += m.weight;
  }
  if (std::fabs(total - 1.0) > kWeightTolerance) {
    throw std::invalid_argument("ensemble weights sum to " + std::to_string(total) + ", not 1");
  }
}

std::optional<int> Ensemble::fixed_n() const {
  if (members.empty()) return std::nullopt;
  const int n = members.front().state.n;
  for (const auto& m : members) {
    if (m.state.n != n) return std::nullopt;
  }
  return n;
}

SectorError::SectorError(int n, const std::string& what)
    : std::runtime_error("sector n = " + std::to_string(n) + ": " + what), n_(n) {}

Ensemble attach(const StateFactory& factory, const NumberDistribution& dist) {
  const auto& support = dist.support();
  Ensemble ens;
  ens.members.resize(support.size());
  parallel_for(support.size(), [&](std::size_t i) {
    const auto [n, p] = support[i];
    try {
      SectorState s = factory(n);
      if (s.n != n || s.amplitudes.size() != n + 1) throw std::runtime_error("factory returned a state of the wrong sector");
      ens.members[i] = {p, std::move(s)};
    } catch (const SectorError&) {
      throw;
    } catch (const std::exception& e) {
      throw SectorError(n, e.what());
    }
  });
  return ens;
}

Ensemble coherent_product_ensemble(double alpha_sq, double beta_sq, double rel_phase, double tail_mass) {
  if (!(alpha_sq >= 0.0) || !(beta_sq >= 0.0) || alpha_sq + beta_sq <= 0.0) {
    throw std::invalid_argument("coherent amplitudes must be non-negative and not both zero");
  }
  const double polar = 2.0 * std::atan2(std::sqrt(beta_sq), std::sqrt(alpha_sq));
  const NumberDistribution dist = poisson_distribution(alpha_sq + beta_sq, tail_mass);
  return attach([&](int n) { return su2_coherent(n, polar, rel_phase); }, dist);
}

MomentEnsemble member_moments(const Ensemble& ens) {
  MomentEnsemble out(ens.members.size());
  parallel_for(ens.members.size(), [&](std::size_t i) {
    out[i] = {ens.members[i].weight, spin_moments(ens.members[i].state)};
  });
  return out;
}

MomentEnsemble rotate(const MomentEnsemble& ens, const Mat3& r) {
  MomentEnsemble out = ens;
  for (auto& m : out) {
    m.moments.mean = mat_vec(r, m.moments.mean);
    m.moments.second = congruence(r, m.moments.second);
  }
  return out;
}

NormalizedMoments summarize(const MomentEnsemble& ens) {
  std::vector<std::size_t> order(ens.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ens[a].moments.n < ens[b].moments.n; });

  NormalizedMoments out;
  bool same_n = !ens.empty();
  for (std::size_t idx : order) {
    const MomentMember& mm = ens[idx];
    const SpinMoments& s = mm.moments;
    const double w = mm.weight;
    const double np = generalized_inverse_scalar(s.n);
    for (int i = 0; i < 3; ++i) {
      out.mean_t[i] += w * np * s.mean[i];
      out.mean[i] += w * s.mean[i];
      out.conditional_var_t[i] += w * np * np * s.variance(i);
      for (int j = 0; j < 3; ++j) {
        out.second_t[i][j] += w * np * np * s.second[i][j];
        out.second[i][j] += w * s.second[i][j];
      }
    }
    out.mean_n += w * s.n;
    out.mean_n_plus += w * np;
    if (s.n > 0) out.nonvacuum_weight += w;
    if (s.n != ens.front().moments.n) same_n = false;
  }
  if (same_n) out.fixed_n = ens.front().moments.n;
  return out;
}

NormalizedMoments moments(const Ensemble& ens) { return summarize(member_moments(ens)); }

double normalized_expectation(const Ensemble& ens, SpinComponent op, double angle) {
  double total = 0.0;
  for (const auto& m : ens.members) {
    const SpinMoments s = spin_moments(m.state);
    double value = 0.0;
    switch (op) {
      case SpinComponent::X: value = s.mean[0]; break;
      case SpinComponent::Y: value = s.mean[1]; break;
      case SpinComponent::Z: value = s.mean[2]; break;
      case SpinComponent::Phi: value = std::cos(angle) * s.mean[0] + std::sin(angle) * s.mean[1]; break;
    }
    total += m.weight * value * generalized_inverse_scalar(m.state.n);
  }
  return total;
}

double frame_angle(const NormalizedMoments& m) {
  const double x = m.mean_t[0];
  const double y = m.mean_t[1];
  if (std::hypot(x, y) <= 1e-14) return 0.0;
  return std::atan2(y, x);
}

Ensemble frame_fix(const Ensemble& ens) {
  const double beta = frame_angle(moments(ens));
  if (beta == 0.0) return ens;
  Ensemble out = ens;
  for (auto& m : out.members) m.state = rotate_z(m.state, -beta);
  return out;
}

MomentEnsemble frame_fix(const MomentEnsemble& ens) {
  const double beta = frame_angle(summarize(ens));
  if (beta == 0.0) return ens;
  return rotate(ens, rotation_z(-beta));
}

Mat3 mz_prepare_rotation(double alpha) { return mat_mul(mz_rotation_matrix(), rotation_z(alpha)); }

double optimal_mz_phase(const MomentEnsemble& ens) {
  const Vec3 mean = summarize(ens).mean_t;
  auto objective = [&](double alpha) {
    const Vec3 v = mat_vec(mz_prepare_rotation(alpha), mean);
    return std::hypot(v[0], v[1]);
  };

  constexpr int kGrid = 181;
  const double lo = -0.5 * std::numbers::pi;
  const double step = std::numbers::pi / (kGrid - 1);
  int best = 0;
  double best_value = objective(lo);
  for (int i = 1; i < kGrid; ++i) {
    const double v = objective(lo + i * step);
    if (v > best_value + 1e-15) {
      best_value = v;
      best = i;
    }
  }

  // Golden-section refinement on the bracketing cell pair.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo + (best - 1) * step;
  double b = lo + (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 80 && b - a > 1e-12; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double refined = 0.5 * (a + b);
  return objective(refined) >= best_value ? refined : lo + best * step;
}

MzPrepared mz_prepare(const Ensemble& ens, std::optional<double> alpha) {
  MzPrepared out;
  out.alpha = alpha ? *alpha : optimal_mz_phase(member_moments(ens));
  Ensemble rotated;
  rotated.members.resize(ens.members.size());
  parallel_for(ens.members.size(), [&](std::size_t i) {
    rotated.members[i] = {ens.members[i].weight, mz_prepare(ens.members[i].state, out.alpha)};
  });
  out.frame_beta = frame_angle(moments(rotated));
  out.ensemble = frame_fix(rotated);
  return out;
}

MzPreparedMoments mz_prepare(const MomentEnsemble& ens, std::optional<double> alpha) {
  MzPreparedMoments out;
  out.alpha = alpha ? *alpha : optimal_mz_phase(ens);
  const MomentEnsemble rotated = rotate(ens, mz_prepare_rotation(out.alpha));
  out.frame_beta = frame_angle(summarize(rotated));
  out.ensemble = frame_fix(rotated);
  return out;
}

}  // namespace pqslab
