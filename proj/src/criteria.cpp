#include "pqslab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pqslab {

namespace {

double require_mean_x(const NormalizedMoments& m) {
  const double x = std::fabs(m.mean_t[0]);
  if (!(x > 0.0)) throw UndefinedCriterion("mean normalized spin <J~x> is zero");
  return x;
}

double nonneg(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

double e_hz(const NormalizedMoments& m) {
  if (!(m.mean_n > 0.0)) throw UndefinedCriterion("E_HZ needs <N> > 0");
  return (m.var(0) + m.var(1)) / (0.5 * m.mean_n);
}

double e_ph(const NormalizedMoments& m) {
  if (!(m.mean_n_plus > 0.0)) throw UndefinedCriterion("E_ph needs <N+> > 0 (all-vacuum ensemble)");
  return (m.var_t(0) + m.var_t(1)) / (0.5 * m.mean_n_plus);
}

SqueezingPair xi_s(const NormalizedMoments& m) {
  if (!m.fixed_n) throw FixedNOnly("spin squeezing xi_S is only defined for a fixed particle number");
  const double x = std::fabs(m.mean[0]);
  if (!(x > 0.0)) throw UndefinedCriterion("mean spin <Jx> is zero");
  const double root_n = std::sqrt(static_cast<double>(*m.fixed_n));
  return {root_n * std::sqrt(nonneg(m.var(1))) / x, root_n * std::sqrt(nonneg(m.var(2))) / x};
}

SqueezingPair xi_s(const NormalizedMoments& m, int fixed_n) {
  if (!m.fixed_n || *m.fixed_n != fixed_n) {
    throw FixedNOnly("ensemble is not confined to sector n = " + std::to_string(fixed_n));
  }
  return xi_s(m);
}

SqueezingPair xi_s_ph(const NormalizedMoments& m) {
  const double x = require_mean_x(m);
  const double root_n = std::sqrt(m.mean_n);
  return {root_n * std::sqrt(nonneg(m.var_t(1))) / x, root_n * std::sqrt(nonneg(m.var_t(2))) / x};
}

double eta_ph(const NormalizedMoments& m) {
  const double x = require_mean_x(m);
  return std::sqrt(nonneg(m.mean_n * m.mean_n_plus * e_ph(m) / 2.0)) / x;
}

double delta_phi(const NormalizedMoments& m, double offset, bool exact_covariance) {
  const double x = require_mean_x(m);
  const double s = std::sin(offset);
  const double c = std::cos(offset);
  if (std::fabs(s) < 1e-12) return std::numeric_limits<double>::infinity();
  double num = 0.0;
  if (exact_covariance) {
    num = (c * c * m.var_t(0) + s * s * m.var_t(1) + 2.0 * s * c * m.cov_t(0, 1)) / (s * s);
  } else {
    const double cot = c / s;
    num = m.var_t(0) * cot * cot + m.var_t(1);
  }
  return std::sqrt(nonneg(num)) / x;
}

PhaseNoiseCurve delta_phi_curve(const NormalizedMoments& m, const std::vector<double>& offsets,
                                bool exact_covariance) {
  PhaseNoiseCurve curve;
  for (double off : offsets) {
    PhaseNoisePoint p;
    p.offset = off;
    p.delta_phi = delta_phi(m, off, exact_covariance);
    p.divergent = std::isinf(p.delta_phi);
    curve.points.push_back(p);
  }
  curve.worst_case = std::max(delta_phi(m, 0.25 * std::numbers::pi, exact_covariance),
                              delta_phi(m, 0.75 * std::numbers::pi, exact_covariance));
  return curve;
}

double cj_asymptote(double j) {
  if (!(j > 0.0)) throw std::invalid_argument("cj_asymptote needs J > 0");
  return 3.0 * std::pow(2.0 * j, 2.0 / 3.0) / 8.0;
}

double sql_limit(double mean_n) {
  if (!(mean_n > 0.0)) throw UndefinedCriterion("SQL needs <N> > 0");
  return 1.0 / std::sqrt(mean_n);
}

double heisenberg_limit(double mean_n) {
  if (!(mean_n > 0.0)) throw UndefinedCriterion("Heisenberg limit needs <N> > 0");
  return 1.0 / mean_n;
}

CriterionReport evaluate_criteria(const NormalizedMoments& m) {
  CriterionReport r;
  try {
    r.e_hz = e_hz(m);
  } catch (const UndefinedCriterion&) {
  }
  try {
    r.e_ph = e_ph(m);
  } catch (const UndefinedCriterion&) {
  }
  try {
    const SqueezingPair xi = xi_s(m);
    r.xi_s_y = xi.y;
    r.xi_s_z = xi.z;
  } catch (const std::domain_error&) {
  }
  try {
    const SqueezingPair xi = xi_s_ph(m);
    r.xi_s_ph_y = xi.y;
    r.xi_s_ph_z = xi.z;
    r.eta_ph = eta_ph(m);
  } catch (const UndefinedCriterion&) {
  }
  return r;
}

}  // namespace pqslab
