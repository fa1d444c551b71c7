#include "pqslab/sweep/sweep.hpp"

#include <cmath>
#include <numbers>

#include "pqslab/kernels.hpp"
#include "pqslab/parallel.hpp"

namespace pqslab::sweep {

std::string to_string(StateKind k) {
  switch (k) {
    case StateKind::Ground: return "ground";
    case StateKind::PqsOptimal: return "pqs-optimal";
    case StateKind::PqsGaussian: return "pqs-gaussian";
    case StateKind::Phase: return "phase";
    case StateKind::Coherent: return "coherent";
  }
  return "?";
}

std::string to_string(NumberModel m) { return m == NumberModel::Fixed ? "fixed" : "poisson"; }

StateSpec read_state_spec(Config& cfg) {
  StateSpec s;
  const std::string kind = cfg.get_choice("state", "ground", {"ground", "pqs-optimal", "pqs-gaussian", "phase", "coherent"});
  if (kind == "ground") s.kind = StateKind::Ground;
  if (kind == "pqs-optimal") s.kind = StateKind::PqsOptimal;
  if (kind == "pqs-gaussian") s.kind = StateKind::PqsGaussian;
  if (kind == "phase") s.kind = StateKind::Phase;
  if (kind == "coherent") s.kind = StateKind::Coherent;
  s.number_model = cfg.get_choice("number_model", "poisson", {"fixed", "poisson"}) == "fixed" ? NumberModel::Fixed
                                                                                           : NumberModel::Poisson;
  const long long n = cfg.get_int("n", 100);
  if (n < 0 || n > 100000) cfg.fail("n", "must lie in [0, 100000]");
  s.n = static_cast<int>(n);
  s.mean_n = cfg.get_double("mean_n", 100.0);
  if (!(s.mean_n > 0.0) || s.mean_n > 100000.0) cfg.fail("mean_n", "must lie in (0, 100000]");
  s.tail_mass = cfg.get_double("tail_mass", 1e-12);
  if (!(s.tail_mass > 0.0) || s.tail_mass > 1e-6) cfg.fail("tail_mass", "must lie in (0, 1e-6]");
  s.kappa = cfg.get_double("kappa", 1.0);
  if (s.kappa == 0.0) cfg.fail("kappa", "must be non-zero");
  s.theta = cfg.get_double("theta", 0.0);
  s.sigma_m = cfg.get_double("sigma_m");
  if (s.sigma_m && !(*s.sigma_m > 0.0)) cfg.fail("sigma_m", "must be positive");
  s.polar = cfg.get_double("polar", 0.5 * std::numbers::pi);
  s.rel_phase = cfg.get_double("rel_phase", 0.0);
  s.pqs_tol = cfg.get_double("pqs_tol", 1e-13);
  if (!(s.pqs_tol > 0.0)) cfg.fail("pqs_tol", "must be positive");
  const long long iters = cfg.get_int("pqs_max_iters", 20000);
  if (iters < 1 || iters > 100000000) cfg.fail("pqs_max_iters", "must lie in [1, 1e8]");
  s.pqs_max_iters = static_cast<int>(iters);
  s.mz = cfg.get_choice("mz", "auto", {"auto", "on", "off"});
  s.mz_phase = cfg.get_double("mz_phase");
  if (s.kind == StateKind::PqsOptimal && s.number_model == NumberModel::Fixed && s.n < 1) {
    cfg.fail("n", "optimal PQS needs n >= 1");
  }
  return s;
}

std::vector<double> log_grid(double g_min, double g_max, int points_per_decade, const std::string& branch) {
  std::vector<double> magnitudes;
  const double decades = std::log10(g_max / g_min);
  const int steps = std::max(0, static_cast<int>(std::lround(decades * points_per_decade)));
  for (int i = 0; i <= steps; ++i) {
    magnitudes.push_back(steps == 0 ? g_min : g_min * std::pow(10.0, decades * i / steps));
  }
  std::vector<double> out;
  if (branch == "attractive" || branch == "both") {
    for (auto it = magnitudes.rbegin(); it != magnitudes.rend(); ++it) out.push_back(-*it);
  }
  if (branch == "repulsive" || branch == "both") out.insert(out.end(), magnitudes.begin(), magnitudes.end());
  return out;
}

SweepSpec read_sweep_spec(Config& cfg) {
  SweepSpec s;
  s.state = read_state_spec(cfg);
  if (cfg.has("g_over_kappa")) {
    s.g_over_kappa = cfg.get_double_list("g_over_kappa", {});
    s.grid_description = "explicit g/kappa list";
  } else {
    const std::string branch = cfg.get_choice("g_branch", "both", {"attractive", "repulsive", "both"});
    const double g_min = cfg.get_double("g_min", 1e-3);
    const double g_max = cfg.get_double("g_max", 1e3);
    if (!(g_min > 0.0)) cfg.fail("g_min", "must be positive");
    if (!(g_max >= g_min)) cfg.fail("g_max", "must be >= g_min");
    const long long ppd = cfg.get_int("g_points_per_decade", 8);
    if (ppd < 1 || ppd > 1000) cfg.fail("g_points_per_decade", "must lie in [1, 1000]");
    s.g_over_kappa = log_grid(g_min, g_max, static_cast<int>(ppd), branch);
    s.grid_description = "g/kappa " + branch + " branch, |g/kappa| log-spaced from " + format_double(g_min) + " to " +
                         format_double(g_max) + ", " + std::to_string(ppd) + " points per decade";
  }
  if (s.state.kind != StateKind::Ground) {
    s.g_over_kappa = {0.0};
    s.grid_description = "single point (state does not depend on g/kappa)";
  }
  const std::vector<double> over_pi = cfg.get_double_list("offsets_over_pi", {});
  for (double v : over_pi) s.offsets.push_back(v * std::numbers::pi);
  s.exact_covariance = cfg.get_bool("exact_covariance", false);
  return s;
}

NumberDistribution number_distribution(const StateSpec& spec) {
  if (spec.number_model == NumberModel::Fixed) return NumberDistribution::delta(spec.n);
  return poisson_distribution(spec.mean_n, spec.tail_mass);
}

namespace {

SectorState vacuum() { return {0, Eigen::VectorXcd::Ones(1)}; }

SectorState make_state(const StateSpec& spec, double g_over_kappa, int n) {
  switch (spec.kind) {
    case StateKind::Ground:
      return ground_state(n, {spec.kappa, g_over_kappa * spec.kappa});
    case StateKind::PqsOptimal: {
      if (n == 0) return vacuum();
      OptimalPqsResult r = optimal_pqs_state(n, spec.pqs_tol, spec.pqs_max_iters);
      if (!r.converged) {
        throw NumericalFailure("optimal PQS did not converge in " + std::to_string(spec.pqs_max_iters) + " iterations");
      }
      return std::move(r.state);
    }
    case StateKind::PqsGaussian:
      if (n == 0) return vacuum();
      return gaussian_pqs_state(n, {spec.sigma_m ? *spec.sigma_m : default_pqs_sigma(n), spec.theta});
    case StateKind::Phase:
      return phase_eigenstate(n, spec.theta);
    case StateKind::Coherent:
      return su2_coherent(n, spec.polar, spec.rel_phase);
  }
  throw std::logic_error("unknown state kind");
}

}  // namespace

Ensemble build_ensemble(const StateSpec& spec, double g_over_kappa) {
  return attach([&](int n) { return make_state(spec, g_over_kappa, n); }, number_distribution(spec));
}

bool wants_mz(const StateSpec& spec, double g_over_kappa) {
  if (spec.mz == "on") return true;
  if (spec.mz == "off") return false;
  return spec.kind == StateKind::Ground && g_over_kappa > 0.0;
}

PointResult evaluate_point(const StateSpec& spec, double g_over_kappa, const std::vector<double>& offsets,
                           bool exact_covariance) {
  PointResult out;
  out.g_over_kappa = g_over_kappa;
  MomentEnsemble mm = member_moments(build_ensemble(spec, g_over_kappa));
  if (wants_mz(spec, g_over_kappa)) {
    MzPreparedMoments p = mz_prepare(mm, spec.mz_phase);
    mm = std::move(p.ensemble);
    out.mz_applied = true;
    out.mz_alpha = p.alpha;
  }
  out.moments = summarize(mm);
  out.report = evaluate_criteria(out.moments);
  if (!offsets.empty() && std::fabs(out.moments.mean_t[0]) > 0.0) {
    out.curve = delta_phi_curve(out.moments, offsets, exact_covariance);
  }
  return out;
}

Ensemble prepared_ensemble(const StateSpec& spec, double g_over_kappa, bool* mz_applied, double* mz_alpha) {
  Ensemble ens = build_ensemble(spec, g_over_kappa);
  const bool mz = wants_mz(spec, g_over_kappa);
  if (mz_applied) *mz_applied = mz;
  if (!mz) return ens;
  MzPrepared p = mz_prepare(ens, spec.mz_phase);
  if (mz_alpha) *mz_alpha = p.alpha;
  return std::move(p.ensemble);
}

Table criteria_table(const SweepSpec& spec) {
  const bool uses_g = spec.state.kind == StateKind::Ground;
  Table t;
  t.columns = {"g_over_kappa", "n_g_over_kappa", "mean_n", "mean_n_plus", "mean_jx_t", "mean_jy_t", "var_jx_t",
               "var_jy_t", "var_jz_t", "cov_jxjy_t", "mean_jx", "var_jx", "var_jy", "var_jz", "e_hz", "e_ph",
               "xi_s_y", "xi_s_z", "xi_s_ph_y", "xi_s_ph_z", "eta_ph", "entangled_modes", "entangled_particles",
               "subshot_all_angles", "mz_applied", "mz_alpha", "worst_delta_phi"};
  for (std::size_t i = 0; i < spec.offsets.size(); ++i) {
    t.columns.push_back("delta_phi_" + std::to_string(i));
  }

  std::vector<PointResult> points(spec.g_over_kappa.size());
  parallel_for(points.size(), [&](std::size_t i) {
    points[i] = evaluate_point(spec.state, spec.g_over_kappa[i], spec.offsets, spec.exact_covariance);
  });

  for (const PointResult& p : points) {
    const NormalizedMoments& m = p.moments;
    const CriterionReport& r = p.report;
    std::vector<Cell> row;
    row.push_back(uses_g ? Cell(p.g_over_kappa) : Cell());
    row.push_back(uses_g ? Cell(p.g_over_kappa * m.mean_n) : Cell());
    for (double v : {m.mean_n, m.mean_n_plus, m.mean_t[0], m.mean_t[1], m.var_t(0), m.var_t(1), m.var_t(2),
                     m.cov_t(0, 1), m.mean[0], m.var(0), m.var(1), m.var(2)}) {
      row.push_back(v);
    }
    for (const auto& v : {r.e_hz, r.e_ph, r.xi_s_y, r.xi_s_z, r.xi_s_ph_y, r.xi_s_ph_z, r.eta_ph}) {
      row.push_back(optional_cell(v));
    }
    row.push_back(static_cast<long long>(r.entangled_modes()));
    row.push_back(static_cast<long long>(r.entangled_particles()));
    row.push_back(static_cast<long long>(r.subshot_all_angles()));
    row.push_back(static_cast<long long>(p.mz_applied));
    row.push_back(p.mz_applied ? Cell(p.mz_alpha) : Cell());
    row.push_back(p.curve ? Cell(p.curve->worst_case) : Cell());
    for (std::size_t i = 0; i < spec.offsets.size(); ++i) {
      row.push_back(p.curve ? Cell(p.curve->points[i].delta_phi) : Cell());
    }
    t.add_row(std::move(row));
  }
  return t;
}

namespace {

Json state_metadata(const StateSpec& s) {
  Json j = Json::object();
  j["state"] = to_string(s.kind);
  j["number_model"] = to_string(s.number_model);
  if (s.number_model == NumberModel::Fixed) {
    j["n"] = s.n;
  } else {
    j["mean_n"] = s.mean_n;
    j["tail_mass"] = s.tail_mass;
  }
  j["kappa"] = s.kappa;
  if (s.kind == StateKind::Phase || s.kind == StateKind::PqsGaussian) j["theta"] = s.theta;
  if (s.kind == StateKind::PqsGaussian) j["sigma_m"] = s.sigma_m ? Json(*s.sigma_m) : Json("(J^2/2)^(2/3) per sector");
  if (s.kind == StateKind::Coherent) {
    j["polar"] = s.polar;
    j["rel_phase"] = s.rel_phase;
  }
  j["mz"] = s.mz;
  j["mz_phase"] = s.mz_phase ? Json(*s.mz_phase) : Json("optimized");
  return j;
}

}  // namespace

Json sweep_metadata(const SweepSpec& spec) {
  Json j = state_metadata(spec.state);
  j["x_axis"] = spec.grid_description;
  j["offsets_rad"] = spec.offsets;
  j["exact_covariance"] = spec.exact_covariance;
  j["kernel_backend"] = std::string(kernels::active_backend());
  return j;
}

EstimateSpec read_estimate_spec(Config& cfg, std::uint64_t seed) {
  EstimateSpec s;
  s.state = read_state_spec(cfg);
  s.g_over_kappa = cfg.get_double("g_over_kappa", 0.436);
  const std::vector<double> over_pi = cfg.get_double_list("offsets_over_pi", {0.25, 0.5});
  for (double v : over_pi) s.offsets.push_back(v * std::numbers::pi);
  const long long shots = cfg.get_int("shots", 10000);
  if (shots < 1 || shots > 100000000) cfg.fail("shots", "must lie in [1, 1e8]");
  const long long trials = cfg.get_int("trials", 200);
  if (trials < 100 || trials > 10000000) cfg.fail("trials", "must lie in [100, 1e7]");
  s.scan.shots_per_setting = static_cast<int>(shots);
  s.scan.trials = static_cast<int>(trials);
  s.scan.theta_ref = cfg.get_double("theta_ref", 0.0);
  s.scan.seed = seed;
  return s;
}

Json run_estimate(const EstimateSpec& spec) {
  bool mz = false;
  double alpha = 0.0;
  const Ensemble ens = prepared_ensemble(spec.state, spec.g_over_kappa, &mz, &alpha);
  const NormalizedMoments m = moments(ens);
  const std::vector<RmsRow> rows = rms_error_scan(ens, spec.offsets, spec.scan);

  Json report = Json::object();
  Json meta = state_metadata(spec.state);
  if (spec.state.kind == StateKind::Ground) meta["g_over_kappa"] = spec.g_over_kappa;
  meta["shots_per_setting"] = spec.scan.shots_per_setting;
  meta["trials"] = spec.scan.trials;
  meta["seed"] = spec.scan.seed;
  meta["theta_ref"] = spec.scan.theta_ref;
  meta["mz_applied"] = mz;
  if (mz) meta["mz_alpha"] = alpha;
  meta["rms_normalization"] = "rms * sqrt(shots per setting)";
  report["metadata"] = meta;
  report["mean_n"] = m.mean_n;
  report["calibration"] = std::hypot(m.mean_t[0], m.mean_t[1]);
  report["sql"] = sql_limit(m.mean_n);
  Json out_rows = Json::array();
  for (const RmsRow& r : rows) {
    Json row = Json::object();
    row["offset"] = r.offset;
    row["offset_over_pi"] = r.offset / std::numbers::pi;
    row["rms"] = r.rms;
    row["rms_normalized"] = r.rms_normalized;
    row["rms_ls_normalized"] = r.rms_ls_normalized;
    row["analytic_delta_phi"] = r.analytic;
    row["ratio_to_analytic"] = r.rms_normalized / r.analytic;
    row["ratio_to_sql"] = r.rms_normalized / sql_limit(m.mean_n);
    row["bias"] = r.bias;
    row["quiet_fraction_setting0"] = r.quiet_fraction_setting0;
    out_rows.push_back(std::move(row));
  }
  report["rows"] = out_rows;
  return report;
}

Table estimate_table(const Json& report) {
  Table t;
  t.columns = {"offset", "offset_over_pi", "rms", "rms_normalized", "rms_ls_normalized", "analytic_delta_phi",
               "ratio_to_analytic", "ratio_to_sql", "bias", "quiet_fraction_setting0"};
  for (const auto& row : report.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& c : t.columns) cells.push_back(row.at(c).get<double>());
    t.add_row(std::move(cells));
  }
  return t;
}

Json state_report(const StateSpec& spec, double g_over_kappa) {
  const int n = spec.n;
  Json report = Json::object();
  StateSpec fixed = spec;
  fixed.number_model = NumberModel::Fixed;
  Json meta = state_metadata(fixed);
  if (spec.kind == StateKind::Ground) meta["g_over_kappa"] = g_over_kappa;

  SectorState state;
  if (spec.kind == StateKind::Ground) {
    const GroundStateResult g = solve_ground_state(n, {spec.kappa, g_over_kappa * spec.kappa});
    state = g.state;
    report["energy"] = g.energy;
    report["gap"] = std::isfinite(g.gap) ? Json(g.gap) : Json(nullptr);
    report["degenerate"] = g.degenerate;
  } else if (spec.kind == StateKind::PqsOptimal) {
    if (n < 1) throw std::invalid_argument("optimal PQS needs n >= 1");
    const OptimalPqsResult r = optimal_pqs_state(n, spec.pqs_tol, spec.pqs_max_iters);
    if (!r.converged) throw NumericalFailure("optimal PQS did not converge");
    state = r.state;
    report["cj"] = r.cj;
    report["cj_asymptote"] = cj_asymptote(0.5 * n);
    report["iterations"] = r.iterations;
  } else {
    state = make_state(fixed, g_over_kappa, n);
  }
  if (wants_mz(spec, g_over_kappa)) {
    Ensemble single;
    single.members.push_back({1.0, state});
    const MzPrepared p = mz_prepare(single, spec.mz_phase);
    state = p.ensemble.members.front().state;
    meta["mz_applied"] = true;
    meta["mz_alpha"] = p.alpha;
  } else {
    meta["mz_applied"] = false;
  }
  report["metadata"] = meta;

  const SectorBasis basis(n);
  Json amps = Json::array();
  for (std::size_t k = 0; k < basis.dim(); ++k) {
    const cplx c = state.amplitudes(static_cast<Eigen::Index>(k));
    Json a = Json::object();
    a["m"] = basis.m(k);
    a["re"] = c.real();
    a["im"] = c.imag();
    a["prob"] = std::norm(c);
    a["phase"] = std::abs(c) > 0.0 ? std::arg(c) : 0.0;
    amps.push_back(std::move(a));
  }
  report["amplitudes"] = amps;

  Ensemble ens;
  ens.members.push_back({1.0, state});
  const NormalizedMoments m = moments(ens);
  Json mom = Json::object();
  mom["mean_jx"] = m.mean[0];
  mom["mean_jy"] = m.mean[1];
  mom["mean_jz"] = m.mean[2];
  mom["var_jx"] = m.var(0);
  mom["var_jy"] = m.var(1);
  mom["var_jz"] = m.var(2);
  mom["mean_n"] = m.mean_n;
  mom["mean_n_plus"] = m.mean_n_plus;
  mom["mean_jx_t"] = m.mean_t[0];
  mom["mean_jy_t"] = m.mean_t[1];
  mom["mean_jz_t"] = m.mean_t[2];
  mom["var_jx_t"] = m.var_t(0);
  mom["var_jy_t"] = m.var_t(1);
  mom["var_jz_t"] = m.var_t(2);
  mom["cov_jxjy_t"] = m.cov_t(0, 1);
  report["moments"] = mom;
  return report;
}

Table state_table(const Json& report) {
  Table t;
  t.columns = {"m", "re", "im", "prob", "phase"};
  for (const auto& a : report.at("amplitudes")) {
    std::vector<Cell> cells;
    for (const auto& c : t.columns) cells.push_back(a.at(c).get<double>());
    t.add_row(std::move(cells));
  }
  return t;
}

}  // namespace pqslab::sweep
