// pqslab: criteria sweeps, figure data, phase estimation and state dumps.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pqslab/ensemble.hpp"
#include "pqslab/kernels.hpp"
#include "pqslab/parallel.hpp"
#include "pqslab/sweep/config.hpp"
#include "pqslab/sweep/figures.hpp"
#include "pqslab/sweep/output.hpp"
#include "pqslab/sweep/sweep.hpp"

namespace {

using namespace pqslab;
using namespace pqslab::sweep;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::uint64_t seed = 12345;
  std::string out;
  std::string format = "csv";
  int threads = 0;
};

Config load_config(const Common& c) {
  Config cfg = c.config.empty() ? Config::parse("", "<none>") : Config::load(c.config);
  for (const auto& s : c.overrides) cfg.set_override(s);
  return cfg;
}

Json run_metadata(const Common& c, const std::string& command) {
  Json m;
  m["command"] = command;
  m["config"] = c.config;
  m["seed"] = c.seed;
  m["threads"] = resolve_threads(c.threads);
  m["kernel_backend"] = kernels::active_backend();
  Json ov = Json::array();
  for (const auto& s : c.overrides) ov.push_back(s);
  m["overrides"] = ov;
  return m;
}

// Table either to stdout or to <out>/<stem>.{csv,json} plus <stem>.meta.json.
void emit_table(const Common& c, const std::string& stem, const Table& table, const Json& meta) {
  const std::string body = c.format == "json" ? dump(to_json(table)) : to_csv(table);
  if (c.out.empty()) {
    std::cout << body;
    return;
  }
  write_file(c.out, stem + "." + c.format, body);
  write_file(c.out, stem + ".meta.json", dump(meta));
}

int cmd_criteria(const Common& c) {
  Config cfg = load_config(c);
  SweepSpec spec = read_sweep_spec(cfg);
  cfg.reject_unused();
  Table t = criteria_table(spec);
  Json meta = run_metadata(c, "criteria");
  meta["sweep"] = sweep_metadata(spec);
  emit_table(c, "criteria", t, meta);
  return 0;
}

int cmd_figure(const Common& c, const std::string& name) {
  Config cfg = load_config(c);
  FigureOutput fig = make_figure(name, cfg);
  cfg.reject_unused();
  const std::string dir = c.out.empty() ? "." : c.out;
  for (const auto& [stem, table] : fig.tables) {
    write_file(dir, stem + "." + c.format, c.format == "json" ? dump(to_json(table)) : to_csv(table));
  }
  for (const auto& [file, svg] : fig.svgs) write_file(dir, file, svg);
  Json meta = run_metadata(c, "figure " + name);
  meta["figure"] = fig.metadata;
  write_file(dir, fig.name + ".meta.json", dump(meta));
  return 0;
}

int cmd_estimate(const Common& c) {
  Config cfg = load_config(c);
  EstimateSpec spec = read_estimate_spec(cfg, c.seed);
  cfg.reject_unused();
  Json report = run_estimate(spec);
  Json meta = run_metadata(c, "estimate");
  if (c.format == "json") {
    Json full = report;
    full["run"] = meta;
    if (c.out.empty()) {
      std::cout << dump(full);
    } else {
      write_file(c.out, "estimate.json", dump(full));
    }
    return 0;
  }
  meta["report"] = report;
  meta["report"].erase("rows");
  emit_table(c, "estimate", estimate_table(report), meta);
  return 0;
}

int cmd_state(const Common& c) {
  Config cfg = load_config(c);
  StateSpec spec = read_state_spec(cfg);
  const double g = cfg.get_double("g_over_kappa", 0.0);
  cfg.reject_unused();
  Json report = state_report(spec, g);
  Json meta = run_metadata(c, "state");
  if (c.format == "json") {
    Json full = report;
    full["run"] = meta;
    if (c.out.empty()) {
      std::cout << dump(full);
    } else {
      write_file(c.out, "state.json", dump(full));
    }
    return 0;
  }
  meta["report"] = report;
  meta["report"].erase("amplitudes");
  emit_table(c, "state", state_table(report), meta);
  return 0;
}

const char* kCriteriaColumns =
    "CSV columns: g_over_kappa, n_g_over_kappa, mean_n, mean_n_plus, mean_jx_t,\n"
    "mean_jy_t, var_jx_t, var_jy_t, var_jz_t, cov_jxjy_t (per-sector moments\n"
    "normalized by <N>), mean_jx, var_jx, var_jy, var_jz (raw moments), e_hz,\n"
    "e_ph, xi_s_y, xi_s_z, xi_s_ph_y, xi_s_ph_z, eta_ph, entangled_modes,\n"
    "entangled_particles, subshot_all_angles, mz_applied, mz_alpha,\n"
    "worst_delta_phi, then delta_phi_<i> per entry of offsets_over_pi.\n"
    "Empty cells mark undefined values; inf marks a divergent phase error.";

const char* kConfigKeys =
    "Config keys (file lines 'key = value', or --set key=value):\n"
    "  state            ground | pqs-optimal | pqs-gaussian | phase | coherent\n"
    "  number_model     fixed | poisson\n"
    "  n, mean_n, tail_mass, kappa, theta, sigma_m, polar, rel_phase\n"
    "  pqs_tol, pqs_max_iters, mz (auto|on|off), mz_phase\n"
    "  g_over_kappa (list) or g_branch, g_min, g_max, g_points_per_decade\n"
    "  offsets_over_pi, exact_covariance\n"
    "  estimate: shots, trials, theta_ref\n"
    "  figure: mean_n, tail_mass, g_points_per_decade, fig4_points";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-squeezing criteria for two-mode Bose-Hubbard ensembles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(kConfigKeys);

  Common c;
  app.add_option("--config", c.config, "Config file (key = value lines)");
  app.add_option("--set", c.overrides, "Override a config key: key=value (repeatable)");
  app.add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", c.out, "Output directory (default: stdout; figure: .)");
  app.add_option("--format", c.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads, 0 = PQSLAB_THREADS or hardware")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* criteria = app.add_subcommand("criteria", "Criteria over a g/kappa sweep");
  criteria->footer(kCriteriaColumns);

  std::string fig_name;
  auto* figure = app.add_subcommand("figure", "Data tables and SVG plots for one figure");
  figure->add_option("name", fig_name, "fig2 | fig3 | fig4")->required();
  figure->footer(
      "Writes <name>*.csv (or .json), <name>*.svg and <name>.meta.json into --out.\n"
      "fig2.csv: branch, g_over_kappa, abs_g_over_kappa, n_g_over_kappa,\n"
      "  e_hz_fixed, e_ph_fixed, e_hz_poisson, e_ph_poisson, mz_applied\n"
      "fig3.csv: branch, g_over_kappa, abs_g_over_kappa, xi_s_y_fixed, xi_s_z_fixed,\n"
      "  xi_s_ph_y_poisson, xi_s_ph_z_poisson, sql, heisenberg_guide\n"
      "fig3_inset.csv: n, xi_s_ph_z_sqrt_n_poisson, xi_s_z_sqrt_n_fixed, asymptote_sqrt2\n"
      "fig4.csv: phi_over_pi, delta_phi_ng_43_6, delta_phi_ng_1e3, delta_phi_ng_1e4, sql\n"
      "fig4_eph.csv: n_g_over_kappa, g_over_kappa, e_ph_poisson, e_ph_fixed,\n"
      "  xi_s_ph_y_poisson");

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo phase estimation, RMS error vs offset");
  estimate->footer(
      "CSV columns: offset, offset_over_pi, rms, rms_normalized, rms_ls_normalized,\n"
      "analytic_delta_phi, ratio_to_analytic, ratio_to_sql, bias,\n"
      "quiet_fraction_setting0. Normalized values are multiplied by sqrt(shots).");

  auto* state = app.add_subcommand("state", "Amplitudes and moments of one fixed-n state");
  state->footer(
      "Uses the state keys with number_model ignored; n sets the particle number\n"
      "and g_over_kappa (single value, default 0) the ground-state interaction.\n"
      "CSV columns: m, re, im, prob, phase");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    set_default_threads(resolve_threads(c.threads));
    if (criteria->parsed()) return cmd_criteria(c);
    if (figure->parsed()) return cmd_figure(c, fig_name);
    if (estimate->parsed()) return cmd_estimate(c);
    if (state->parsed()) return cmd_state(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
