#include "pqslab/sweep/figures.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pqslab/parallel.hpp"
#include "pqslab/sweep/sweep.hpp"

namespace pqslab::sweep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct FigureParams {
  double mean_n = 100.0;
  double tail_mass = 1e-12;
  int points_per_decade = 8;
  int fig4_points = 61;
};

FigureParams read_params(Config& cfg) {
  FigureParams p;
  p.mean_n = cfg.get_double("mean_n", 100.0);
  if (!(p.mean_n >= 1.0) || p.mean_n > 10000.0) cfg.fail("mean_n", "must lie in [1, 10000]");
  if (std::fabs(p.mean_n - std::round(p.mean_n)) > 0.0) cfg.fail("mean_n", "must be an integer for the fixed-N curves");
  p.tail_mass = cfg.get_double("tail_mass", 1e-12);
  if (!(p.tail_mass > 0.0) || p.tail_mass > 1e-6) cfg.fail("tail_mass", "must lie in (0, 1e-6]");
  const long long ppd = cfg.get_int("g_points_per_decade", 8);
  if (ppd < 1 || ppd > 200) cfg.fail("g_points_per_decade", "must lie in [1, 200]");
  p.points_per_decade = static_cast<int>(ppd);
  const long long pts = cfg.get_int("fig4_points", 61);
  if (pts < 3 || pts > 10000) cfg.fail("fig4_points", "must lie in [3, 10000]");
  p.fig4_points = static_cast<int>(pts);
  return p;
}

StateSpec ground_spec(const FigureParams& p, NumberModel model, const std::string& mz) {
  StateSpec s;
  s.kind = StateKind::Ground;
  s.number_model = model;
  s.n = static_cast<int>(std::lround(p.mean_n));
  s.mean_n = p.mean_n;
  s.tail_mass = p.tail_mass;
  s.mz = mz;
  return s;
}

Json common_metadata(const FigureParams& p) {
  Json j = Json::object();
  j["mean_n"] = p.mean_n;
  j["tail_mass"] = p.tail_mass;
  j["kappa"] = 1.0;
  j["note"] = "axes are assumptions; the quantitative anchors are the E_ph < 1 regions, the E_ph minimum near "
              "<N> g/kappa = 43.6, the xi sqrt(N) trend toward sqrt(2), and the Delta phi = 1/sqrt(<N>) line";
  return j;
}

template <typename F>
std::vector<double> column(const std::vector<PointResult>& pts, F f) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(f(p));
  return out;
}

double value_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

// Evaluates each spec on each grid point, preserving grid order.
std::vector<std::vector<PointResult>> evaluate_grid(const std::vector<StateSpec>& specs, const std::vector<double>& grid) {
  std::vector<std::vector<PointResult>> out(specs.size(), std::vector<PointResult>(grid.size()));
  parallel_for(specs.size() * grid.size(), [&](std::size_t i) {
    const std::size_t s = i / grid.size();
    const std::size_t g = i % grid.size();
    out[s][g] = evaluate_point(specs[s], grid[g]);
  });
  return out;
}

FigureOutput fig2(const FigureParams& p) {
  FigureOutput out;
  out.name = "fig2";
  const std::vector<double> grid = log_grid(1e-3, 1e3, p.points_per_decade, "both");
  const auto res = evaluate_grid({ground_spec(p, NumberModel::Fixed, "auto"), ground_spec(p, NumberModel::Poisson, "auto")}, grid);

  Table t;
  t.columns = {"branch", "g_over_kappa", "abs_g_over_kappa", "n_g_over_kappa", "e_hz_fixed", "e_ph_fixed",
               "e_hz_poisson", "e_ph_poisson", "mz_applied"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& f = res[0][i];
    const auto& q = res[1][i];
    t.add_row({std::string(grid[i] < 0 ? "attractive" : "repulsive"), grid[i], std::fabs(grid[i]), grid[i] * p.mean_n,
               optional_cell(f.report.e_hz), optional_cell(f.report.e_ph), optional_cell(q.report.e_hz),
               optional_cell(q.report.e_ph), static_cast<long long>(q.mz_applied)});
  }
  out.tables.emplace_back("fig2", std::move(t));

  for (const std::string branch : {"attractive", "repulsive"}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if ((grid[i] < 0) == (branch == "attractive")) idx.push_back(i);
    }
    auto pick = [&](const std::vector<PointResult>& pts, auto f) {
      std::vector<double> v;
      for (std::size_t i : idx) v.push_back(f(pts[i]));
      return v;
    };
    std::vector<double> x;
    for (std::size_t i : idx) x.push_back(std::fabs(grid[i]));
    PlotSpec plot;
    plot.title = "Entanglement criteria, " + branch + " branch, <N> = " + format_double(p.mean_n) +
                 (branch == "repulsive" ? " (MZ-prepared)" : "");
    plot.x_label = "|g|/kappa";
    plot.y_label = "E";
    plot.log_x = true;
    plot.log_y = true;
    plot.series.push_back({"E_ph fixed N", x, pick(res[0], [](const PointResult& r) { return value_or_nan(r.report.e_ph); })});
    plot.series.push_back({"E_ph Poisson", x, pick(res[1], [](const PointResult& r) { return value_or_nan(r.report.e_ph); }), true});
    plot.series.push_back({"E_HZ fixed N", x, pick(res[0], [](const PointResult& r) { return value_or_nan(r.report.e_hz); })});
    plot.series.push_back({"E_HZ Poisson", x, pick(res[1], [](const PointResult& r) { return value_or_nan(r.report.e_hz); }), true});
    plot.h_lines.push_back({1.0, "E = 1"});
    plot.v_lines.push_back({1e3, "g/kappa = 1e3"});
    out.svgs.emplace_back("fig2_" + branch + ".svg", render_svg(plot));
  }

  out.metadata = common_metadata(p);
  out.metadata["x_axis"] = "signed g/kappa, |g/kappa| log-spaced over [1e-3, 1e3], " +
                           std::to_string(p.points_per_decade) + " points per decade";
  out.metadata["repulsive_branch"] = "MZ-prepared (input phase optimized, frame fixed)";
  out.metadata["caption_marks"] = Json::array({"N = 100", "g/kappa = 1e3"});
  return out;
}

FigureOutput fig3(const FigureParams& p) {
  FigureOutput out;
  out.name = "fig3";
  const std::vector<double> grid = log_grid(1e-3, 1e3, p.points_per_decade, "both");
  const auto res = evaluate_grid({ground_spec(p, NumberModel::Fixed, "off"), ground_spec(p, NumberModel::Poisson, "off")}, grid);
  const double guide = 1.0 / std::sqrt(p.mean_n);

  Table t;
  t.columns = {"branch", "g_over_kappa", "abs_g_over_kappa", "xi_s_y_fixed", "xi_s_z_fixed", "xi_s_ph_y_poisson",
               "xi_s_ph_z_poisson", "sql", "heisenberg_guide"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& f = res[0][i].report;
    const auto& q = res[1][i].report;
    t.add_row({std::string(grid[i] < 0 ? "attractive" : "repulsive"), grid[i], std::fabs(grid[i]),
               optional_cell(f.xi_s_y), optional_cell(f.xi_s_z), optional_cell(q.xi_s_ph_y),
               optional_cell(q.xi_s_ph_z), 1.0, guide});
  }
  out.tables.emplace_back("fig3", std::move(t));

  // Inset: xi sqrt(N) at g/kappa = 1e3 for growing N.
  const std::vector<int> ns = {25, 50, 100, 200, 400, 800};
  std::vector<PointResult> inset_p(ns.size());
  std::vector<PointResult> inset_f(ns.size());
  parallel_for(2 * ns.size(), [&](std::size_t i) {
    FigureParams q = p;
    q.mean_n = ns[i / 2];
    if (i % 2 == 0) {
      inset_p[i / 2] = evaluate_point(ground_spec(q, NumberModel::Poisson, "off"), 1e3);
    } else {
      inset_f[i / 2] = evaluate_point(ground_spec(q, NumberModel::Fixed, "off"), 1e3);
    }
  });
  Table inset;
  inset.columns = {"n", "xi_s_ph_z_sqrt_n_poisson", "xi_s_z_sqrt_n_fixed", "asymptote_sqrt2"};
  std::vector<double> xs, yp, yf;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double root = std::sqrt(static_cast<double>(ns[i]));
    const double vp = value_or_nan(inset_p[i].report.xi_s_ph_z) * root;
    const double vf = value_or_nan(inset_f[i].report.xi_s_z) * root;
    inset.add_row({static_cast<long long>(ns[i]), vp, vf, std::numbers::sqrt2});
    xs.push_back(ns[i]);
    yp.push_back(vp);
    yf.push_back(vf);
  }
  out.tables.emplace_back("fig3_inset", std::move(inset));

  for (const std::string branch : {"attractive", "repulsive"}) {
    std::vector<double> x, a, b, c, d;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if ((grid[i] < 0) != (branch == "attractive")) continue;
      x.push_back(std::fabs(grid[i]));
      a.push_back(value_or_nan(res[0][i].report.xi_s_y));
      b.push_back(value_or_nan(res[0][i].report.xi_s_z));
      c.push_back(value_or_nan(res[1][i].report.xi_s_ph_y));
      d.push_back(value_or_nan(res[1][i].report.xi_s_ph_z));
    }
    PlotSpec plot;
    plot.title = "Spin squeezing, " + branch + " branch, <N> = " + format_double(p.mean_n);
    plot.x_label = "|g|/kappa";
    plot.y_label = "xi";
    plot.log_x = true;
    plot.log_y = true;
    plot.series.push_back({"xi_S^Y fixed N", x, a});
    plot.series.push_back({"xi_S^Z fixed N", x, b});
    plot.series.push_back({"xi_S,ph^Y Poisson", x, c, true});
    plot.series.push_back({"xi_S,ph^Z Poisson", x, d, true});
    plot.h_lines.push_back({1.0, "SQL"});
    plot.h_lines.push_back({guide, "1/sqrt(N) guide"});
    out.svgs.emplace_back("fig3_" + branch + ".svg", render_svg(plot));
  }
  PlotSpec ip;
  ip.title = "xi sqrt(N) at g/kappa = 1e3";
  ip.x_label = "N";
  ip.y_label = "xi sqrt(N)";
  ip.log_x = true;
  ip.series.push_back({"Poisson", xs, yp, true});
  ip.series.push_back({"fixed N", xs, yf});
  ip.h_lines.push_back({std::numbers::sqrt2, "sqrt(2)"});
  out.svgs.emplace_back("fig3_inset.svg", render_svg(ip));

  out.metadata = common_metadata(p);
  out.metadata["x_axis"] = "signed g/kappa, |g/kappa| log-spaced over [1e-3, 1e3], " +
                           std::to_string(p.points_per_decade) + " points per decade";
  out.metadata["preparation"] = "ground states without interferometer preparation";
  out.metadata["heisenberg_guide"] = "1/sqrt(<N>) with prefactor 1 (scaling guide only)";
  out.metadata["inset"] = "g/kappa = 1e3, N in {25, 50, 100, 200, 400, 800}";
  return out;
}

FigureOutput fig4(const FigureParams& p) {
  FigureOutput out;
  out.name = "fig4";
  const StateSpec spec = ground_spec(p, NumberModel::Poisson, "on");
  const std::vector<double> ngk = {43.6, 1e3, 1e4};
  std::vector<double> phis;
  for (int k = 1; k < 100; ++k) phis.push_back(k / 100.0);
  std::vector<double> offsets;
  for (double f : phis) offsets.push_back(f * std::numbers::pi);

  std::vector<PointResult> curves(ngk.size());
  parallel_for(ngk.size(), [&](std::size_t i) { curves[i] = evaluate_point(spec, ngk[i] / p.mean_n, offsets); });

  const double sql = 1.0 / std::sqrt(p.mean_n);
  Table t;
  t.columns = {"phi_over_pi", "delta_phi_ng_43_6", "delta_phi_ng_1e3", "delta_phi_ng_1e4", "sql"};
  for (std::size_t k = 0; k < phis.size(); ++k) {
    std::vector<Cell> row{phis[k]};
    for (const auto& c : curves) row.push_back(c.curve ? Cell(c.curve->points[k].delta_phi) : Cell());
    row.push_back(sql);
    t.add_row(std::move(row));
  }
  out.tables.emplace_back("fig4", std::move(t));

  std::vector<double> ng;
  const double lo = std::log10(10.0);
  const double hi = std::log10(200.0);
  for (int i = 0; i < p.fig4_points; ++i) ng.push_back(std::pow(10.0, lo + (hi - lo) * i / (p.fig4_points - 1)));
  std::vector<double> g;
  for (double v : ng) g.push_back(v / p.mean_n);
  const auto res = evaluate_grid({spec, ground_spec(p, NumberModel::Fixed, "on")}, g);
  Table e;
  e.columns = {"n_g_over_kappa", "g_over_kappa", "e_ph_poisson", "e_ph_fixed", "xi_s_ph_y_poisson"};
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    e.add_row({ng[i], g[i], optional_cell(res[0][i].report.e_ph), optional_cell(res[1][i].report.e_ph),
               optional_cell(res[0][i].report.xi_s_ph_y)});
    if (value_or_nan(res[0][i].report.e_ph) < value_or_nan(res[0][best].report.e_ph)) best = i;
  }
  out.tables.emplace_back("fig4_eph", std::move(e));

  PlotSpec plot;
  plot.title = "Phase uncertainty, Poisson <N> = " + format_double(p.mean_n) + ", MZ-prepared";
  plot.x_label = "phi/pi";
  plot.y_label = "Delta phi";
  plot.log_y = true;
  const char* labels[] = {"<N>g/kappa = 43.6", "<N>g/kappa = 1e3", "<N>g/kappa = 1e4"};
  for (std::size_t i = 0; i < curves.size(); ++i) {
    std::vector<double> y;
    for (const auto& pt : curves[i].curve->points) y.push_back(pt.delta_phi);
    plot.series.push_back({labels[i], phis, y, i == 0});
  }
  plot.h_lines.push_back({sql, "1/sqrt(<N>)"});
  out.svgs.emplace_back("fig4.svg", render_svg(plot));

  PlotSpec ep;
  ep.title = "E_ph vs <N> g/kappa (MZ-prepared)";
  ep.x_label = "<N> g/kappa";
  ep.y_label = "E_ph";
  ep.log_x = true;
  ep.series.push_back({"Poisson", ng, column(res[0], [](const PointResult& r) { return value_or_nan(r.report.e_ph); }), true});
  ep.series.push_back({"fixed N", ng, column(res[1], [](const PointResult& r) { return value_or_nan(r.report.e_ph); })});
  ep.v_lines.push_back({43.6, "43.6"});
  out.svgs.emplace_back("fig4_eph.svg", render_svg(ep));

  out.metadata = common_metadata(p);
  out.metadata["x_axis"] = "phi/pi on k/100, k = 1..99; E_ph scan over <N> g/kappa log-spaced in [10, 200]";
  out.metadata["preparation"] = "repulsive ground states, MZ-prepared, Poisson number statistics";
  out.metadata["e_ph_minimizer_n_g_over_kappa"] = ng[best];
  out.metadata["e_ph_minimum"] = value_or_nan(res[0][best].report.e_ph);
  return out;
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig2", "fig3", "fig4"}; }

FigureOutput make_figure(const std::string& name, Config& cfg) {
  const FigureParams p = read_params(cfg);
  if (name == "fig2") return fig2(p);
  if (name == "fig3") return fig3(p);
  if (name == "fig4") return fig4(p);
  throw ConfigError("unknown figure '" + name + "' (expected fig2, fig3 or fig4)");
}

}  // namespace pqslab::sweep
