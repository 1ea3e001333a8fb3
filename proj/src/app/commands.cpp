#include "ermakov/app/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ermakov/analytic.hpp"
#include "ermakov/app/parallel.hpp"
#include "ermakov/app/svg.hpp"
#include "ermakov/app/verify.hpp"
#include "ermakov/integrate.hpp"

namespace ermakov::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

IntegrationResult run_model(const RunConfig& c) {
  if (!c.model) throw ConfigError("model", "required for this command");
  const ModelVariant v = *c.model;
  const bool naive = v == ModelVariant::RadiativeNaive;
  if (!naive && c.sigma_ddot) throw ConfigError("initial.sigma_ddot", "only used by radiative_naive");
  if (!naive && c.sigma_ddot_offset != 0) throw ConfigError("initial.sigma_ddot_offset", "only used by radiative_naive");
  if (is_overdamped(v)) return integrate_overdamped(v, c.initial.sigma, c.span, c.params, c.integrator);
  if (naive) {
    State3 s = c.sigma_ddot ? State3{c.initial.sigma, c.initial.sigma_dot, *c.sigma_ddot}
                            : default_radiative_initial(c.initial, c.params);
    s.sigma_ddot += c.sigma_ddot_offset;
    return integrate(v, s, c.span, c.params, c.integrator);
  }
  return integrate(v, c.initial, c.span, c.params, c.integrator);
}

fs::path resolve(const fs::path& dir, const std::string& name) {
  const fs::path p(name);
  return p.is_absolute() ? p : dir / p;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<std::vector<double>> grid_points(const std::vector<SweepAxis>& axes) {
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : points)
      for (double v : axis.values) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }
  return points;
}

}  // namespace

RunOutput simulate(const RunConfig& config) {
  const IntegrationResult r = run_model(config);
  RunOutput out;
  out.table.header = {"t", "sigma", "sigma_dot", "energy"};
  out.stop = r.stop;
  out.stats = r.stats;
  out.warnings = r.warnings;
  out.reached_time = r.trajectory.dense.back_time();
  for (const auto& [t, s] : sample(r.trajectory, uniform_times(config.span, config.samples)))
    out.table.rows.push_back({t, s.sigma, s.sigma_dot, energy(s, config.params)});
  // an early stop still reports the last state reached
  const std::size_t last = r.trajectory.size() - 1;
  if (out.table.rows.empty() || out.table.rows.back()[0] < r.trajectory.time(last)) {
    const State s = r.trajectory.state(last);
    out.table.rows.push_back({r.trajectory.time(last), s.sigma, s.sigma_dot, energy(s, config.params)});
  }
  return out;
}

RunOutput simulate_thermal(const RunConfig& config) {
  if (!config.thermal) throw ConfigError("thermal", "required for the thermal command");
  const ThermalSettings& ts = *config.thermal;
  thermal::BetaGrid grid = [&] {
    try {
      return thermal::BetaGrid::uniform(ts.beta_min, ts.beta_max, ts.beta_count);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("thermal", e.what());
    }
  }();
  const thermal::ThermalField field0 = initial_profile(ts, grid, config.params, config.base_dir);
  const auto r = thermal::integrate_thermal(ts.variant, field0, grid, config.span, config.params, config.integrator,
                                            closure_for(ts, config.params));
  RunOutput out;
  out.table.header = {"t", "beta", "sigma", "sigma_dot"};
  out.stop = r.stop;
  out.stats = r.stats;
  out.warnings = r.warnings;
  out.reached_time = r.trajectory.dense.back_time();
  auto emit = [&](double t, const thermal::ThermalField& f) {
    for (Eigen::Index j = 0; j < grid.size(); ++j) out.table.rows.push_back({t, grid[j], f.sigma[j], f.sigma_dot[j]});
  };
  double last_t = -INFINITY;
  for (double t : uniform_times(config.span, config.samples)) {
    if (t > out.reached_time) break;
    emit(t, r.trajectory.sample(t));
    last_t = t;
  }
  if (last_t < out.reached_time) emit(out.reached_time, r.trajectory.field(r.trajectory.size() - 1));
  return out;
}

SweepOutput sweep(const RunConfig& config, unsigned jobs) {
  if (!config.sweep) throw ConfigError("sweep", "required for the sweep command");
  const auto& axes = config.sweep->axes;
  const auto points = grid_points(axes);
  const bool equilibrium = config.sweep->quantity == SweepQuantity::Equilibrium;

  std::vector<RunConfig> configs;
  configs.reserve(points.size());
  for (const auto& point : points) {
    RunConfig c = config;
    for (std::size_t k = 0; k < axes.size(); ++k) c = with_parameter(c, axes[k].name, point[k]);
    configs.push_back(std::move(c));
  }

  std::vector<RunOutput> results(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    const RunConfig& c = configs[i];
    if (equilibrium) {
      const json e = equilibrium_report(c.params);
      results[i].table.header = {"sigma_g", "sigma2_coth", "sigma2_closed_form"};
      results[i].table.rows.push_back(
          {e["ground_state_sigma"].get<double>(), e["sigma2_coth"].get<double>(), e["sigma2_closed_form"].get<double>()});
    } else {
      results[i] = c.thermal ? simulate_thermal(c) : simulate(c);
    }
  });

  SweepOutput out;
  for (const auto& axis : axes) out.table.header.push_back(axis.name);
  if (!results.empty())
    for (const auto& h : results.front().table.header) out.table.header.push_back(h);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.stops.push_back(results[i].stop);
    for (const auto& row : results[i].table.rows) {
      std::vector<double> full = points[i];
      full.insert(full.end(), row.begin(), row.end());
      out.table.rows.push_back(std::move(full));
    }
  }
  return out;
}

json equilibrium_report(const PhysicalParams& p) {
  json out;
  const double sg = ground_state_sigma(p);
  out["ground_state_sigma"] = sg;
  out["ground_state_sigma2"] = sg * sg;
  out["zero_temperature"] = p.beta.is_zero_temperature();
  if (p.beta.is_zero_temperature()) {
    // both thermal forms tend to the ground state as beta -> infinity
    out["beta"] = nullptr;
    out["sigma2_coth"] = sg * sg;
    out["sigma2_closed_form"] = sg * sg;
  } else {
    const double beta = p.beta.value();
    out["beta"] = beta;
    out["sigma2_coth"] = analytic::equilibrium_coth(beta, p);
    out["sigma2_closed_form"] = analytic::equilibrium_closed_form(beta, p);
  }
  const double c = out["sigma2_coth"].get<double>(), e = out["sigma2_closed_form"].get<double>();
  out["relative_gap_closed_form_vs_coth"] = std::abs(e - c) / c;
  return out;
}

json run_summary(const std::string& command, const RunConfig& config, const RunOutput& output) {
  json s;
  s["command"] = command;
  if (config.model) s["model"] = std::string(to_string(*config.model));
  if (command == "thermal" && config.thermal) s["thermal_variant"] = std::string(to_string(config.thermal->variant));
  s["stop_reason"] = std::string(to_string(output.stop));
  s["t_span"] = {config.span.t0, config.span.t1};
  s["reached_time"] = output.reached_time;
  s["scheme"] = std::string(to_string(config.integrator.scheme));
  s["rows"] = output.table.rows.size();
  s["stats"] = {{"accepted", output.stats.accepted},
                {"rejected", output.stats.rejected},
                {"rhs_evaluations", output.stats.rhs_evaluations},
                {"jacobian_evaluations", output.stats.jacobian_evaluations},
                {"newton_failures", output.stats.newton_failures}};
  s["warnings"] = output.warnings;
  return s;
}

namespace {

struct Globals {
  std::string config;
  std::string out{"."};
  bool quiet{false};
  unsigned jobs{1};
};

RunConfig require_config(const Globals& g) {
  if (g.config.empty()) throw ConfigError("", "--config is required");
  return load_config(g.config);
}

int finish_run(const std::string& command, const RunConfig& c, const RunOutput& r, const Globals& g,
               std::ostream& out) {
  const fs::path dir(g.out);
  fs::create_directories(dir);
  const fs::path csv = resolve(dir, c.output.csv);
  write_csv(csv, r.table);
  if (c.output.svg) write_svg(resolve(dir, *c.output.svg), chart_from_table(r.table, command));
  write_json(resolve(dir, c.output.summary), run_summary(command, c, r));
  if (!g.quiet) {
    out << command << ": " << to_string(r.stop) << ", " << r.table.rows.size() << " rows -> " << csv.string() << '\n';
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  }
  return r.stop == StopReason::ReachedEnd ? kExitOk : kExitIntegration;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian wave-packet width equations: simulation and verification"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "output directory");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.add_option("--jobs", g.jobs, "concurrent runs for sweep and verify")->check(CLI::Range(1u, 256u));

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate one width equation");
  auto* thermal_cmd = app.add_subcommand("thermal", "integrate a thermal field on a beta grid");
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  auto* equilibrium_cmd = app.add_subcommand("equilibrium", "print closed-form equilibria");
  auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
  std::string suite = "all";
  std::optional<double> rel_tol;
  verify_cmd->add_option("suite", suite, "suite name or all");
  verify_cmd->add_option("--rel-tol", rel_tol, "override every integrator tolerance");
  auto* plot_cmd = app.add_subcommand("plot", "render an existing CSV as SVG");
  std::string plot_input;
  plot_cmd->add_option("csv", plot_input, "CSV file")->required();
  for (auto* sub : {simulate_cmd, thermal_cmd, sweep_cmd, equilibrium_cmd, verify_cmd, plot_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate_cmd) {
      const RunConfig c = require_config(g);
      return finish_run("simulate", c, simulate(c), g, out);
    }
    if (*thermal_cmd) {
      const RunConfig c = require_config(g);
      return finish_run("thermal", c, simulate_thermal(c), g, out);
    }
    if (*sweep_cmd) {
      const RunConfig c = require_config(g);
      const SweepOutput s = sweep(c, g.jobs);
      RunOutput summary_view;
      summary_view.table = s.table;
      summary_view.stop = StopReason::ReachedEnd;
      for (StopReason r : s.stops)
        if (r != StopReason::ReachedEnd) summary_view.stop = r;
      summary_view.reached_time = c.span.t1;
      const fs::path dir(g.out);
      fs::create_directories(dir);
      write_csv(resolve(dir, c.output.csv), s.table);
      if (c.output.svg && s.table.has_column("t"))
        write_svg(resolve(dir, *c.output.svg), chart_from_table(s.table, "sweep"));
      json summary = run_summary("sweep", c, summary_view);
      summary.erase("stats");
      summary.erase("reached_time");
      json stops = json::array();
      for (StopReason r : s.stops) stops.push_back(std::string(to_string(r)));
      summary["point_stop_reasons"] = stops;
      write_json(resolve(dir, c.output.summary), summary);
      if (!g.quiet)
        out << "sweep: " << s.stops.size() << " points, " << s.table.rows.size() << " rows -> "
            << resolve(dir, c.output.csv).string() << '\n';
      return summary_view.stop == StopReason::ReachedEnd ? kExitOk : kExitIntegration;
    }
    if (*equilibrium_cmd) {
      const PhysicalParams p = g.config.empty() ? make_natural_params(0, 0, 0) : require_config(g).params;
      const json report = equilibrium_report(p);
      out << report.dump(2) << '\n';
      return kExitOk;
    }
    if (*verify_cmd) {
      VerifyOptions opts;
      opts.rel_tol = rel_tol;
      opts.jobs = g.jobs;
      if (rel_tol && !(*rel_tol > 0)) throw ConfigError("--rel-tol", "must be > 0");
      const auto& names = suite_names();
      if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("suite", "unknown verification suite \"" + suite + "\"");
      const auto results = run_verification(suite, opts);
      const fs::path dir(g.out);
      fs::create_directories(dir);
      write_json(dir / "verify_report.json", report_json(suite, results));
      if (!g.quiet) {
        for (const auto& r : results)
          out << (r.informational ? "INFO" : r.passed ? "PASS" : "FAIL") << ' ' << r.suite << '/' << r.name
              << " measured=" << format_number(r.measured) << ' ' << r.comparison << ' '
              << format_number(r.tolerance) << (r.detail.empty() ? "" : "  (" + r.detail + ")") << '\n';
      }
      const bool ok = all_passed(results);
      if (!g.quiet) out << "verify " << suite << ": " << (ok ? "PASS" : "FAIL") << '\n';
      return ok ? kExitOk : kExitVerify;
    }
    if (*plot_cmd) {
      const Table t = read_csv(fs::path(plot_input));
      const fs::path dir(g.out);
      fs::create_directories(dir);
      const fs::path target = dir / fs::path(plot_input).filename().replace_extension(".svg");
      write_svg(target, chart_from_table(t, fs::path(plot_input).stem().string()));
      if (!g.quiet) out << "plot: " << target.string() << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace ermakov::app
