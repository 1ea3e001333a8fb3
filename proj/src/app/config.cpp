#include "ermakov/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "ermakov/app/csv.hpp"

namespace ermakov::app {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads the members of one JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string key_path(const std::string& key) const { return join(path_, key); }
  const std::string& path() const { return path_; }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = at(key);
    if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(key_path(key), "must be finite");
    return d;
  }

  std::optional<std::size_t> count(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(key_path(key), "expected a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = at(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown key");
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

PhysicalParams parse_params(const json& node) {
  ObjectReader r(node, "params");
  PhysicalParams p;
  if (r.has("natural")) {
    for (const char* key : {"m", "omega0", "hbar", "b", "beta", "temperature", "k_B", "r"})
      if (r.has(key)) throw ConfigError(r.key_path(key), "cannot be combined with params.natural");
    ObjectReader n(r.at("natural"), "params.natural");
    const double gamma = n.number("gamma").value_or(0.0);
    const double theta = n.number("theta").value_or(0.0);
    const double epsilon = n.number("epsilon").value_or(0.0);
    n.finish();
    try {
      p = make_natural_params(gamma, theta, epsilon);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("params.natural", e.what());
    }
  } else {
    if (auto v = r.number("m")) p.m = *v;
    if (auto v = r.number("omega0")) p.omega0 = *v;
    if (auto v = r.number("hbar")) p.hbar = *v;
    if (auto v = r.number("b")) p.b = *v;
    if (auto v = r.number("k_B")) p.k_B = *v;
    if (auto v = r.number("r")) p.r = *v;
    const auto beta = r.number("beta");
    const auto temperature = r.number("temperature");
    if (beta && temperature) throw ConfigError("params.temperature", "give either beta or temperature, not both");
    try {
      if (beta) p.beta = InverseTemperature<double>::finite(*beta);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("params.beta", e.what());
    }
    if (temperature) {
      if (*temperature < 0) throw ConfigError("params.temperature", "must be >= 0");
      p.beta = *temperature == 0 ? InverseTemperature<double>::zero_temperature()
                                 : InverseTemperature<double>::finite(1.0 / (p.k_B * *temperature));
    }
  }
  r.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("params", e.what());
  }
  return p;
}

IntegratorConfig parse_integrator(const json& node) {
  ObjectReader r(node, "integrator");
  IntegratorConfig c;
  if (auto s = r.string("scheme")) {
    if (*s == "explicit")
      c.scheme = Scheme::ExplicitAdaptive;
    else if (*s == "implicit")
      c.scheme = Scheme::ImplicitAStable;
    else
      throw ConfigError("integrator.scheme", "expected \"explicit\" or \"implicit\", got \"" + *s + "\"");
  }
  if (auto v = r.number("rel_tol")) c.rel_tol = *v;
  if (auto v = r.number("abs_tol")) c.abs_tol = *v;
  if (auto v = r.number("h_init")) c.h_init = *v;
  if (auto v = r.number("h_min")) c.h_min = *v;
  if (auto v = r.number("h_max")) c.h_max = *v;
  if (auto v = r.count("max_steps")) c.max_steps = *v;
  if (auto v = r.number("sigma_min_guard")) c.sigma_min_guard = *v;
  if (auto v = r.number("runaway_ratio")) c.runaway_ratio = *v;
  r.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("integrator", e.what());
  }
  return c;
}

ThermalSettings parse_thermal(const json& node) {
  ObjectReader r(node, "thermal");
  ThermalSettings t;
  if (auto v = r.string("variant")) {
    if (*v == "beta_derivative")
      t.variant = thermal::ThermalVariant::BetaDerivative;
    else if (*v == "beta_integral")
      t.variant = thermal::ThermalVariant::BetaIntegral;
    else
      throw ConfigError("thermal.variant", "expected \"beta_derivative\" or \"beta_integral\", got \"" + *v + "\"");
  }
  if (auto v = r.number("beta_min")) t.beta_min = *v;
  if (auto v = r.number("beta_max")) t.beta_max = *v;
  if (auto v = r.count("beta_count")) t.beta_count = static_cast<Eigen::Index>(*v);
  if (!(t.beta_min > 0)) throw ConfigError("thermal.beta_min", "must be > 0");
  if (!(t.beta_max > t.beta_min)) throw ConfigError("thermal.beta_max", "must be > beta_min");
  if (t.beta_count < thermal::BetaGrid::kMinNodes) throw ConfigError("thermal.beta_count", "must be >= 5");
  if (auto v = r.string("closure")) {
    if (*v == "exact_coth")
      t.exact_coth_closure = true;
    else if (*v != "linear_extrapolation")
      throw ConfigError("thermal.closure", "expected \"linear_extrapolation\" or \"exact_coth\"");
  }
  if (r.has("profile")) {
    ObjectReader pr(r.at("profile"), "thermal.profile");
    const std::string kind = pr.string("kind").value_or("coth");
    if (kind == "coth") {
      t.profile = ProfileKind::Coth;
    } else if (kind == "scaled_coth") {
      t.profile = ProfileKind::ScaledCoth;
      const auto f = pr.number("factor");
      if (!f) throw ConfigError("thermal.profile.factor", "required for scaled_coth");
      if (!(*f > 0)) throw ConfigError("thermal.profile.factor", "must be > 0");
      t.profile_factor = *f;
    } else if (kind == "constant") {
      t.profile = ProfileKind::Constant;
      const auto v = pr.number("value");
      if (!v) throw ConfigError("thermal.profile.value", "required for constant");
      if (!(*v > 0)) throw ConfigError("thermal.profile.value", "must be > 0");
      t.profile_value = *v;
    } else if (kind == "file") {
      t.profile = ProfileKind::File;
      const auto path = pr.string("path");
      if (!path) throw ConfigError("thermal.profile.path", "required for file");
      t.profile_path = *path;
    } else {
      throw ConfigError("thermal.profile.kind", "unknown profile \"" + kind + "\"");
    }
    pr.finish();
  }
  r.finish();
  return t;
}

SweepSettings parse_sweep(const json& node) {
  ObjectReader r(node, "sweep");
  SweepSettings s;
  if (auto q = r.string("quantity")) {
    if (*q == "trajectory")
      s.quantity = SweepQuantity::Trajectory;
    else if (*q == "equilibrium")
      s.quantity = SweepQuantity::Equilibrium;
    else
      throw ConfigError("sweep.quantity", "expected \"trajectory\" or \"equilibrium\"");
  }
  if (!r.has("parameters")) throw ConfigError("sweep.parameters", "required");
  const json& axes = r.at("parameters");
  if (!axes.is_array() || axes.empty() || axes.size() > 2)
    throw ConfigError("sweep.parameters", "expected an array of one or two axes");
  const auto& names = sweepable_parameters();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string path = "sweep.parameters[" + std::to_string(i) + "]";
    ObjectReader a(axes[i], path);
    SweepAxis axis;
    axis.name = a.string("name").value_or("");
    if (std::find(names.begin(), names.end(), axis.name) == names.end())
      throw ConfigError(path + ".name", "not a sweepable parameter: \"" + axis.name + "\"");
    for (const auto& other : s.axes)
      if (other.name == axis.name) throw ConfigError(path + ".name", "swept twice: \"" + axis.name + "\"");
    if (!a.has("values")) throw ConfigError(path + ".values", "required");
    const json& values = a.at("values");
    if (!values.is_array() || values.empty()) throw ConfigError(path + ".values", "expected a non-empty array");
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError(path + ".values", "expected numbers");
      axis.values.push_back(v.get<double>());
    }
    a.finish();
    s.axes.push_back(std::move(axis));
  }
  r.finish();
  return s;
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"m",     "omega0", "hbar",    "b",      "beta",      "temperature",
                                              "k_B",   "r",      "gamma",   "theta",  "epsilon",   "sigma0",
                                              "sigma_dot0"};
  return names;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  ObjectReader r(doc, "");
  RunConfig c;
  c.base_dir = base_dir;
  if (auto m = r.string("model")) {
    c.model = parse_model_variant(*m);
    if (!c.model) throw ConfigError("model", "unknown model variant \"" + *m + "\"");
  }
  c.params = r.has("params") ? parse_params(r.at("params")) : make_natural_params(0, 0, 0);
  if (r.has("initial")) {
    ObjectReader in(r.at("initial"), "initial");
    if (auto v = in.number("sigma")) c.initial.sigma = *v;
    if (auto v = in.number("sigma_dot")) c.initial.sigma_dot = *v;
    c.sigma_ddot = in.number("sigma_ddot");
    if (auto v = in.number("sigma_ddot_offset")) c.sigma_ddot_offset = *v;
    if (c.sigma_ddot && in.has("sigma_ddot_offset"))
      throw ConfigError("initial.sigma_ddot_offset", "give either sigma_ddot or sigma_ddot_offset, not both");
    in.finish();
    if (!(c.initial.sigma > 0)) throw ConfigError("initial.sigma", "must be > 0");
  }
  if (r.has("t_span")) {
    const json& span = r.at("t_span");
    if (!span.is_array() || span.size() != 2 || !span[0].is_number() || !span[1].is_number())
      throw ConfigError("t_span", "expected [t0, t1]");
    c.span = {span[0].get<double>(), span[1].get<double>()};
    if (!std::isfinite(c.span.t0) || !std::isfinite(c.span.t1) || !(c.span.t1 > c.span.t0))
      throw ConfigError("t_span", "need finite t0 < t1");
  }
  if (r.has("integrator")) c.integrator = parse_integrator(r.at("integrator"));
  if (auto n = r.count("samples")) {
    if (*n < 2) throw ConfigError("samples", "must be >= 2");
    c.samples = *n;
  }
  if (r.has("output")) {
    ObjectReader o(r.at("output"), "output");
    if (auto v = o.string("csv")) c.output.csv = *v;
    c.output.svg = o.string("svg");
    if (auto v = o.string("summary")) c.output.summary = *v;
    o.finish();
  }
  if (r.has("thermal")) c.thermal = parse_thermal(r.at("thermal"));
  if (r.has("sweep")) c.sweep = parse_sweep(r.at("sweep"));
  r.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, path.parent_path());
}

RunConfig with_parameter(const RunConfig& config, const std::string& name, double value) {
  RunConfig c = config;
  PhysicalParams& p = c.params;
  const std::string key = "sweep." + name;
  try {
    if (name == "m") p.m = value;
    else if (name == "omega0") p.omega0 = value;
    else if (name == "hbar") p.hbar = value;
    else if (name == "b") p.b = value;
    else if (name == "k_B") p.k_B = value;
    else if (name == "r") p.r = value;
    else if (name == "beta") p.beta = InverseTemperature<double>::finite(value);
    else if (name == "temperature") {
      if (value < 0) throw std::invalid_argument("temperature must be >= 0");
      p.beta = value == 0 ? InverseTemperature<double>::zero_temperature()
                          : InverseTemperature<double>::finite(1.0 / (p.k_B * value));
    } else if (name == "gamma") {
      if (value < 0) throw std::invalid_argument("gamma must be >= 0");
      p.b = value * p.m * p.omega0;
    } else if (name == "theta") {
      if (value < 0) throw std::invalid_argument("theta must be >= 0");
      p.beta = value == 0 ? InverseTemperature<double>::zero_temperature()
                          : InverseTemperature<double>::finite(1.0 / (value * p.hbar * p.omega0));
    } else if (name == "epsilon") {
      if (!(p.omega0 > 0)) throw std::invalid_argument("epsilon needs omega0 > 0");
      if (value < 0) throw std::invalid_argument("epsilon must be >= 0");
      p.r = value * p.m / p.omega0;
    } else if (name == "sigma0") {
      if (!(value > 0)) throw std::invalid_argument("sigma0 must be > 0");
      c.initial.sigma = value;
    } else if (name == "sigma_dot0") {
      c.initial.sigma_dot = value;
    } else {
      throw ConfigError(key, "not a sweepable parameter");
    }
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
  return c;
}

thermal::BelowGridClosure closure_for(const ThermalSettings& settings, const PhysicalParams& params) {
  if (!settings.exact_coth_closure) return thermal::BelowGridClosure::linear_extrapolation();
  return thermal::BelowGridClosure::fixed(thermal::coth_below_grid_integral(settings.beta_min, params));
}

thermal::ThermalField initial_profile(const ThermalSettings& settings, const thermal::BetaGrid& grid,
                                      const PhysicalParams& params, const std::filesystem::path& base_dir) {
  const Eigen::Index n = grid.size();
  switch (settings.profile) {
    case ProfileKind::Coth:
      return thermal::equilibrium_profile_coth(grid, params);
    case ProfileKind::ScaledCoth: {
      thermal::ThermalField f = thermal::equilibrium_profile_coth(grid, params);
      f.sigma *= settings.profile_factor;
      return f;
    }
    case ProfileKind::Constant:
      return {Vector::Constant(n, settings.profile_value), Vector::Zero(n)};
    case ProfileKind::File: {
      const auto path = settings.profile_path.is_absolute() ? settings.profile_path : base_dir / settings.profile_path;
      Table t;
      try {
        t = read_csv(path);
      } catch (const std::exception& e) {
        throw ConfigError("thermal.profile.path", e.what());
      }
      if (!t.has_column("beta") || !t.has_column("sigma"))
        throw ConfigError("thermal.profile.path", "profile file needs beta and sigma columns");
      if (static_cast<Eigen::Index>(t.rows.size()) != n)
        throw ConfigError("thermal.profile.path", "profile has " + std::to_string(t.rows.size()) +
                                                      " rows, grid has " + std::to_string(n) + " nodes");
      const std::size_t cb = t.column("beta"), cs = t.column("sigma");
      const bool has_dot = t.has_column("sigma_dot");
      thermal::ThermalField f{Vector(n), Vector::Zero(n)};
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto& row = t.rows[static_cast<std::size_t>(j)];
        if (std::abs(row[cb] - grid[j]) > 1e-9 * std::abs(grid[j]))
          throw ConfigError("thermal.profile.path", "beta of row " + std::to_string(j) + " does not match the grid");
        if (!(row[cs] > 0)) throw ConfigError("thermal.profile.path", "sigma must be > 0");
        f.sigma[j] = row[cs];
        if (has_dot) f.sigma_dot[j] = row[t.column("sigma_dot")];
      }
      return f;
    }
  }
  throw std::logic_error("initial_profile: unhandled kind");
}

}  // namespace ermakov::app
