#include "config.hpp"

#include "quenchlab/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace quenchlab::cli {

namespace {

const std::vector<std::pair<std::string, std::string>>& defaults() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"domain.dimension", "1"},
      {"domain.x_lo", "0"},
      {"domain.x_hi", "1"},
      {"domain.nx", "199"},
      {"domain.y_lo", "0"},
      {"domain.y_hi", "1"},
      {"domain.ny", "49"},
      {"model.f", "power"},
      {"model.f_p", "2"},
      {"model.g", "power"},
      {"model.g_p", "2"},
      {"model.alpha", "constant"},
      {"model.alpha_c", "1"},
      {"model.alpha_k", "1"},
      {"model.alpha_x0", "0.5"},
      {"model.alpha_y0", "0.5"},
      {"model.alpha_kappa", "1"},
      {"model.beta", "constant"},
      {"model.beta_c", "1"},
      {"model.beta_k", "1"},
      {"model.beta_x0", "0.5"},
      {"model.beta_y0", "0.5"},
      {"model.beta_kappa", "1"},
      {"model.lambda", "0.5"},
      {"model.mu", "0.5"},
      {"init.recipe", "zero"},
      {"init.s", "0.5"},
      {"init.eps", "0.1"},
      {"init.u_amplitude", "0"},
      {"init.v_amplitude", "0"},
      {"run.horizon", "5"},
      {"run.dt_init", "1e-4"},
      {"run.dt_min", "1e-12"},
      {"run.dt_max", "1e-2"},
      {"run.safety", "0.9"},
      {"run.tol_step", "1e-6"},
      {"run.delta_q", "1e-3"},
      {"run.quench_cap", "0.25"},
      {"run.snapshot_stride", "0"},
      {"run.adaptive", "true"},
      {"run.coupling_scale", "1"},
      {"run.lambda_samples", ""},
      {"run.lambda_count", "16"},
      {"run.bisect_tol", "1e-3"},
      {"run.floor_fraction", "1e-6"},
      {"run.max_iter", "10000"},
      {"run.max_iter_cap", "160000"},
      {"run.tol_stat", "1e-10"},
      {"run.tol_res", "1e-8"},
      {"run.delta_blow", "1e-4"},
      {"run.seed_amplitude", "0.5"},
      {"run.seeds", "4"},
  };
  return table;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

class Values {
 public:
  explicit Values(std::map<std::string, std::string> v) : v_(std::move(v)) {}

  const std::string& text(const std::string& key) const { return v_.at(key); }

  double number(const std::string& key) const {
    const std::string& s = text(key);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + s + "'");
    }
    if (used != s.size()) throw ConfigError(key, "expected a number, got '" + s + "'");
    return x;
  }

  int integer(const std::string& key) const {
    const double x = number(key);
    if (x != static_cast<double>(static_cast<int>(x))) {
      throw ConfigError(key, "expected an integer, got '" + text(key) + "'");
    }
    return static_cast<int>(x);
  }

  bool flag(const std::string& key) const {
    const std::string& s = text(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + s + "'");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::size_t used = 0;
      try {
        out.push_back(std::stod(item, &used));
      } catch (const std::exception&) {
        throw ConfigError(key, "bad list entry '" + item + "'");
      }
      if (used != item.size()) throw ConfigError(key, "bad list entry '" + item + "'");
    }
    return out;
  }

 private:
  std::map<std::string, std::string> v_;
};

Nonlinearity nonlinearity(const Values& v, const std::string& name) {
  const std::string key = "model." + name;
  const std::string& family = v.text(key);
  if (family == "log") return Nonlinearity::log_family();
  if (family == "exp") return Nonlinearity::exp_family();
  if (family == "power") {
    const double p = v.number(key + "_p");
    if (!(p > 0.0)) throw ConfigError(key + "_p", "exponent must be positive");
    return Nonlinearity::power(p);
  }
  throw ConfigError(key, "unknown family '" + family + "' (log, exp, power)");
}

Profile profile(const Values& v, const std::string& name) {
  const std::string key = "model." + name;
  const std::string& family = v.text(key);
  const double c = v.number(key + "_c");
  if (family == "constant") return Profile::constant(c);
  if (family == "bump") {
    return Profile::bump(c, v.number(key + "_k"), v.number(key + "_x0"), v.number(key + "_y0"));
  }
  if (family == "power_dist") return Profile::power_dist(c, v.number(key + "_kappa"));
  throw ConfigError(key, "unknown profile '" + family + "' (constant, bump, power_dist)");
}

InitialData recipe(const Values& v) {
  const std::string& name = v.text("init.recipe");
  if (name == "zero") return initial::Zero{};
  if (name == "scaled_minimal") return initial::ScaledMinimal{v.number("init.s")};
  if (name == "convex_combo") return initial::ConvexCombo{v.number("init.s")};
  if (name == "above_second") return initial::AboveSecond{v.number("init.eps")};
  if (name == "sine") return initial::Sine{v.number("init.u_amplitude"), v.number("init.v_amplitude")};
  throw ConfigError("init.recipe",
                    "unknown recipe '" + name + "' (zero, scaled_minimal, convex_combo, above_second, sine)");
}

RunConfig build(std::map<std::string, std::string> values) {
  RunConfig c;
  for (const auto& [key, fallback] : defaults()) c.resolved.emplace_back(key, values.at(key));
  const Values v(std::move(values));

  c.domain.dimension = v.integer("domain.dimension");
  if (c.domain.dimension != 1 && c.domain.dimension != 2) {
    throw ConfigError("domain.dimension", "only 1 and 2 are supported");
  }
  c.domain.x = {v.number("domain.x_lo"), v.number("domain.x_hi")};
  c.domain.nx = v.integer("domain.nx");
  c.domain.y = {v.number("domain.y_lo"), v.number("domain.y_hi")};
  c.domain.ny = v.integer("domain.ny");
  if (!(c.domain.x.hi > c.domain.x.lo)) throw ConfigError("domain.x_hi", "must exceed x_lo");
  if (c.domain.nx < 1) throw ConfigError("domain.nx", "need at least one interior node");
  if (c.domain.dimension == 2) {
    if (!(c.domain.y.hi > c.domain.y.lo)) throw ConfigError("domain.y_hi", "must exceed y_lo");
    if (c.domain.ny < 1) throw ConfigError("domain.ny", "need at least one interior node");
  }

  c.model.f = nonlinearity(v, "f");
  c.model.g = nonlinearity(v, "g");
  c.model.alpha = profile(v, "alpha");
  c.model.beta = profile(v, "beta");
  c.params = {v.number("model.lambda"), v.number("model.mu")};
  if (!(c.params.lambda > 0.0)) throw ConfigError("model.lambda", "must be positive");
  if (!(c.params.mu > 0.0)) throw ConfigError("model.mu", "must be positive");

  c.initial = recipe(v);

  c.horizon = v.number("run.horizon");
  if (!(c.horizon > 0.0)) throw ConfigError("run.horizon", "must be positive");
  c.stepper.dt_init = v.number("run.dt_init");
  c.stepper.dt_min = v.number("run.dt_min");
  c.stepper.dt_max = v.number("run.dt_max");
  c.stepper.safety = v.number("run.safety");
  c.stepper.tol_step = v.number("run.tol_step");
  c.stepper.delta_q = v.number("run.delta_q");
  c.stepper.quench_cap = v.number("run.quench_cap");
  c.stepper.snapshot_stride = v.integer("run.snapshot_stride");
  c.stepper.adaptive = v.flag("run.adaptive");
  try {
    validate(c.stepper);
  } catch (const PreconditionViolation& e) {
    throw ConfigError("run.dt_init", e.what());
  }
  c.coupling_scale = v.number("run.coupling_scale");

  c.lambda_samples = v.list("run.lambda_samples");
  const int count = v.integer("run.lambda_count");
  if (c.lambda_samples.empty() && count < 1) throw ConfigError("run.lambda_count", "must be positive");
  // Negative marks "evenly spaced below the lambda intercept", resolved per command.
  if (c.lambda_samples.empty()) c.lambda_samples.assign(static_cast<std::size_t>(count), -1.0);
  for (double l : c.lambda_samples) {
    if (l == 0.0) throw ConfigError("run.lambda_samples", "samples must be positive");
  }

  c.curve.bisect_tol = v.number("run.bisect_tol");
  c.curve.floor_fraction = v.number("run.floor_fraction");
  c.curve.max_iter = v.integer("run.max_iter");
  c.curve.max_iter_cap = v.integer("run.max_iter_cap");
  c.curve.tol_stat = v.number("run.tol_stat");
  c.curve.delta_blow = v.number("run.delta_blow");
  if (!(c.curve.bisect_tol > 0.0)) throw ConfigError("run.bisect_tol", "must be positive");
  if (c.curve.max_iter < 1) throw ConfigError("run.max_iter", "must be positive");

  c.monotone.tol_stat = c.curve.tol_stat;
  c.monotone.max_iter = c.curve.max_iter;
  c.monotone.delta_blow = c.curve.delta_blow;
  c.monotone.tol_res = v.number("run.tol_res");

  c.second.seed_amplitude = v.number("run.seed_amplitude");
  c.second.seeds = v.integer("run.seeds");
  c.second.tol_res = c.monotone.tol_res;
  c.second.delta_blow = c.curve.delta_blow;
  return c;
}

void apply_override(std::map<std::string, std::string>& values, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos) throw ConfigError(item, "override must look like section.key=value");
  const std::string key = trim(item.substr(0, eq));
  if (!values.count(key)) throw ConfigError(key, "unknown key");
  values[key] = trim(item.substr(eq + 1));
}

}  // namespace

Grid DomainSpec::grid() const {
  return dimension == 1 ? Grid::interval(x.lo, x.hi, nx) : Grid::rectangle(x, nx, y, ny);
}

nlohmann::json RunConfig::echo() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : resolved) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = value;
  }
  return j;
}

std::vector<std::string> RunConfig::comment_lines() const {
  std::vector<std::string> out;
  out.reserve(resolved.size());
  for (const auto& [key, value] : resolved) out.push_back("config " + key + " = " + value);
  return out;
}

RunConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> values(defaults().begin(), defaults().end());
  if (!trim(ini_text).empty()) {
    boost::property_tree::ptree tree;
    std::istringstream in(ini_text);
    try {
      boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("file", e.message());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) throw ConfigError(section, "key outside of a section");
      for (const auto& [name, leaf] : body) {
        const std::string key = section + "." + name;
        if (!values.count(key)) throw ConfigError(key, "unknown key");
        values[key] = trim(leaf.data());
      }
    }
  }
  for (const auto& o : overrides) apply_override(values, o);
  return build(std::move(values));
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config(text, overrides);
}

}  // namespace quenchlab::cli
