#include "fsi/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& doc, std::string name) : name_(std::move(name)) {
    if (!doc.contains(name_)) return;
    node_ = &doc.at(name_);
    if (!node_->is_object()) throw ConfigError(name_ + ": section must be an object");
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return fallback;
    try {
      return node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type (" + node_->at(key).dump() + ")");
    }
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  void reject_unknown() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

void one_of(const std::string& value, const std::vector<std::string>& allowed, const std::string& field) {
  if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  throw ConfigError(field + ": '" + value + "' is not one of " + list);
}

}  // namespace

bool RunConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    one_of(it.key(), {"geometry", "physics", "experiment", "output"}, "config");
  RunConfig cfg;
  cfg.source = doc;

  Section geo(doc, "geometry");
  const auto mode = geo.get<std::string>("dim_mode", "analogue2d");
  try {
    cfg.geometry.dim_mode = dim_mode_from_string(mode);
  } catch (const std::exception&) {
    throw ConfigError(geo.field("dim_mode") + ": '" + mode + "' is not one of analogue2d, box3d");
  }
  cfg.geometry.n = geo.get<int>("n", 8);
  require(cfg.geometry.n >= 2, geo.field("n"), "must be >= 2");
  geo.reject_unknown();

  Section phys(doc, "physics");
  cfg.rho = phys.get<double>("rho", 0.0);
  require(std::isfinite(cfg.rho) && cfg.rho >= 0.0, phys.field("rho"),
          "must be finite and >= 0, got " + std::to_string(cfg.rho));
  phys.reject_unknown();

  Section exp(doc, "experiment");
  cfg.experiment = exp.get<std::string>("name", "validate");
  one_of(cfg.experiment, experiment_names(), exp.field("name"));
  const int seed = exp.get<int>("seed", 1);
  require(seed >= 0, exp.field("seed"), "must be >= 0");
  cfg.seed = static_cast<unsigned>(seed);
  const int threads = exp.get<int>("threads", 1);
  require(threads >= 1, exp.field("threads"), "must be >= 1");
  cfg.threads = static_cast<unsigned>(threads);

  const std::string& e = cfg.experiment;
  if (e == "validate") {
    cfg.validate_samples = exp.get<int>("samples", 100);
    require(cfg.validate_samples >= 1, exp.field("samples"), "must be >= 1");
  } else if (e == "spectrum") {
    cfg.spectrum_count = exp.get<int>("count", -1);
    require(cfg.spectrum_count != 0, exp.field("count"), "must be positive or -1 for all");
  } else if (e == "simulate") {
    auto& s = cfg.simulate;
    s.t_final = exp.get<double>("t_final", s.t_final);
    require(s.t_final > 0.0, exp.field("t_final"), "must be > 0");
    s.dt = exp.get<double>("dt", s.dt);
    require(s.dt >= 0.0, exp.field("dt"), "must be >= 0 (0 selects h^2/4)");
    s.scheme = exp.get<std::string>("scheme", s.scheme);
    one_of(s.scheme, {"implicit_midpoint", "backward_euler"}, exp.field("scheme"));
    s.initial = exp.get<std::string>("initial", s.initial);
    one_of(s.initial, {"random", "slowest"}, exp.field("initial"));
    s.snapshot_every = exp.get<int>("snapshot_every", 0);
    require(s.snapshot_every >= 0, exp.field("snapshot_every"), "must be >= 0");
    s.fit_window = exp.get<double>("fit_window", s.fit_window);
    require(s.fit_window >= 0.0 && s.fit_window < 1.0, exp.field("fit_window"), "must be in [0, 1)");
    s.fit = exp.get<std::string>("fit", s.fit);
    one_of(s.fit, {"auto", "exponential", "rational"}, exp.field("fit"));
  } else if (e == "sweep") {
    auto& s = cfg.sweep;
    s.linear_points = exp.get<int>("linear_points", s.linear_points);
    s.linear_max = exp.get<double>("linear_max", s.linear_max);
    s.log_points = exp.get<int>("log_points", s.log_points);
    s.beta_max = exp.get<double>("beta_max", s.beta_max);
    require(s.linear_points >= 2, exp.field("linear_points"), "must be >= 2");
    require(s.linear_max > 0.0, exp.field("linear_max"), "must be > 0");
    require(s.log_points >= 0, exp.field("log_points"), "must be >= 0");
    require(s.beta_max == 0.0 || s.beta_max > s.linear_max, exp.field("beta_max"),
            "must be 0 (automatic) or exceed linear_max");
  } else if (e == "invert") {
    auto& s = cfg.invert;
    s.samples = exp.get<int>("samples", s.samples);
    require(s.samples >= 1, exp.field("samples"), "must be >= 1");
    s.betas = exp.get<std::vector<double>>("betas", s.betas);
    require(!s.betas.empty(), exp.field("betas"), "must not be empty");
  } else if (e == "lqr") {
    auto& s = cfg.lqr;
    s.control = exp.get<std::string>("control", s.control);
    one_of(s.control, {"point", "boundary"}, exp.field("control"));
    if (const json* loc = exp.raw("locations")) {
      require(loc->is_array() && !loc->empty(), exp.field("locations"), "must be a non-empty array");
      s.locations.clear();
      for (const auto& p : *loc) {
        require(p.is_array() && !p.empty() && p.size() <= 2 &&
                    std::all_of(p.begin(), p.end(), [](const json& v) { return v.is_number(); }),
                exp.field("locations"), "each location is an array of 1 or 2 numbers");
        std::array<double, 2> xi{0.5, 0.5};
        for (std::size_t k = 0; k < p.size(); ++k) xi[k] = p[k].get<double>();
        s.locations.push_back(xi);
      }
    }
    s.weights = exp.get<std::vector<double>>("weights", s.weights);
    s.sigma = exp.get<std::vector<Eigen::Index>>("sigma", s.sigma);
    s.observation = exp.get<std::string>("observation", s.observation);
    one_of(s.observation, {"identity", "plate"}, exp.field("observation"));
    s.horizon = exp.get<double>("horizon", s.horizon);
    require(s.horizon >= 0.0, exp.field("horizon"), "must be >= 0 (0 is infinite)");
    s.steps = exp.get<int>("steps", s.steps);
    require(s.steps >= 1, exp.field("steps"), "must be >= 1");
    s.cost_samples = exp.get<int>("cost_samples", s.cost_samples);
    require(s.cost_samples >= 0, exp.field("cost_samples"), "must be >= 0");
    s.cost_dt = exp.get<double>("cost_dt", s.cost_dt);
    require(s.cost_dt > 0.0, exp.field("cost_dt"), "must be > 0");
    s.gain_grids = exp.get<std::vector<int>>("gain_grids", s.gain_grids);
    for (int n : s.gain_grids) require(n >= 2, exp.field("gain_grids"), "grid sizes must be >= 2");
  }
  exp.reject_unknown();

  Section out(doc, "output");
  cfg.output_directory = out.get<std::string>("directory", cfg.output_directory);
  require(!cfg.output_directory.empty(), out.field("directory"), "must not be empty");
  cfg.formats = out.get<std::vector<std::string>>("formats", cfg.formats);
  for (const auto& f : cfg.formats) one_of(f, {"csv", "json"}, out.field("formats"));
  out.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& err) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + err.what());
  }
  return parse_config(doc);
}

void apply_environment(RunConfig& cfg) {
  if (const char* dir = std::getenv("FSI_OUTPUT_DIR"); dir && *dir) cfg.output_directory = dir;
  if (const char* threads = std::getenv("FSI_THREADS"); threads && *threads) {
    char* end = nullptr;
    const long t = std::strtol(threads, &end, 10);
    if (*end != '\0' || t < 1) throw ConfigError(std::string("FSI_THREADS: expected a positive integer, got '") + threads + "'");
    cfg.threads = static_cast<unsigned>(t);
  }
}

}  // namespace fsi
