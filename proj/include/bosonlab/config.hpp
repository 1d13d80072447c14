#ifndef BOSONLAB_CONFIG_HPP
#define BOSONLAB_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bosonlab/errors.hpp"
#include "bosonlab/grid.hpp"
#include "bosonlab/model.hpp"
#include "bosonlab/report_io.hpp"
#include "bosonlab/sampler.hpp"
#include "bosonlab/test_function.hpp"

namespace bosonlab {

struct ExperimentConfig {
  int grid_d = 3;
  double grid_L = 4.0;
  int grid_N = 64;

  double beta = 1.0;
  std::string phase = "bec";  // "bec" | "normal"
  double rho = 0.0;
  double z = 0.0;

  std::string shape = "box";  // "box" | "ball" | "bump" | "csv"
  std::vector<double> center;  // defaults to box midpoint
  double halfwidth = 0.0;      // box
  double radius = 0.0;         // ball/bump
  double height = 1.0;
  std::string csv_path;        // shape == "csv": one value per line

  std::vector<double> kappas;
  std::vector<double> t_panel;
  std::vector<double> s_grid;

  std::size_t n_samples = 2000;
  std::uint64_t seed = 0;
  std::string variant = "shifted_field";  // or "superposition"

  std::string out_dir = "out";
  std::vector<std::string> formats = {"csv", "json"};
};

namespace cfg_detail {
template <class T>
T require(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(path + key, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key, "wrong type");
  }
}
template <class T>
T optional(const json& j, const std::string& path, const std::string& key,
           T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key, "wrong type");
  }
}
}  // namespace cfg_detail

inline ExperimentConfig config_from_json(const json& j) {
  using namespace cfg_detail;
  ExperimentConfig c;
  if (!j.contains("grid")) throw ConfigError("grid", "missing section");
  c.grid_d = require<int>(j["grid"], "grid.", "d");
  c.grid_L = require<double>(j["grid"], "grid.", "L");
  c.grid_N = require<int>(j["grid"], "grid.", "N");
  if (!j.contains("model")) throw ConfigError("model", "missing section");
  c.beta = require<double>(j["model"], "model.", "beta");
  c.phase = require<std::string>(j["model"], "model.", "phase");
  c.rho = optional<double>(j["model"], "model.", "rho", 0.0);
  c.z = optional<double>(j["model"], "model.", "z", 0.0);
  if (!j.contains("profile")) throw ConfigError("profile", "missing section");
  c.shape = require<std::string>(j["profile"], "profile.", "shape");
  c.center = optional<std::vector<double>>(j["profile"], "profile.", "center",
                                           {});
  c.halfwidth = optional<double>(j["profile"], "profile.", "halfwidth", 0.0);
  c.radius = optional<double>(j["profile"], "profile.", "radius", 0.0);
  c.height = optional<double>(j["profile"], "profile.", "height", 1.0);
  c.csv_path = optional<std::string>(j["profile"], "profile.", "csv_path", "");
  c.kappas = optional<std::vector<double>>(j, "", "kappas", {});
  c.t_panel = optional<std::vector<double>>(j, "", "t_panel", {});
  c.s_grid = optional<std::vector<double>>(j, "", "s_grid", {});
  if (j.contains("mc")) {
    c.n_samples = optional<std::size_t>(j["mc"], "mc.", "n_samples", 2000);
    c.seed = optional<std::uint64_t>(j["mc"], "mc.", "seed", 0);
    c.variant = optional<std::string>(j["mc"], "mc.", "variant",
                                      "shifted_field");
  }
  if (j.contains("output")) {
    c.out_dir = optional<std::string>(j["output"], "output.", "directory",
                                      "out");
    c.formats = optional<std::vector<std::string>>(j["output"], "output.",
                                                   "formats", {"csv", "json"});
  }
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["grid"] = {{"d", c.grid_d}, {"L", c.grid_L}, {"N", c.grid_N}};
  j["model"] = {{"beta", c.beta}, {"phase", c.phase}};
  if (c.phase == "bec") j["model"]["rho"] = c.rho;
  if (c.phase == "normal") j["model"]["z"] = c.z;
  j["profile"] = {{"shape", c.shape}, {"height", c.height}};
  if (!c.center.empty()) j["profile"]["center"] = c.center;
  if (c.halfwidth > 0.0) j["profile"]["halfwidth"] = c.halfwidth;
  if (c.radius > 0.0) j["profile"]["radius"] = c.radius;
  if (!c.csv_path.empty()) j["profile"]["csv_path"] = c.csv_path;
  j["kappas"] = c.kappas;
  j["t_panel"] = c.t_panel;
  j["s_grid"] = c.s_grid;
  j["mc"] = {{"n_samples", c.n_samples},
             {"seed", c.seed},
             {"variant", c.variant}};
  j["output"] = {{"directory", c.out_dir}, {"formats", c.formats}};
  return j;
}

// dotted-path override, value parsed as JSON when possible, else as string
inline void apply_override(json& j, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError(kv, "override must have the form key=value");
  const std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError(key, "empty path segment");
    if (dot == std::string::npos) {
      json parsed = json::parse(val, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? json(val) : parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

struct BuiltExperiment {
  Grid grid;
  ModelParams model;
  TestFunction profile;
  MeasureId measure = MeasureId::Bec;
};

// Validates every module precondition up front, naming the offending field.
// The thermal-resolution guard is enforced only for pipelines that evaluate
// the kappa-scaled kernel (CGF sweeps, CLT/LLN sampling); the lemma audit
// checks grid-exact identities and is exempt.
inline BuiltExperiment build_experiment(const ExperimentConfig& c,
                                        bool enforce_resolution_guard = true) {
  BuiltExperiment b;
  try {
    b.grid = make_grid(c.grid_d, c.grid_L, c.grid_N);
  } catch (const DimensionTooLow& e) {
    throw ConfigError("grid.d", e.what());
  } catch (const BadResolution& e) {
    throw ConfigError("grid.N", e.what());
  }
  if (!(c.beta > 0.0)) throw ConfigError("model.beta", "must be positive");
  if (c.phase == "bec") {
    try {
      b.model = make_bec_params(b.grid, c.beta, c.rho);
    } catch (const NotCondensed& e) {
      throw ConfigError("model.rho", e.what());
    }
    b.measure = MeasureId::Bec;
  } else if (c.phase == "normal") {
    try {
      b.model = make_normal_params(b.grid, c.beta, c.z);
    } catch (const BadFugacity& e) {
      throw ConfigError("model.z", e.what());
    }
    b.measure = MeasureId::NormalDet;
  } else {
    throw ConfigError("model.phase", "must be \"bec\" or \"normal\"");
  }
  std::vector<double> center = c.center;
  if (center.empty())
    center.assign(static_cast<std::size_t>(c.grid_d), 0.5 * c.grid_L);
  if (static_cast<int>(center.size()) != c.grid_d)
    throw ConfigError("profile.center", "dimension mismatch");
  try {
    if (c.shape == "box") {
      if (!(c.halfwidth > 0.0))
        throw ConfigError("profile.halfwidth", "must be positive");
      b.profile = make_box_profile(b.grid, center, c.halfwidth, c.height);
    } else if (c.shape == "ball") {
      if (!(c.radius > 0.0))
        throw ConfigError("profile.radius", "must be positive");
      b.profile = make_ball_profile(b.grid, center, c.radius, c.height);
    } else if (c.shape == "bump") {
      if (!(c.radius > 0.0))
        throw ConfigError("profile.radius", "must be positive");
      b.profile = make_bump_profile(b.grid, center, c.radius, c.height);
    } else if (c.shape == "csv") {
      std::ifstream is(c.csv_path);
      if (!is) throw ConfigError("profile.csv_path", "cannot open file");
      std::vector<double> vals;
      double v;
      while (is >> v) vals.push_back(v);
      if (vals.size() != b.grid.cell_count())
        throw ConfigError("profile.csv_path",
                          "value count does not match the grid");
      b.profile = make_test_function(b.grid, std::move(vals));
    } else {
      throw ConfigError("profile.shape", "unknown shape");
    }
  } catch (const SupportNotCompact& e) {
    throw ConfigError("profile", e.what());
  } catch (const NegativeWeight& e) {
    throw ConfigError("profile", e.what());
  }
  for (double k : c.kappas)
    if (!(k >= 1.0)) throw ConfigError("kappas", "entries must be >= 1");
  if (enforce_resolution_guard && !c.kappas.empty()) {
    const double kmax = *std::max_element(c.kappas.begin(), c.kappas.end());
    if (std::sqrt(c.beta) / kmax < b.grid.spacing * (1.0 - 1e-12))
      throw ConfigError("kappas",
                        "resolution guard: sqrt(beta)/kappa_max below grid "
                        "spacing");
  }
  if (c.variant != "shifted_field" && c.variant != "superposition")
    throw ConfigError("mc.variant",
                      "must be \"shifted_field\" or \"superposition\"");
  return b;
}

inline std::string config_hash(const ExperimentConfig& c) {
  return fnv1a_hex(config_to_json(c).dump());
}

}  // namespace bosonlab

#endif
