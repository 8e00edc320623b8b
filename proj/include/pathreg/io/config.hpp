#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathreg/averaging/drift.hpp"
#include "pathreg/gauss/model.hpp"
#include "pathreg/occupation/exponent.hpp"
#include "pathreg/yode/solve.hpp"

namespace pathreg::io {

using json = nlohmann::json;

/// Usage error: malformed or missing config fields, reported with the field
/// path. The CLI maps these to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config: parse error in " + path + ": " + e.what());
  }
  return j;
}

template <typename T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field)) throw UsageError("config: missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: field '" + field + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: field '" + field + "' has the wrong type");
  }
}

// ---------- model ----------

inline gauss::GaussianModel model_from_json(const json& j) {
  gauss::GaussianModel model;
  const std::string kind = require<std::string>(j, "kind");
  if (kind == "fbm") {
    model.kind = gauss::FbmSpec{require<double>(j, "hurst")};
  } else if (kind == "plog") {
    model.kind = gauss::PLogBmSpec{require<double>(j, "p")};
  } else if (kind == "fbm_series") {
    gauss::FbmSeriesSpec s;
    s.lambdas = require<std::vector<double>>(j, "lambdas");
    s.hursts = require<std::vector<double>>(j, "hursts");
    model.kind = std::move(s);
  } else {
    throw UsageError("config: model.kind '" + kind + "' unknown (fbm | plog | fbm_series)");
  }
  model.dimension = get_or<int>(j, "dimension", 1);
  model.horizon = get_or<double>(j, "horizon", 1.0);
  try {
    model.validate();
  } catch (const std::exception& e) {
    throw UsageError(std::string("config: model: ") + e.what());
  }
  return model;
}

inline json model_to_json(const gauss::GaussianModel& model) {
  json j;
  if (const auto* f = std::get_if<gauss::FbmSpec>(&model.kind)) {
    j["kind"] = "fbm";
    j["hurst"] = f->hurst;
  } else if (const auto* p = std::get_if<gauss::PLogBmSpec>(&model.kind)) {
    j["kind"] = "plog";
    j["p"] = p->p;
  } else if (const auto* s = std::get_if<gauss::FbmSeriesSpec>(&model.kind)) {
    j["kind"] = "fbm_series";
    j["lambdas"] = s->lambdas;
    j["hursts"] = s->hursts;
  } else {
    throw UsageError("config: custom-kernel models are not serializable");
  }
  j["dimension"] = model.dimension;
  j["horizon"] = model.horizon;
  return j;
}

// ---------- drift registry ----------

inline const std::vector<std::string>& registered_drifts() {
  static const std::vector<std::string> names{"dirac", "dirac_derivative", "gaussian", "sine"};
  return names;
}

inline averaging::SpectralDrift drift_from_json(const json& j) {
  const std::string name = require<std::string>(j, "name");
  const int dim = get_or<int>(j, "dimension", 1);
  if (name == "dirac") return averaging::dirac_drift(dim);
  if (name == "dirac_derivative") return averaging::dirac_derivative_drift(dim, get_or<int>(j, "axis", 0));
  if (name == "gaussian") return averaging::gaussian_drift(get_or<double>(j, "sigma", 0.5), dim);
  if (name == "sine")
    return averaging::sine_drift(get_or<double>(j, "amplitude", 1.0), get_or<double>(j, "frequency", 1.0));
  std::string all;
  for (const auto& d : registered_drifts()) all += (all.empty() ? "" : ", ") + d;
  throw UsageError("config: drift '" + name + "' unknown; registered drifts: " + all);
}

// ---------- frequency grid / windows / solver ----------

inline core::FrequencyGrid fgrid_from_json(const json& j, int dim) {
  // defaults per dimension: d=1 -> m=513, z_max=128; d=2 -> m=129, z_max=48
  const double zdef = dim == 1 ? 128.0 : 48.0;
  const std::size_t mdef = dim == 1 ? 513 : 129;
  return core::FrequencyGrid(dim, get_or<double>(j, "z_max", zdef),
                             get_or<std::size_t>(j, "points", mdef));
}

inline occupation::WindowSet windows_from_json(const json& j) {
  occupation::WindowSet w;
  w.j_min = get_or<std::size_t>(j, "j_min", 2);
  w.j_max = get_or<std::size_t>(j, "j_max", 7);
  w.offsets_per_scale = get_or<std::size_t>(j, "offsets", 16);
  return w;
}

inline yode::SolveConfig solve_config_from_json(const json& j) {
  yode::SolveConfig cfg;
  cfg.gamma_prime = get_or<double>(j, "gamma_prime", 0.0);
  cfg.picard_tol = get_or<double>(j, "picard_tol", 1e-10);
  cfg.max_picard_iters = get_or<int>(j, "max_picard_iters", 64);
  cfg.step_factor = get_or<double>(j, "step_factor", 0.5);
  cfg.contraction_accept = get_or<double>(j, "contraction_accept", 0.9);
  cfg.explosion_threshold = get_or<double>(j, "explosion_threshold", 1e6);
  cfg.extra_depth = get_or<int>(j, "extra_depth", 4);
  cfg.max_cells = get_or<std::size_t>(j, "max_cells", 0);
  return cfg;
}

}  // namespace pathreg::io
