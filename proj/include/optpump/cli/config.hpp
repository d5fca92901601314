#ifndef OPTPUMP_CLI_CONFIG_HPP
#define OPTPUMP_CLI_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optpump/error.hpp"
#include "optpump/model.hpp"

namespace optpump::cli {

using nlohmann::json;

/// Everything a command needs. Stored on disk as one flat JSON object.
struct RunConfig {
  ModelConfig model;
  std::vector<Boundary> boundaries{Boundary::Open};

  // spectrum
  double enclosure_eps = 1e-6;

  // dynamics
  int initial_l = 1;
  Sector initial_sector = Sector::Ground;
  double t_end = 50.0;
  double dt = 0.5;
  std::string method = "ode";  // ode | spectral

  // gap / optimize
  std::string scan = "N";  // gamma0 | rabi | omega | N | gamma2 | surface
  std::vector<double> grid{8, 16, 24, 32, 40};
  std::vector<double> rabi_grid{0.1, 0.27, 0.3};
  std::vector<double> omega_grid{0.0};

  // verify
  std::uint64_t seed = 12345;
  int random_models = 5;
  std::string vectorization = "row_major";  // row_major | column_major (fault injection)
};

namespace detail {

inline const char* coupling_name(const CouplingPattern& p) {
  switch (p.index()) {
    case 0: return "uniform";
    case 1: return "sqrt";
    case 2: return "shifted_inverse_sqrt";
    default: return "custom";
  }
}

inline Boundary parse_boundary(const std::string& s) {
  if (s == "obc") return Boundary::Open;
  if (s == "pbc") return Boundary::Periodic;
  throw Error(Errc::ConfigError, "boundary must be obc, pbc or both, got '" + s + "'");
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("bad value for '") + key + "': " + e.what());
  }
}

inline std::vector<double> get_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get<std::vector<double>>(j, key);
}

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json j;
  j["l_max"] = c.model.l_max;
  j["omega"] = c.model.omega;
  j["coupling"] = detail::coupling_name(c.model.rabi);
  if (const auto* u = std::get_if<UniformCoupling>(&c.model.rabi)) j["rabi"] = u->rabi;
  if (const auto* s = std::get_if<SqrtCoupling>(&c.model.rabi)) j["rabi"] = s->rabi;
  if (const auto* sh = std::get_if<ShiftedInverseSqrtCoupling>(&c.model.rabi)) {
    j["rabi"] = sh->rabi;
    j["rabi0"] = sh->rabi0;
  }
  if (const auto* cu = std::get_if<CustomCoupling>(&c.model.rabi)) j["rabi_list"] = cu->values;
  j["gamma0"] = c.model.gamma0;
  j["gamma1"] = c.model.gamma1;
  j["gamma2"] = c.model.gamma2;
  if (c.boundaries.size() == 2)
    j["boundary"] = "both";
  else
    j["boundary"] = to_string(c.boundaries.front());
  if (c.model.wrap_rabi) j["wrap_rabi"] = *c.model.wrap_rabi;
  j["pbc_wrap_jumps"] = c.model.pbc_wrap_jumps;
  j["enclosure_eps"] = c.enclosure_eps;
  j["initial_l"] = c.initial_l;
  j["initial_sector"] = c.initial_sector == Sector::Ground ? "g" : "e";
  j["t_end"] = c.t_end;
  j["dt"] = c.dt;
  j["method"] = c.method;
  j["scan"] = c.scan;
  j["grid"] = c.grid;
  j["rabi_grid"] = c.rabi_grid;
  j["omega_grid"] = c.omega_grid;
  j["seed"] = c.seed;
  j["random_models"] = c.random_models;
  j["vectorization"] = c.vectorization;
  return j;
}

inline RunConfig from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  static const std::set<std::string> known{
      "l_max", "N", "omega", "coupling", "rabi", "rabi0", "rabi_list", "gamma0", "gamma1", "gamma2", "boundary",
      "wrap_rabi", "pbc_wrap_jumps", "enclosure_eps", "initial_l", "initial_sector", "t_end", "dt", "method",
      "scan", "grid", "rabi_grid", "omega_grid", "seed", "random_models", "vectorization"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw Error(Errc::ConfigError, "unknown config key '" + key + "'");

  RunConfig c;
  if (j.contains("l_max") && j.contains("N")) throw Error(Errc::ConfigError, "give either l_max or N, not both");
  if (j.contains("l_max")) c.model.l_max = detail::get<int>(j, "l_max");
  if (j.contains("N")) {
    const int n = detail::get<int>(j, "N");
    if (n % 2 != 0) throw Error(Errc::ConfigError, "N must be even");
    c.model.l_max = n / 2;
  }
  if (j.contains("omega")) c.model.omega = detail::get_list(j, "omega");

  const std::string coupling = j.contains("coupling") ? detail::get<std::string>(j, "coupling") : "uniform";
  const double rabi = j.contains("rabi") ? detail::get<double>(j, "rabi") : 0.25;
  if (coupling == "uniform") {
    c.model.rabi = UniformCoupling{rabi};
  } else if (coupling == "sqrt") {
    c.model.rabi = SqrtCoupling{rabi};
  } else if (coupling == "shifted_inverse_sqrt") {
    c.model.rabi = ShiftedInverseSqrtCoupling{j.contains("rabi0") ? detail::get<double>(j, "rabi0") : 0.0, rabi};
  } else if (coupling == "custom") {
    if (!j.contains("rabi_list")) throw Error(Errc::ConfigError, "custom coupling needs rabi_list");
    c.model.rabi = CustomCoupling{detail::get_list(j, "rabi_list")};
  } else {
    throw Error(Errc::ConfigError, "unknown coupling '" + coupling + "'");
  }
  if (j.contains("gamma0")) c.model.gamma0 = detail::get<double>(j, "gamma0");
  if (j.contains("gamma1")) c.model.gamma1 = detail::get<double>(j, "gamma1");
  if (j.contains("gamma2")) c.model.gamma2 = detail::get<double>(j, "gamma2");
  if (j.contains("boundary")) {
    const auto b = detail::get<std::string>(j, "boundary");
    if (b == "both")
      c.boundaries = {Boundary::Open, Boundary::Periodic};
    else
      c.boundaries = {detail::parse_boundary(b)};
  }
  c.model.boundary = c.boundaries.front();
  if (j.contains("wrap_rabi")) c.model.wrap_rabi = detail::get<double>(j, "wrap_rabi");
  if (j.contains("pbc_wrap_jumps")) c.model.pbc_wrap_jumps = detail::get<bool>(j, "pbc_wrap_jumps");
  if (j.contains("enclosure_eps")) c.enclosure_eps = detail::get<double>(j, "enclosure_eps");
  if (j.contains("initial_l")) c.initial_l = detail::get<int>(j, "initial_l");
  if (j.contains("initial_sector")) {
    const auto s = detail::get<std::string>(j, "initial_sector");
    if (s != "g" && s != "e") throw Error(Errc::ConfigError, "initial_sector must be g or e");
    c.initial_sector = s == "g" ? Sector::Ground : Sector::Excited;
  }
  if (j.contains("t_end")) c.t_end = detail::get<double>(j, "t_end");
  if (j.contains("dt")) c.dt = detail::get<double>(j, "dt");
  if (j.contains("method")) c.method = detail::get<std::string>(j, "method");
  if (c.method != "ode" && c.method != "spectral") throw Error(Errc::ConfigError, "method must be ode or spectral");
  if (j.contains("scan")) c.scan = detail::get<std::string>(j, "scan");
  if (j.contains("grid")) c.grid = detail::get_list(j, "grid");
  if (j.contains("rabi_grid")) c.rabi_grid = detail::get_list(j, "rabi_grid");
  if (j.contains("omega_grid")) c.omega_grid = detail::get_list(j, "omega_grid");
  if (j.contains("seed")) c.seed = detail::get<std::uint64_t>(j, "seed");
  if (j.contains("random_models")) c.random_models = detail::get<int>(j, "random_models");
  if (j.contains("vectorization")) c.vectorization = detail::get<std::string>(j, "vectorization");
  if (c.vectorization != "row_major" && c.vectorization != "column_major")
    throw Error(Errc::ConfigError, "vectorization must be row_major or column_major");
  return c;
}

/// Applies "key=value" overrides; the value is read as JSON when it parses,
/// otherwise as a plain string.
inline void apply_overrides(json& j, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(Errc::ConfigError, "--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    const std::string value = s.substr(eq + 1);
    json v = json::parse(value, nullptr, false);
    if (v.is_discarded()) v = value;
    j[key] = v;
    if (key == "N") j.erase("l_max");
    if (key == "l_max") j.erase("N");
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ConfigError, "config '" + path + "' is not valid JSON");
  return j;
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& sets) {
  json j = read_json_file(path);
  if (!j.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  apply_overrides(j, sets);
  return from_json(j);
}

}  // namespace optpump::cli

#endif  // OPTPUMP_CLI_CONFIG_HPP
