#include "sojourn/config.hpp"

#include "sojourn/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace sojourn {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

const json& object_at(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return v;
}

double number(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

CovarianceModel parse_model(const json& m) {
  reject_unknown(m, "model", {"kind", "alpha", "beta", "scale", "d"});
  if (!m.contains("kind") || !m["kind"].is_string()) throw ConfigError("model.kind must be a string");
  CovarianceModel model;
  model.kind = parse_covariance_kind(m["kind"].get<std::string>());
  if (m.contains("alpha")) model.alpha = number(m["alpha"], "model.alpha");
  if (m.contains("beta")) model.beta = number(m["beta"], "model.beta");
  if (m.contains("scale")) model.scale = number(m["scale"], "model.scale");
  if (m.contains("d")) model.d = static_cast<int>(count(m["d"], "model.d"));
  try {
    model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return model;
}

}  // namespace

ConfigFile parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "config",
                 {"model", "grid", "T_ladder", "u", "u_schedule", "mode", "beta", "replicates", "seed",
                  "workers"});
  ConfigFile out;
  ExperimentConfig& c = out.experiment;
  try {
    if (!root.contains("model")) throw ConfigError("config: 'model' is required");
    c.model = parse_model(object_at(root, "model"));
    if (root.contains("grid")) {
      const json& g = object_at(root, "grid");
      reject_unknown(g, "grid", {"T", "h"});
      if (g.contains("T")) out.grid_T = number(g["T"], "grid.T");
      if (g.contains("h")) c.h = number(g["h"], "grid.h");
    }
    if (root.contains("T_ladder")) {
      if (!root["T_ladder"].is_array()) throw ConfigError("'T_ladder' must be an array");
      for (const auto& t : root["T_ladder"]) c.T_ladder.push_back(number(t, "T_ladder[]"));
    } else if (out.grid_T) {
      c.T_ladder = {*out.grid_T};
    }
    if (root.contains("u")) c.u = number(root["u"], "u");
    if (root.contains("u_schedule")) {
      const json& s = object_at(root, "u_schedule");
      reject_unknown(s, "u_schedule", {"c", "gamma"});
      if (s.contains("c")) c.u_schedule.c = number(s["c"], "u_schedule.c");
      if (s.contains("gamma")) c.u_schedule.gamma = number(s["gamma"], "u_schedule.gamma");
    }
    if (root.contains("mode")) {
      if (!root["mode"].is_string()) throw ConfigError("'mode' must be a string");
      c.mode = parse_bound_mode(root["mode"].get<std::string>());
    }
    if (root.contains("beta")) c.beta = number(root["beta"], "beta");
    if (root.contains("replicates")) c.replicates = count(root["replicates"], "replicates");
    if (root.contains("seed")) c.master_seed = count(root["seed"], "seed");
    if (root.contains("workers")) c.workers = static_cast<int>(count(root["workers"], "workers"));
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  return out;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(path, "read failed");
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace sojourn
