#include "run_config.hpp"

#include <qmc/errors.hpp>

#include <sstream>
#include <string>
#include <vector>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace qmc::cli {
namespace {

Method method_from(const std::string& name) {
  const std::optional<Method> m = parse_method(name);
  if (!m) throw ConfigError("unknown method '" + name + "'");
  return *m;
}

Quaternion axis_from(const std::vector<double>& parts) {
  if (parts.size() == 3) return {0.0, parts[0], parts[1], parts[2]};
  if (parts.size() == 4) return {parts[0], parts[1], parts[2], parts[3]};
  throw ConfigError("qdct_axis needs 3 or 4 components");
}

template <typename T>
T toml_number(const toml::node& node, const std::string& key) {
  if constexpr (std::is_floating_point_v<T>) {
    if (auto v = node.value<double>()) return *v;
  } else {
    if (auto v = node.as_integer()) {
      if (v->get() < 0) throw ConfigError("config key '" + key + "' must be nonnegative");
      return static_cast<T>(v->get());
    }
  }
  throw ConfigError("config key '" + key + "' has the wrong type");
}

}  // namespace

Quaternion parse_axis(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("qdct_axis component '" + item + "' is not a number");
    }
  }
  return axis_from(parts);
}

ConfigOverrides read_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw IoError("cannot read config file " + path.string());
  }
  toml::table table;
  try {
    table = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + std::string(e.description()));
  }

  ConfigOverrides out;
  for (const auto& [raw_key, node] : table) {
    const std::string key(raw_key.str());
    if (key == "method") {
      const auto name = node.value<std::string>();
      if (!name) throw ConfigError("config key 'method' must be a string");
      out.method = method_from(*name);
    } else if (key == "rank") {
      out.rank = toml_number<Index>(node, key);
    } else if (key == "mu0") {
      out.mu0 = toml_number<double>(node, key);
    } else if (key == "rho") {
      out.rho = toml_number<double>(node, key);
    } else if (key == "mu_max") {
      out.mu_max = toml_number<double>(node, key);
    } else if (key == "beta") {
      out.beta = toml_number<double>(node, key);
    } else if (key == "varsigma") {
      out.varsigma = toml_number<double>(node, key);
    } else if (key == "v") {
      out.v = toml_number<Index>(node, key);
    } else if (key == "tol") {
      out.tol = toml_number<double>(node, key);
    } else if (key == "max_iter") {
      out.max_iter = toml_number<int>(node, key);
    } else if (key == "seed") {
      out.seed = toml_number<std::uint64_t>(node, key);
    } else if (key == "qdct_axis") {
      const toml::array* arr = node.as_array();
      if (arr == nullptr) throw ConfigError("config key 'qdct_axis' must be an array");
      std::vector<double> parts;
      for (const auto& item : *arr) parts.push_back(toml_number<double>(item, key));
      out.qdct_axis = axis_from(parts);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return out;
}

namespace {

void apply(const ConfigOverrides& o, SolverConfig& cfg) {
  if (o.rank) cfg.rank = *o.rank;
  if (o.mu0) cfg.mu0 = *o.mu0;
  if (o.rho) cfg.rho = *o.rho;
  if (o.mu_max) cfg.mu_max = *o.mu_max;
  if (o.beta) cfg.beta = *o.beta;
  if (o.varsigma) cfg.varsigma = *o.varsigma;
  if (o.v) cfg.v = *o.v;
  if (o.tol) cfg.tol = *o.tol;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.qdct_axis) cfg.qdct_axis = *o.qdct_axis;
  if (o.seed) cfg.seed = *o.seed;
}

}  // namespace

SolverConfig resolve(const ConfigOverrides& file, const ConfigOverrides& flags) {
  const Method m = flags.method.value_or(file.method.value_or(Method::QlnmQqr));
  SolverConfig cfg = SolverConfig::defaults_for(m);
  apply(file, cfg);
  apply(flags, cfg);
  return cfg;
}

nlohmann::json to_json(const SolverConfig& cfg) {
  const Quaternion& a = cfg.qdct_axis;
  return {
      {"method", std::string(method_name(cfg.method))},
      {"rank", cfg.rank},
      {"mu0", cfg.mu0},
      {"rho", cfg.rho},
      {"mu_max", cfg.mu_max},
      {"beta", cfg.beta},
      {"varsigma", cfg.varsigma},
      {"v", cfg.v},
      {"tol", cfg.tol},
      {"max_iter", cfg.max_iter},
      {"qdct_axis", {a.w, a.x, a.y, a.z}},
      {"seed", cfg.seed},
  };
}

ConfigOverrides overrides_from_json(const nlohmann::json& j) {
  try {
    ConfigOverrides o;
    o.method = method_from(j.at("method").get<std::string>());
    o.rank = j.at("rank").get<Index>();
    o.mu0 = j.at("mu0").get<double>();
    o.rho = j.at("rho").get<double>();
    o.mu_max = j.at("mu_max").get<double>();
    o.beta = j.at("beta").get<double>();
    o.varsigma = j.at("varsigma").get<double>();
    o.v = j.at("v").get<Index>();
    o.tol = j.at("tol").get<double>();
    o.max_iter = j.at("max_iter").get<int>();
    o.qdct_axis = axis_from(j.at("qdct_axis").get<std::vector<double>>());
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest config: ") + e.what());
  }
}

}  // namespace qmc::cli
