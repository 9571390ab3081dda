#pragma once

#include <qmc/solvers.hpp>

#include <filesystem>
#include <optional>

#include <json.hpp>

namespace qmc::cli {

/// A partial SolverConfig: every field that a config source chose to set.
struct ConfigOverrides {
  std::optional<Method> method;
  std::optional<Index> rank;
  std::optional<double> mu0;
  std::optional<double> rho;
  std::optional<double> mu_max;
  std::optional<double> beta;
  std::optional<double> varsigma;
  std::optional<Index> v;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<Quaternion> qdct_axis;
  std::optional<std::uint64_t> seed;
};

/// Reads a TOML file whose keys are SolverConfig field names. Throws IoError
/// if the file cannot be read and ConfigError for syntax errors, unknown keys
/// or values of the wrong type.
ConfigOverrides read_config_file(const std::filesystem::path& path);

/// method: flags, then file, then qlnm-qqr; then the method's
/// defaults overwritten by the file and finally by the flags.
SolverConfig resolve(const ConfigOverrides& file, const ConfigOverrides& flags);

nlohmann::json to_json(const SolverConfig& cfg);
/// Inverse of to_json; throws ConfigError on missing or malformed fields.
ConfigOverrides overrides_from_json(const nlohmann::json& j);

/// "x,y,z" (pure) or "w,x,y,z". Throws ConfigError on anything else.
Quaternion parse_axis(const std::string& text);

}  // namespace qmc::cli
