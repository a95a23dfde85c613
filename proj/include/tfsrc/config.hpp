#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfsrc/adjoint.hpp"
#include "tfsrc/mesh_fem.hpp"

namespace tfsrc {

/// mu(t) = c0 + c1 t + c2 t^2
struct ProfileSpec {
  double c0 = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double t) const { return c0 + t * (c1 + t * c2); }
};

/// Ground-truth source by expression id; `value` is only read by "constant".
struct SourceSpec {
  std::string kind = "constant";
  double value = 1.0;
};

/// Known source expressions, addressable by id.
const std::vector<std::string>& source_kinds();
std::function<double(const Point&)> make_source(const SourceSpec& spec, int dim);

enum class LMode { fixed, estimate, safeguard };

struct ExperimentConfig {
  std::string id = "custom";
  int dim = 1;
  int n = 40;
  std::size_t M = 40;
  double T = 1.0;
  double alpha = 0.5;
  ProfileSpec mu;
  SourceSpec f_true;
  BoxComplement omega;
  double delta = 0.01;
  std::uint64_t seed = 1;
  double beta = 1e-4;
  double L = 1.0;
  LMode L_mode = LMode::safeguard;
  AdjointScheme adjoint = AdjointScheme::transposed;
  double eps = 2e-3;
  double f0 = 2.0;
  std::size_t max_iters = 500;
  int data_refine = 1;  // > 1 generates data on a grid refined by this factor in space and time
  int power_iters = 30;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Accepts a single object, an array of objects, or {"experiments": [...]}.
/// An object may name a registry entry under "extends" and override fields.
std::vector<ExperimentConfig> parse_configs(const std::string& text);
std::string serialize_configs(const std::vector<ExperimentConfig>& cfgs);

/// Built-in runs: two source/order pairs and a noise/region sweep, in 1D and in 2D.
const std::vector<ExperimentConfig>& experiment_registry();

/// Looks up an id, or a group: "line-pair", "line-sweep", "square-pair", "square-sweep", "1d", "2d", "all".
std::vector<ExperimentConfig> find_experiments(const std::string& id);

std::string describe_omega(const BoxComplement& omega);

/// FNV-1a of the canonical JSON form.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace tfsrc
