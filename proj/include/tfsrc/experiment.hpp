#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tfsrc/config.hpp"
#include "tfsrc/forward.hpp"
#include "tfsrc/inverse.hpp"

namespace tfsrc {

/// Portable uniform draws on [-1, 1): mt19937_64 output mapped through its
/// top 53 bits, so every platform produces the same sequence for a seed.
class UniformNoise {
 public:
  explicit UniformNoise(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
};

/// u^delta = (1 + delta * r) u with one draw r per (time slice, node),
/// slices 1..M in order, nodes in order within a slice. Slice 0 is copied.
/// The returned observation has no mask; the caller attaches one.
Observation gen_noise(const Trajectory& clean, double delta, std::uint64_t seed);

/// Everything needed to solve one configured problem on its grid.
struct Setup {
  std::shared_ptr<const FemSpace> space;
  std::shared_ptr<const Stepper> stepper;
  std::shared_ptr<const SubdomainMask> mask;
  TemporalProfile mu;
  FeField f_true;
};

Setup make_setup(const ExperimentConfig& cfg);

/// Noisy observation for the configuration (on a refined grid when data_refine > 1).
Observation synthesize_observation(const ExperimentConfig& cfg, const Setup& setup);

struct LChoice {
  double L = 1.0;
  std::optional<double> estimate;
};

/// Applies cfg.L_mode. `safeguard` keeps cfg.L when L >= 0.55 * estimate and
/// otherwise uses 1.1 * estimate.
LChoice choose_L(const ExperimentConfig& cfg, const Setup& setup);

struct RunRecord {
  std::string id;
  std::uint64_t config_hash = 0;
  int dim = 1;
  double alpha = 0.0;
  double delta = 0.0;
  std::string omega;
  double beta = 0.0;
  double L = 0.0;
  std::optional<double> L_estimate;
  double eps = 0.0;
  double err = 0.0;
  std::size_t K = 0;
  bool converged = false;
  double seconds = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> objective_trace;
  std::vector<double> rel_change_trace;
};

struct RunOutput {
  RunRecord record;
  std::shared_ptr<const FemSpace> space;
  FeField f_true;
  FeField f_rec;
};

RunOutput run_experiment(const ExperimentConfig& cfg);

/// Runs every configuration on `threads` workers; results come back in input order.
std::vector<RunOutput> run_sweep(const std::vector<ExperimentConfig>& cfgs, int threads);

std::string results_header();
std::string results_row(const RunRecord& record);

/// Writes <id>_result.csv, <id>_profile.csv, <id>_trace.csv and <id>_plot.gp
/// into `dir`. Returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const RunOutput& run, const std::filesystem::path& dir);

/// Writes the combined results.csv for a sweep.
std::filesystem::path write_results_table(const std::vector<RunOutput>& runs,
                                          const std::filesystem::path& dir);

}  // namespace tfsrc
