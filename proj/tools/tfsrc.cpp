// Command line front end: forward solves, noisy data, reconstructions,
// table sweeps and the built-in verification suite.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tfsrc/config.hpp"
#include "tfsrc/errors.hpp"
#include "tfsrc/experiment.hpp"
#include "tfsrc/verify.hpp"

namespace fs = std::filesystem;
using namespace tfsrc;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitNotConverged = 3;

struct CommonOptions {
  std::string config_path;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment configuration");
  cmd->add_option("--experiment", opts.experiment,
                  "Registry id (e.g. line-a) or group (line-pair, line-sweep, square-pair, square-sweep, 1d, 2d, all)");
  cmd->add_option("--seed", opts.seed, "Override the noise seed of every experiment");
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--threads", opts.threads, "Worker threads for independent runs")->check(CLI::PositiveNumber);
}

std::vector<ExperimentConfig> resolve(const CommonOptions& opts) {
  std::vector<ExperimentConfig> cfgs;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ValidationError("cannot read config '" + opts.config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    cfgs = parse_configs(buffer.str());
  } else if (!opts.experiment.empty()) {
    cfgs = find_experiments(opts.experiment);
  } else {
    throw ValidationError("give --config <path> or --experiment <id>");
  }
  if (opts.seed) {
    for (auto& cfg : cfgs) cfg.seed = *opts.seed;
  }
  return cfgs;
}

std::ofstream open_csv(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  return out;
}

int cmd_forward(const CommonOptions& opts) {
  for (const auto& cfg : resolve(opts)) {
    const Setup setup = make_setup(cfg);
    const Trajectory u = solve_forward(setup.f_true, setup.mu, *setup.stepper);
    const fs::path path = fs::path(opts.out_dir) / (cfg.id + "_forward.csv");
    auto out = open_csv(path);
    out << "m,t,l2,h1_semi\n";
    double peak = 0.0;
    for (std::size_t m = 0; m < u.slices.size(); ++m) {
      const Norms nrm = norms(*setup.space, u.slices[m]);
      peak = std::max(peak, nrm.l2);
      out << m << ',' << setup.stepper->grid().t(m) << ',' << nrm.l2 << ',' << nrm.h1_semi << '\n';
    }
    std::printf("%s: max_m ||u^m|| = %.6g, ||f*|| = %.6g -> %s\n", cfg.id.c_str(), peak,
                l2_norm(*setup.space, setup.f_true), path.string().c_str());
  }
  return 0;
}

int cmd_noise(const CommonOptions& opts) {
  for (const auto& cfg : resolve(opts)) {
    const Setup setup = make_setup(cfg);
    const Trajectory clean = solve_forward(setup.f_true, setup.mu, *setup.stepper);
    const Observation obs = synthesize_observation(cfg, setup);
    const fs::path path = fs::path(opts.out_dir) / (cfg.id + "_observation.csv");
    auto out = open_csv(path);
    out << "m,node,in_omega,clean,noisy\n";
    for (std::size_t m = 0; m < obs.slices.size(); ++m) {
      for (Eigen::Index i = 0; i < obs.slices[m].size(); ++i) {
        out << m << ',' << i << ',' << static_cast<int>(setup.mask->node_in_omega[i]) << ','
            << clean.slices[m][i] << ',' << obs.slices[m][i] << '\n';
      }
    }
    std::printf("%s: delta = %g, seed = %llu -> %s\n", cfg.id.c_str(), cfg.delta,
                static_cast<unsigned long long>(cfg.seed), path.string().c_str());
  }
  return 0;
}

void print_run(const RunRecord& rec) {
  std::printf("%-12s alpha=%.2f delta=%.3g omega=%s L=%.4g%s err=%.2f%% K=%zu%s\n", rec.id.c_str(),
              rec.alpha, rec.delta, rec.omega.c_str(), rec.L,
              rec.L_estimate ? (" (|A|^2~" + std::to_string(*rec.L_estimate) + ")").c_str() : "",
              100.0 * rec.err, rec.K, rec.converged ? "" : " [max_iters reached]");
}

int cmd_runs(const CommonOptions& opts, bool sweep) {
  const auto cfgs = resolve(opts);
  const auto runs = run_sweep(cfgs, sweep ? opts.threads : 1);
  bool all_converged = true;
  for (const auto& run : runs) {
    emit_outputs(run, opts.out_dir);
    print_run(run.record);
    all_converged = all_converged && run.record.converged;
  }
  if (sweep) {
    const fs::path table = write_results_table(runs, opts.out_dir);
    std::printf("results: %s\n", table.string().c_str());
  }
  return all_converged ? 0 : kExitNotConverged;
}

int cmd_verify(std::uint64_t seed) {
  bool ok = true;
  for (const auto& check : run_verification(seed)) {
    std::printf("[%s] %-20s %s\n", check.passed ? "PASS" : "FAIL", check.name.c_str(), check.detail.c_str());
    ok = ok && check.passed;
  }
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct the spatial source component of a time-fractional diffusion equation"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* forward = app.add_subcommand("forward", "Solve the forward problem and dump trajectory norms");
  auto* noise = app.add_subcommand("noise", "Generate noisy observation files");
  auto* recon = app.add_subcommand("reconstruct", "Run single reconstructions");
  auto* sweep = app.add_subcommand("sweep", "Reproduce a table of runs in parallel");
  auto* verify = app.add_subcommand("verify", "Run the invariant and oracle suite");
  for (auto* cmd : {forward, noise, recon, sweep}) add_common(cmd, opts);
  std::uint64_t verify_seed = 7;
  verify->add_option("--seed", verify_seed, "Seed for the random test vectors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (forward->parsed()) return cmd_forward(opts);
    if (noise->parsed()) return cmd_noise(opts);
    if (recon->parsed()) return cmd_runs(opts, false);
    if (sweep->parsed()) return cmd_runs(opts, true);
    if (verify->parsed()) return cmd_verify(verify_seed);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return 0;
}
