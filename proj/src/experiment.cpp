#include "tfsrc/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "tfsrc/errors.hpp"

namespace tfsrc {

namespace fs = std::filesystem;

double UniformNoise::next() {
  const double unit = std::ldexp(static_cast<double>(engine_() >> 11), -53);
  return 2.0 * unit - 1.0;
}

Observation gen_noise(const Trajectory& clean, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw ValidationError("gen_noise: delta must be >= 0");
  Observation obs;
  obs.delta = delta;
  obs.slices = clean.slices;
  UniformNoise noise(seed);
  for (std::size_t m = 1; m < obs.slices.size(); ++m) {
    Vector& slice = obs.slices[m];
    for (Eigen::Index i = 0; i < slice.size(); ++i) slice[i] *= 1.0 + delta * noise.next();
  }
  return obs;
}

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  Setup s;
  s.space = assemble(build_mesh(cfg.dim, cfg.n));
  s.stepper = std::make_shared<const Stepper>(s.space, make_time_grid(cfg.T, cfg.M, cfg.alpha));
  s.mask = omega_mass(*s.space, cfg.omega);
  s.mu = sample_profile(s.stepper->grid(), cfg.mu);
  s.f_true = l2_project(*s.space, make_source(cfg.f_true, cfg.dim));
  return s;
}

Observation synthesize_observation(const ExperimentConfig& cfg, const Setup& setup) {
  Trajectory clean;
  if (cfg.data_refine == 1) {
    clean = solve_forward(setup.f_true, setup.mu, *setup.stepper);
  } else {
    const int r = cfg.data_refine;
    auto fine_space = assemble(build_mesh(cfg.dim, cfg.n * r));
    const Stepper fine(fine_space, make_time_grid(cfg.T, cfg.M * static_cast<std::size_t>(r), cfg.alpha));
    const FeField f_fine = l2_project(*fine_space, make_source(cfg.f_true, cfg.dim));
    const Trajectory u_fine =
        solve_forward(f_fine, sample_profile(fine.grid(), cfg.mu), fine);
    clean.slices.reserve(cfg.M + 1);
    for (std::size_t m = 0; m <= cfg.M; ++m) {
      const Vector& slice = u_fine.slices[m * static_cast<std::size_t>(r)];
      clean.slices.push_back(
          l2_project(*setup.space, [&](const Point& x) { return fine_space->evaluate(slice, x); }));
    }
  }
  Observation obs = gen_noise(clean, cfg.delta, cfg.seed);
  obs.mask = setup.mask;
  return obs;
}

LChoice choose_L(const ExperimentConfig& cfg, const Setup& setup) {
  LChoice choice;
  choice.L = cfg.L;
  if (cfg.L_mode == LMode::fixed) return choice;
  const double estimate =
      estimate_L(*setup.stepper, *setup.mask, setup.mu, cfg.power_iters, 0x5eed, cfg.adjoint);
  choice.estimate = estimate;
  if (cfg.L_mode == LMode::estimate || cfg.L < 0.55 * estimate) choice.L = 1.1 * estimate;
  return choice;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Setup setup = make_setup(cfg);
  const Observation obs = synthesize_observation(cfg, setup);
  const LChoice L = choose_L(cfg, setup);

  InverseConfig inv;
  inv.beta = cfg.beta;
  inv.L = L.L;
  inv.eps = cfg.eps;
  inv.max_iters = cfg.max_iters;
  inv.adjoint = cfg.adjoint;
  inv.f0 = Vector::Constant(static_cast<Eigen::Index>(setup.space->dof_count()), cfg.f0);
  ReconstructionResult result = reconstruct(obs, inv, *setup.stepper, setup.mu, setup.f_true);

  RunOutput out;
  RunRecord& rec = out.record;
  rec.id = cfg.id;
  rec.config_hash = config_hash(cfg);
  rec.dim = cfg.dim;
  rec.alpha = cfg.alpha;
  rec.delta = cfg.delta;
  rec.omega = describe_omega(cfg.omega);
  rec.beta = cfg.beta;
  rec.L = L.L;
  rec.L_estimate = L.estimate;
  rec.eps = cfg.eps;
  rec.err = result.err.value_or(0.0);
  rec.K = result.iterations;
  rec.converged = result.converged;
  rec.seed = cfg.seed;
  rec.objective_trace = std::move(result.objective_trace);
  rec.rel_change_trace = std::move(result.rel_change_trace);
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.space = setup.space;
  out.f_true = setup.f_true;
  out.f_rec = std::move(result.f_rec);
  return out;
}

std::vector<RunOutput> run_sweep(const std::vector<ExperimentConfig>& cfgs, int threads) {
  std::vector<std::optional<RunOutput>> slots(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        slots[i] = run_experiment(cfgs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(cfgs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<RunOutput> out;
  out.reserve(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

namespace {

std::string num(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string results_header() { return "id,dim,alpha,delta,omega,beta,L,eps,err,K,seconds,seed"; }

std::string results_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.id << ',' << r.dim << ',' << num(r.alpha) << ',' << num(r.delta) << ',' << r.omega << ','
     << num(r.beta) << ',' << num(r.L) << ',' << num(r.eps) << ',' << num(r.err) << ',' << r.K << ','
     << num(r.seconds, 6) << ',' << r.seed;
  return os.str();
}

std::vector<fs::path> emit_outputs(const RunOutput& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());

  const RunRecord& rec = run.record;
  const fs::path result_path = dir / (rec.id + "_result.csv");
  const fs::path profile_path = dir / (rec.id + "_profile.csv");
  const fs::path trace_path = dir / (rec.id + "_trace.csv");
  const fs::path plot_path = dir / (rec.id + "_plot.gp");

  {
    auto out = open_for_write(result_path);
    out << results_header() << '\n' << results_row(rec) << '\n';
    check_written(out, result_path);
  }
  {
    auto out = open_for_write(profile_path);
    const Mesh& mesh = run.space->mesh();
    out << (mesh.dim == 1 ? "x" : "x1,x2") << ",f_true,f_rec\n";
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      out << num(mesh.nodes[i][0]);
      if (mesh.dim == 2) out << ',' << num(mesh.nodes[i][1]);
      out << ',' << num(run.f_true[k]) << ',' << num(run.f_rec[k]) << '\n';
    }
    check_written(out, profile_path);
  }
  {
    auto out = open_for_write(trace_path);
    out << "k,objective,rel_change\n";
    for (std::size_t k = 0; k < rec.objective_trace.size(); ++k) {
      out << k << ',' << num(rec.objective_trace[k]) << ',';
      if (k < rec.rel_change_trace.size()) out << num(rec.rel_change_trace[k]);
      out << '\n';
    }
    check_written(out, trace_path);
  }
  {
    auto out = open_for_write(plot_path);
    const std::string profile = profile_path.filename().string();
    out << "# gnuplot " << plot_path.filename().string() << "\n"
        << "set datafile separator ','\n"
        << "set terminal pngcairo size 900,600\n"
        << "set output '" << rec.id << "_profile.png'\n"
        << "set title '" << rec.id << ": K = " << rec.K << ", err = " << num(100.0 * rec.err, 3)
        << "%'\n";
    if (run.space->dim() == 1) {
      out << "set xlabel 'x'\n"
          << "plot '" << profile << "' using 1:2 skip 1 with lines lw 2 title 'f*', \\\n"
          << "     '' using 1:3 skip 1 with linespoints pt 6 title 'f_h^K'\n";
    } else {
      const int side = run.space->mesh().n + 1;
      out << "set xlabel 'x_1'\nset ylabel 'x_2'\n"
          << "set dgrid3d " << side << ',' << side << "\n"
          << "set multiplot layout 1,2\n"
          << "splot '" << profile << "' using 1:2:3 skip 1 with lines title 'f*'\n"
          << "splot '" << profile << "' using 1:2:4 skip 1 with lines title 'f_h^K'\n"
          << "unset multiplot\n";
    }
    check_written(out, plot_path);
  }
  return {result_path, profile_path, trace_path, plot_path};
}

fs::path write_results_table(const std::vector<RunOutput>& runs, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  const fs::path path = dir / "results.csv";
  auto out = open_for_write(path);
  out << results_header() << '\n';
  for (const auto& run : runs) out << results_row(run.record) << '\n';
  check_written(out, path);
  return path;
}

}  // namespace tfsrc
