#include "tfsrc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tfsrc/experiment.hpp"
#include "tfsrc/fracops.hpp"
#include "tfsrc/inverse.hpp"

namespace tfsrc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Small 1D problem shared by the adjoint and gradient checks.
struct SmallProblem {
  Setup setup;
  Observation obs;
};

SmallProblem small_problem(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.id = "verify";
  cfg.dim = 1;
  cfg.n = 10;
  cfg.M = 10;
  cfg.alpha = 0.5;
  cfg.mu = {5.0, 10.0, 0.0};
  cfg.f_true = {"sin(pi x/2)+x^2+1", 0.0};
  cfg.omega.box = {{0.2, 0.8}};
  cfg.delta = 0.01;
  cfg.seed = seed;
  SmallProblem p{make_setup(cfg), {}};
  p.obs = synthesize_observation(cfg, p.setup);
  return p;
}

FeField random_field(UniformNoise& noise, std::size_t size) {
  FeField f(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = noise.next();
  return f;
}

constexpr int kPairs = 10;

}  // namespace

CheckResult check_weight_identities() {
  CheckResult r{"weight-identities", true, ""};
  double worst_sum = 0.0;
  for (double alpha : {0.1, 0.3, 0.5, 0.8, 0.9}) {
    const L1Weights w = l1_weights(alpha, 1.0 / 64, 64);
    for (std::size_t j = 1; j < w.d.size(); ++j) r.passed = r.passed && w.d[j] < w.d[j - 1];
    for (std::size_t m = 0; m < w.d.size(); ++m) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= m + 1; ++j) sum += w.gamma(j, m);
      worst_sum = std::max(worst_sum, std::abs(sum));
    }
  }
  r.passed = r.passed && worst_sum <= 1e-13;
  r.detail = "max |sum gamma_j| = " + fmt(worst_sum);
  return r;
}

CheckResult check_mittag_leffler() {
  CheckResult r{"mittag-leffler", true, ""};
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double z = -5.0 + 0.05 * i;
    const double value = mittag_leffler({1.0, 1.0, 1e-17, 500}, z);
    worst = std::max(worst, std::abs(value - std::exp(z)) / std::exp(z));
  }
  const bool unit_at_zero = mittag_leffler({0.3, 1.0, 1e-16, 500}, 0.0) == 1.0;
  r.passed = worst <= 1e-10 && unit_at_zero;
  r.detail = "max rel err vs exp on [-5,5] = " + fmt(worst);
  return r;
}

CheckResult check_energy_inequality(std::uint64_t seed) {
  CheckResult r{"energy-inequality", true, ""};
  UniformNoise noise(seed);
  double worst = std::numeric_limits<double>::infinity();
  constexpr std::size_t kSteps = 32;
  constexpr std::size_t kSize = 6;
  for (double alpha : {0.3, 0.5, 0.8}) {
    const L1Weights w = l1_weights(alpha, 1.0 / kSteps, kSteps);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::vector<double>> seq(kSize, std::vector<double>(kSteps + 1));
      for (auto& s : seq) {
        for (double& x : s) x = noise.next();
      }
      std::vector<double> norm_sq(kSteps + 1, 0.0);
      for (std::size_t m = 0; m <= kSteps; ++m) {
        for (const auto& s : seq) norm_sq[m] += s[m] * s[m];
      }
      for (std::size_t m = 1; m <= kSteps; ++m) {
        const double lhs = caputo_l1(std::span(norm_sq).first(m + 1), w);
        double rhs = 0.0;
        for (const auto& s : seq) rhs += 2.0 * s[m] * caputo_l1(std::span(s).first(m + 1), w);
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        worst = std::min(worst, (rhs - lhs) / scale);
      }
    }
  }
  r.passed = worst >= -1e-12;
  r.detail = "min (rhs - lhs)/scale = " + fmt(worst);
  return r;
}

CheckResult check_temporal_convergence() {
  CheckResult r{"ml-convergence", true, ""};
  std::ostringstream detail;
  for (double alpha : {0.3, 0.5, 0.8}) {
    const double exact = 1.0 - mittag_leffler({alpha, 1.0, 1e-17, 500}, -1.0);
    std::vector<double> log_tau;
    std::vector<double> log_err;
    double previous = INFINITY;
    for (std::size_t M : {20u, 40u, 80u, 160u}) {
      auto space = assemble(build_mesh(1, 4));
      const Stepper stepper(space, make_time_grid(1.0, M, alpha));
      const TemporalProfile mu = sample_profile(stepper.grid(), [](double) { return 1.0; });
      const Trajectory u = solve_forward(Vector::Ones(5), mu, stepper);
      const double err = std::abs(u.slices.back()[0] - exact);
      r.passed = r.passed && err < previous;
      previous = err;
      log_tau.push_back(std::log(1.0 / M));
      log_err.push_back(std::log(err));
    }
    const double n = static_cast<double>(log_tau.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_tau.size(); ++i) {
      sx += log_tau[i];
      sy += log_err[i];
      sxx += log_tau[i] * log_tau[i];
      sxy += log_tau[i] * log_err[i];
    }
    const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.passed = r.passed && order >= alpha - 0.1;
    detail << "alpha=" << alpha << " order=" << fmt(order) << "  ";
  }
  r.detail = detail.str();
  return r;
}

CheckResult check_adjoint_identity(std::uint64_t seed, double& tol_adj, AdjointScheme scheme) {
  CheckResult r{"adjoint-identity", true, ""};
  const SmallProblem p = small_problem(seed);
  UniformNoise noise(seed + 1);
  tol_adj = 0.0;
  for (int k = 0; k < kPairs; ++k) {
    const FeField f = random_field(noise, p.setup.space->dof_count());
    const FeField q = random_field(noise, p.setup.space->dof_count());
    const AdjointIdentity id =
        adjoint_identity_check(f, q, p.obs, *p.setup.stepper, p.setup.mu, scheme);
    tol_adj = std::max(tol_adj, id.relative_gap());
  }
  r.passed = tol_adj <= 0.05;
  r.detail = "max relative gap tol_adj = " + fmt(tol_adj);
  return r;
}

CheckResult check_gradient_fd(std::uint64_t seed, double tol_adj, AdjointScheme scheme) {
  CheckResult r{"gradient-fd", true, ""};
  const SmallProblem p = small_problem(seed);
  const Stepper& stepper = *p.setup.stepper;
  const FemSpace& space = *p.setup.space;
  UniformNoise noise(seed + 1);
  constexpr double beta = 1e-4;
  constexpr double h = 1e-4;
  double worst = 0.0;
  for (int k = 0; k < kPairs; ++k) {
    const FeField f = random_field(noise, space.dof_count());
    const FeField q = random_field(noise, space.dof_count());
    const double fd = (objective(f + h * q, p.obs, beta, stepper, p.setup.mu) -
                       objective(f - h * q, p.obs, beta, stepper, p.setup.mu)) /
                      (2.0 * h);
    const double directional = l2_inner(space, gradient(f, p.obs, beta, stepper, p.setup.mu, scheme), q);
    worst = std::max(worst, std::abs(directional - fd) / std::abs(fd));
  }
  r.passed = worst <= tol_adj + 1e-6;
  r.detail = "max |<g,p> - FD|/|FD| = " + fmt(worst) + " (bound " + fmt(tol_adj + 1e-6) + ")";
  return r;
}

CheckResult check_mirrored_gap_refinement(std::uint64_t seed) {
  CheckResult r{"mirrored-adjoint-gap", true, ""};
  std::vector<double> gaps;
  for (std::size_t M : {10, 20, 40}) {
    ExperimentConfig cfg;
    cfg.n = 10;
    cfg.M = M;
    cfg.alpha = 0.5;
    cfg.mu = {5.0, 10.0, 0.0};
    cfg.f_true = {"sin(pi x/2)+x^2+1", 0.0};
    cfg.omega.box = {{0.2, 0.8}};
    cfg.seed = seed;
    const Setup setup = make_setup(cfg);
    const Observation obs = synthesize_observation(cfg, setup);
    UniformNoise noise(seed + 1);
    const FeField f = random_field(noise, setup.space->dof_count());
    const FeField q = random_field(noise, setup.space->dof_count());
    gaps.push_back(adjoint_identity_check(f, q, obs, *setup.stepper, setup.mu, AdjointScheme::mirrored)
                       .relative_gap());
  }
  r.passed = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  r.detail = "gap at M = 10, 20, 40: " + fmt(gaps[0]) + ", " + fmt(gaps[1]) + ", " + fmt(gaps[2]);
  return r;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(check_weight_identities());
  out.push_back(check_mittag_leffler());
  out.push_back(check_energy_inequality(seed));
  out.push_back(check_temporal_convergence());
  double tol_adj = 0.0;
  out.push_back(check_adjoint_identity(seed, tol_adj));
  out.push_back(check_gradient_fd(seed, tol_adj));
  out.push_back(check_mirrored_gap_refinement(seed));
  return out;
}

}  // namespace tfsrc
