#include "tfsrc/inverse.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tfsrc/errors.hpp"

namespace tfsrc {

void InverseConfig::validate(std::size_t dof_count) const {
  if (!(beta >= 0.0)) throw ValidationError("InverseConfig: beta must be >= 0");
  if (!(L > 0.0)) throw ValidationError("InverseConfig: L must be > 0");
  if (!(eps > 0.0)) throw ValidationError("InverseConfig: eps must be > 0");
  if (max_iters < 1) throw ValidationError("InverseConfig: max_iters must be >= 1");
  if (static_cast<std::size_t>(f0.size()) != dof_count) {
    throw ValidationError("InverseConfig: initial guess f0 has the wrong length");
  }
}

double objective_from_trajectory(const Trajectory& u, const FeField& f, const Observation& obs,
                                 double beta, const Stepper& stepper) {
  const TimeGrid& grid = stepper.grid();
  if (u.slices.size() != grid.M + 1 || obs.slices.size() != grid.M + 1) {
    throw ValidationError("objective: expected M+1 slices");
  }
  double misfit = 0.0;
  for (std::size_t m = 0; m <= grid.M; ++m) {
    const Vector diff = u.slices[m] - obs.slices[m];
    misfit += grid.trap[m] * diff.dot(obs.mask->omega_mass * diff);
  }
  return grid.tau * misfit + beta * l2_inner(stepper.space(), f, f);
}

double objective(const FeField& f, const Observation& obs, double beta, const Stepper& stepper,
                 const TemporalProfile& mu) {
  return objective_from_trajectory(solve_forward(f, mu, stepper), f, obs, beta, stepper);
}

FeField gradient(const FeField& f, const Observation& obs, double beta, const Stepper& stepper,
                 const TemporalProfile& mu, AdjointScheme scheme) {
  const Trajectory u = solve_forward(f, mu, stepper);
  const Trajectory v = solve_adjoint(make_residual(u, obs), stepper, scheme);
  return 2.0 * (adjoint_sum(v, stepper.grid(), mu) + beta * f);
}

double estimate_L(const Stepper& stepper, const SubdomainMask& mask, const TemporalProfile& mu,
                  int iters, std::uint64_t seed, AdjointScheme scheme) {
  if (iters < 1) throw ValidationError("estimate_L: iters must be >= 1");
  const FemSpace& space = stepper.space();
  const TimeGrid& grid = stepper.grid();

  // Zero data: the residual load is omega_mass * u(f).
  auto apply = [&](const FeField& f) {
    const Trajectory u = solve_forward(f, mu, stepper);
    Residual res;
    res.slices.reserve(u.slices.size());
    for (const Vector& slice : u.slices) res.slices.push_back(mask.omega_mass * slice);
    return adjoint_sum(solve_adjoint(res, stepper, scheme), grid, mu);
  };

  std::mt19937_64 rng(seed);
  FeField x(static_cast<Eigen::Index>(space.dof_count()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = 0.5 + std::ldexp(static_cast<double>(rng() >> 11), -53);
  }
  x /= l2_norm(space, x);

  double best = 0.0;
  for (int k = 0; k < iters; ++k) {
    const FeField y = apply(x);
    best = std::max(best, l2_inner(space, x, y));
    const double size = l2_norm(space, y);
    if (size == 0.0) {
      if (k == 0) return 0.0;  // the operator vanishes identically
      throw NumericalError("estimate_L: power iterate collapsed to zero");
    }
    x = y / size;
  }
  return best;
}

FeField ista_step(const FeField& f_k, const Trajectory& v, const InverseConfig& config,
                  const TimeGrid& grid, const TemporalProfile& mu) {
  const double denom = config.L + config.beta;
  return (config.L / denom) * f_k - (1.0 / denom) * adjoint_sum(v, grid, mu);
}

double relative_l2_error(const FemSpace& space, const FeField& a, const FeField& b) {
  const double reference = l2_norm(space, b);
  if (reference == 0.0) throw ValidationError("relative_l2_error: reference has zero norm");
  return l2_norm(space, a - b) / reference;
}

ReconstructionResult reconstruct(const Observation& obs, const InverseConfig& config,
                                 const Stepper& stepper, const TemporalProfile& mu,
                                 const std::optional<FeField>& f_true) {
  const FemSpace& space = stepper.space();
  config.validate(space.dof_count());
  if (!obs.mask) throw ValidationError("reconstruct: observation has no subdomain mask");

  ReconstructionResult result;
  FeField f = config.f0;
  Trajectory u = solve_forward(f, mu, stepper);
  result.objective_trace.push_back(objective_from_trajectory(u, f, obs, config.beta, stepper));

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    const Trajectory v = solve_adjoint(make_residual(u, obs), stepper, config.adjoint);
    FeField next = ista_step(f, v, config, stepper.grid(), mu);

    const double current_norm = l2_norm(space, f);
    if (current_norm == 0.0) {
      std::ostringstream os;
      os << "reconstruct: iterate " << k << " has zero norm; stopping test undefined";
      throw NumericalError(os.str());
    }
    const double rel_change = l2_norm(space, next - f) / current_norm;
    result.rel_change_trace.push_back(rel_change);

    f = std::move(next);
    u = solve_forward(f, mu, stepper);
    result.objective_trace.push_back(objective_from_trajectory(u, f, obs, config.beta, stepper));
    result.iterations = k + 1;
    if (rel_change < config.eps) {
      result.converged = true;
      break;
    }
  }

  result.f_rec = std::move(f);
  if (f_true) result.err = relative_l2_error(space, result.f_rec, *f_true);
  return result;
}

}  // namespace tfsrc
