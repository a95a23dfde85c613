#include "tfsrc/adjoint.hpp"

#include <algorithm>
#include <cmath>

#include "tfsrc/errors.hpp"

namespace tfsrc {

Residual make_residual(const Trajectory& u, const Observation& obs) {
  if (!obs.mask) throw ValidationError("make_residual: observation has no subdomain mask");
  if (u.slices.size() != obs.slices.size()) {
    throw ValidationError("make_residual: trajectory and observation differ in slice count");
  }
  Residual res;
  res.slices.reserve(u.slices.size());
  for (std::size_t m = 0; m < u.slices.size(); ++m) {
    if (u.slices[m].size() != obs.slices[m].size()) {
      throw ValidationError("make_residual: slice length mismatch");
    }
    res.slices.push_back(obs.mask->omega_mass * (u.slices[m] - obs.slices[m]));
  }
  return res;
}

Trajectory solve_adjoint(const Residual& res, const Stepper& stepper) {
  const std::size_t M = stepper.grid().M;
  if (res.slices.size() != M + 1) {
    throw ValidationError("solve_adjoint: residual needs M+1 slices");
  }
  Trajectory w = stepper.march([&](std::size_t k) -> Vector { return res.slices[M - k]; });
  std::reverse(w.slices.begin(), w.slices.end());
  return w;
}

Trajectory solve_adjoint_transposed(const Residual& res, const Stepper& stepper) {
  const TimeGrid& grid = stepper.grid();
  const std::size_t M = grid.M;
  if (res.slices.size() != M + 1) {
    throw ValidationError("solve_adjoint_transposed: residual needs M+1 slices");
  }
  // W^j collects the loads c_m r^m for m >= M+1-j; v^k = W^{M+1-k} / c_k.
  const Trajectory w = stepper.march(
      [&](std::size_t j) -> Vector { return grid.trap[M + 1 - j] * res.slices[M + 1 - j]; });
  Trajectory v;
  v.slices.resize(M + 1);
  v.slices[0] = Vector::Zero(res.slices[0].size());
  for (std::size_t k = 1; k <= M; ++k) v.slices[k] = w.slices[M + 1 - k] / grid.trap[k];
  return v;
}

Trajectory solve_adjoint(const Residual& res, const Stepper& stepper, AdjointScheme scheme) {
  return scheme == AdjointScheme::transposed ? solve_adjoint_transposed(res, stepper)
                                             : solve_adjoint(res, stepper);
}

FeField adjoint_sum(const Trajectory& v, const TimeGrid& grid, const TemporalProfile& mu) {
  if (v.slices.size() != grid.M + 1 || mu.samples.size() != grid.M + 1) {
    throw ValidationError("adjoint_sum: expected M+1 slices and samples");
  }
  FeField sum = Vector::Zero(v.slices.front().size());
  for (std::size_t m = 0; m <= grid.M; ++m) sum += (grid.trap[m] * mu.samples[m]) * v.slices[m];
  return grid.tau * sum;
}

double AdjointIdentity::relative_gap() const {
  if (lhs == rhs) return 0.0;
  return std::abs(lhs - rhs) / std::abs(lhs);
}

AdjointIdentity adjoint_identity_check(const FeField& f, const FeField& p, const Observation& obs,
                                       const Stepper& stepper, const TemporalProfile& mu,
                                       AdjointScheme scheme) {
  const TimeGrid& grid = stepper.grid();
  const Trajectory uf = solve_forward(f, mu, stepper);
  const Trajectory up = solve_forward(p, mu, stepper);
  const Residual res = make_residual(uf, obs);
  const Trajectory v = solve_adjoint(res, stepper, scheme);

  AdjointIdentity out;
  for (std::size_t m = 0; m <= grid.M; ++m) {
    out.lhs += grid.trap[m] * res.slices[m].dot(up.slices[m]);
  }
  out.lhs *= grid.tau;
  out.rhs = p.dot(stepper.space().mass() * adjoint_sum(v, grid, mu));
  return out;
}

}  // namespace tfsrc
