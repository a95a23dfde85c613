#pragma once

#include <vector>

#include "tfsrc/forward.hpp"
#include "tfsrc/observation.hpp"

namespace tfsrc {

/// Load vectors r^m = omega_mass * (u^m - u^delta,m), m = 0..M.
struct Residual {
  std::vector<Vector> slices;
};

Residual make_residual(const Trajectory& u, const Observation& obs);

/// Backward problem with terminal condition v^M = 0. Solved as the forward
/// L1 scheme for w^k = v^{M-k}, driven at step k by the load r^{M-k}.
Trajectory solve_adjoint(const Residual& res, const Stepper& stepper);

/// Exact transpose of the discrete forward map with respect to the
/// trapezoidal space-time pairing:
///   v^k = (1/c_k) sum_{m=k}^{M} G_{m-k} b0 c_m r^m,  v^0 = 0,
/// where G_j is the j-step response of the L1 march. Computed with the same
/// march as solve_adjoint, driven by c_m r^m shifted by one time node.
Trajectory solve_adjoint_transposed(const Residual& res, const Stepper& stepper);

/// Which discrete adjoint drives the gradient.
enum class AdjointScheme {
  mirrored,    // solve_adjoint: L1 discretization of the backward problem
  transposed,  // solve_adjoint_transposed: adjoint of the discretization
};

Trajectory solve_adjoint(const Residual& res, const Stepper& stepper, AdjointScheme scheme);

/// tau * sum_m c_m mu^m v^m, the nodal representative of the misfit gradient
/// (up to the factor 2).
FeField adjoint_sum(const Trajectory& v, const TimeGrid& grid, const TemporalProfile& mu);

struct AdjointIdentity {
  double lhs = 0.0;  // tau sum c_m (u^m(f) - u^delta,m)^T M_omega u^m(p)
  double rhs = 0.0;  // tau sum c_m mu^m p^T M v^m(f)

  double relative_gap() const;
};

AdjointIdentity adjoint_identity_check(const FeField& f, const FeField& p, const Observation& obs,
                                       const Stepper& stepper, const TemporalProfile& mu,
                                       AdjointScheme scheme = AdjointScheme::transposed);

}  // namespace tfsrc
