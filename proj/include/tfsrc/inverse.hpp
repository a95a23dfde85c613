#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tfsrc/adjoint.hpp"
#include "tfsrc/forward.hpp"
#include "tfsrc/observation.hpp"

namespace tfsrc {

struct InverseConfig {
  double beta = 1e-4;
  double L = 1.0;
  double eps = 2e-3;
  std::size_t max_iters = 500;
  AdjointScheme adjoint = AdjointScheme::transposed;
  FeField f0;

  void validate(std::size_t dof_count) const;
};

struct ReconstructionResult {
  FeField f_rec;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;   // J(f^0) .. J(f^K)
  std::vector<double> rel_change_trace;  // ||f^{k+1} - f^k|| / ||f^k||, k = 0..K-1
  std::optional<double> err;             // ||f^K - f*|| / ||f*|| when f* is known
};

/// Trapezoidal misfit over omega x (0,T) plus beta * ||f||^2.
double objective(const FeField& f, const Observation& obs, double beta, const Stepper& stepper,
                 const TemporalProfile& mu);

/// Objective value for an already computed forward trajectory.
double objective_from_trajectory(const Trajectory& u, const FeField& f, const Observation& obs,
                                 double beta, const Stepper& stepper);

/// L2-Riesz representative g = 2 (tau sum_m c_m mu^m v^m + beta f) of J'(f),
/// with v the adjoint state driven by the residual of f. With the mirrored
/// adjoint this is consistent only up to O(tau).
FeField gradient(const FeField& f, const Observation& obs, double beta, const Stepper& stepper,
                 const TemporalProfile& mu, AdjointScheme scheme = AdjointScheme::transposed);

/// Power iteration on f -> tau sum_m c_m mu^m v^m(f) with zero data, in the
/// mass-weighted inner product. Returns the running maximum of the Rayleigh
/// quotients, an estimate of ||A_h||^2.
double estimate_L(const Stepper& stepper, const SubdomainMask& mask, const TemporalProfile& mu,
                  int iters, std::uint64_t seed = 0x5eed,
                  AdjointScheme scheme = AdjointScheme::transposed);

/// f^{k+1} = L/(L+beta) f^k - tau/(L+beta) sum_m c_m mu^m v^m.
FeField ista_step(const FeField& f_k, const Trajectory& v, const InverseConfig& config,
                  const TimeGrid& grid, const TemporalProfile& mu);

ReconstructionResult reconstruct(const Observation& obs, const InverseConfig& config,
                                 const Stepper& stepper, const TemporalProfile& mu,
                                 const std::optional<FeField>& f_true = std::nullopt);

/// Relative mass-weighted L2 error ||a - b|| / ||b||.
double relative_l2_error(const FemSpace& space, const FeField& a, const FeField& b);

}  // namespace tfsrc
