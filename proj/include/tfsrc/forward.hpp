#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "tfsrc/fracops.hpp"
#include "tfsrc/mesh_fem.hpp"

namespace tfsrc {

/// Uniform partition t_m = m * tau of [0, T] with the L1 weights and the
/// composite trapezoidal coefficients c_m (1/2 at both ends, 1 inside).
struct TimeGrid {
  double T = 1.0;
  std::size_t M = 1;
  double tau = 1.0;
  L1Weights weights;
  std::vector<double> trap;

  double t(std::size_t m) const { return static_cast<double>(m) * tau; }
};

TimeGrid make_time_grid(double T, std::size_t M, double alpha);

/// Samples mu(t_0)..mu(t_M).
struct TemporalProfile {
  std::vector<double> samples;
};

TemporalProfile sample_profile(const TimeGrid& grid, const std::function<double(double)>& mu);

/// Slices u^0..u^M of a space-time FE function.
struct Trajectory {
  std::vector<Vector> slices;
};

/// Marches the L1 / P1 scheme
///   [(1+b0) M + b0 K] u^{m+1} = M [sum_{j<m} (d_j - d_{j+1}) u^{m-j} + d_m u^0] + b0 s^{m+1}
/// from u^0 = 0, where s^{m+1} is a load vector supplied by the caller.
/// The system matrix is factored once at construction.
class Stepper {
 public:
  Stepper(std::shared_ptr<const FemSpace> space, TimeGrid grid);

  const FemSpace& space() const { return *space_; }
  const std::shared_ptr<const FemSpace>& space_ptr() const { return space_; }
  const TimeGrid& grid() const { return grid_; }

  /// `load(m)` returns the load vector for time node m (called for m = 1..M).
  Trajectory march(const std::function<Vector(std::size_t)>& load) const;

 private:
  std::shared_ptr<const FemSpace> space_;
  TimeGrid grid_;
  SpdSolver system_;
};

Trajectory solve_forward(const FeField& f, const TemporalProfile& mu, const Stepper& stepper);

}  // namespace tfsrc
