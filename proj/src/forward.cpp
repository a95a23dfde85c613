#include "tfsrc/forward.hpp"

#include <cmath>
#include <sstream>

#include "tfsrc/errors.hpp"

namespace tfsrc {

TimeGrid make_time_grid(double T, std::size_t M, double alpha) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("make_time_grid: T must be positive");
  if (M == 0) throw ValidationError("make_time_grid: M must be at least 1");
  TimeGrid grid;
  grid.T = T;
  grid.M = M;
  grid.tau = T / static_cast<double>(M);
  grid.weights = l1_weights(alpha, grid.tau, M);
  grid.trap.assign(M + 1, 1.0);
  grid.trap.front() = 0.5;
  grid.trap.back() = 0.5;
  return grid;
}

TemporalProfile sample_profile(const TimeGrid& grid, const std::function<double(double)>& mu) {
  TemporalProfile profile;
  profile.samples.reserve(grid.M + 1);
  for (std::size_t m = 0; m <= grid.M; ++m) profile.samples.push_back(mu(grid.t(m)));
  return profile;
}

namespace {

SparseMatrix system_matrix(const FemSpace& space, double b0) {
  SparseMatrix a = (1.0 + b0) * space.mass() + b0 * space.stiffness();
  a.makeCompressed();
  return a;
}

}  // namespace

Stepper::Stepper(std::shared_ptr<const FemSpace> space, TimeGrid grid)
    : space_(std::move(space)),
      grid_(std::move(grid)),
      system_(system_matrix(*space_, grid_.weights.b0)) {}

Trajectory Stepper::march(const std::function<Vector(std::size_t)>& load) const {
  const std::size_t dofs = space_->dof_count();
  const auto& d = grid_.weights.d;
  const double b0 = grid_.weights.b0;

  Trajectory out;
  out.slices.reserve(grid_.M + 1);
  out.slices.push_back(Vector::Zero(static_cast<Eigen::Index>(dofs)));

  Vector history(static_cast<Eigen::Index>(dofs));
  for (std::size_t m = 0; m < grid_.M; ++m) {
    history = d[m] * out.slices[0];
    for (std::size_t j = 0; j < m; ++j) history += (d[j] - d[j + 1]) * out.slices[m - j];

    const Vector source = load(m + 1);
    if (static_cast<std::size_t>(source.size()) != dofs) {
      throw ValidationError("Stepper::march: load vector has the wrong length");
    }
    Vector rhs = space_->mass() * history + b0 * source;
    Vector next = system_.solve(rhs);
    if (!next.allFinite()) {
      std::ostringstream os;
      os << "Stepper::march: non-finite values at time step " << (m + 1);
      throw NumericalError(os.str());
    }
    out.slices.push_back(std::move(next));
  }
  return out;
}

Trajectory solve_forward(const FeField& f, const TemporalProfile& mu, const Stepper& stepper) {
  const std::size_t dofs = stepper.space().dof_count();
  if (static_cast<std::size_t>(f.size()) != dofs) {
    throw ValidationError("solve_forward: source length does not match the space");
  }
  if (mu.samples.size() != stepper.grid().M + 1) {
    throw ValidationError("solve_forward: temporal profile needs M+1 samples");
  }
  const Vector source_load = stepper.space().mass() * f;
  return stepper.march([&](std::size_t m) -> Vector { return mu.samples[m] * source_load; });
}

}  // namespace tfsrc
