#include <doctest.h>

#include <cmath>

#include "tfsrc/adjoint.hpp"
#include "tfsrc/errors.hpp"
#include "tfsrc/experiment.hpp"

using namespace tfsrc;

namespace {

Setup small_setup(int dim, int n, std::size_t M, double alpha, BoxComplement omega) {
  ExperimentConfig cfg;
  cfg.dim = dim;
  cfg.n = n;
  cfg.M = M;
  cfg.alpha = alpha;
  cfg.mu = {5.0, 10.0, 0.0};
  cfg.f_true = {dim == 1 ? "sin(pi x/2)+x^2+1" : "sin(x1)+sin(x2)+1", 0.0};
  cfg.omega = std::move(omega);
  return make_setup(cfg);
}

Residual random_residual(const Setup& s, std::uint64_t seed) {
  UniformNoise noise(seed);
  Residual r;
  for (std::size_t m = 0; m <= s.stepper->grid().M; ++m) {
    Vector slice(static_cast<Eigen::Index>(s.space->dof_count()));
    for (auto& x : slice) x = noise.next();
    r.slices.push_back(slice);
  }
  return r;
}

FeField random_field(const Setup& s, std::uint64_t seed) {
  UniformNoise noise(seed);
  FeField f(static_cast<Eigen::Index>(s.space->dof_count()));
  for (auto& x : f) x = noise.next();
  return f;
}

Observation noisy(const Setup& s, std::uint64_t seed) {
  Observation obs = gen_noise(solve_forward(s.f_true, s.mu, *s.stepper), 0.01, seed);
  obs.mask = s.mask;
  return obs;
}

}  // namespace

TEST_CASE("zero residual gives zero adjoint") {
  const Setup s = small_setup(1, 10, 10, 0.5, {{{0.2, 0.8}}});
  Residual r;
  r.slices.assign(11, Vector::Zero(11));
  for (auto scheme : {AdjointScheme::mirrored, AdjointScheme::transposed}) {
    for (const auto& v : solve_adjoint(r, *s.stepper, scheme).slices) CHECK(v.norm() == 0.0);
  }
}

TEST_CASE("terminal and initial conditions") {
  const Setup s = small_setup(1, 10, 10, 0.5, {});
  const Residual r = random_residual(s, 3);
  CHECK(solve_adjoint(r, *s.stepper).slices.back().norm() == 0.0);
  CHECK(solve_adjoint_transposed(r, *s.stepper).slices.front().norm() == 0.0);
}

TEST_CASE("mirrored adjoint is the time-reversed forward march") {
  const Setup s = small_setup(2, 4, 8, 0.3, {});
  const Residual r = random_residual(s, 5);
  const std::size_t M = s.stepper->grid().M;
  const Trajectory w = s.stepper->march([&](std::size_t k) { return r.slices[M - k]; });
  const Trajectory v = solve_adjoint(r, *s.stepper);
  for (std::size_t m = 0; m <= M; ++m) CHECK((v.slices[m] - w.slices[M - m]).norm() < 1e-14);
}

TEST_CASE("spatially constant residual follows the scalar recurrence") {
  const Setup s = small_setup(1, 6, 12, 0.6, {});
  const TimeGrid& g = s.stepper->grid();
  Residual r;
  const Vector load = s.space->mass() * Vector::Ones(7);
  r.slices.assign(g.M + 1, load);
  const Trajectory v = solve_adjoint(r, *s.stepper);
  std::vector<double> a(g.M + 1, 0.0);
  const auto& d = g.weights.d;
  for (std::size_t m = 0; m < g.M; ++m) {
    double hist = d[m] * a[0];
    for (std::size_t j = 0; j < m; ++j) hist += (d[j] - d[j + 1]) * a[m - j];
    a[m + 1] = (hist + g.weights.b0) / (1.0 + g.weights.b0);
  }
  for (std::size_t k = 0; k <= g.M; ++k) {
    CHECK((v.slices[g.M - k].array() - a[k]).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adjoint solves are linear in the residual") {
  const Setup s = small_setup(1, 10, 10, 0.5, {});
  const Residual r1 = random_residual(s, 1);
  const Residual r2 = random_residual(s, 2);
  Residual mix;
  for (std::size_t m = 0; m < r1.slices.size(); ++m) mix.slices.push_back(3.0 * r1.slices[m] - r2.slices[m]);
  for (auto scheme : {AdjointScheme::mirrored, AdjointScheme::transposed}) {
    const auto v1 = solve_adjoint(r1, *s.stepper, scheme);
    const auto v2 = solve_adjoint(r2, *s.stepper, scheme);
    const auto vm = solve_adjoint(mix, *s.stepper, scheme);
    for (std::size_t m = 0; m < vm.slices.size(); ++m) {
      CHECK((vm.slices[m] - (3.0 * v1.slices[m] - v2.slices[m])).norm() < 1e-12);
    }
  }
}

TEST_CASE("transposed adjoint satisfies the discrete identity to round-off") {
  const Setup s1 = small_setup(1, 10, 10, 0.5, {{{0.2, 0.8}}});
  const Setup s2 = small_setup(2, 10, 6, 0.8, {{{0.1, 0.9}, {0.2, 0.7}}});
  for (const Setup* s : {&s1, &s2}) {
    const Observation obs = noisy(*s, 9);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const AdjointIdentity id = adjoint_identity_check(random_field(*s, 10 + k), random_field(*s, 20 + k),
                                                        obs, *s->stepper, s->mu, AdjointScheme::transposed);
      CHECK(id.relative_gap() < 1e-12);
    }
  }
}

TEST_CASE("mirrored adjoint gap closes under refinement") {
  double previous = 1.0;
  for (std::size_t M : {10, 20, 40, 80}) {
    const Setup s = small_setup(1, 10, M, 0.5, {{{0.2, 0.8}}});
    const AdjointIdentity id = adjoint_identity_check(random_field(s, 1), random_field(s, 2), noisy(s, 3),
                                                      *s.stepper, s.mu, AdjointScheme::mirrored);
    CHECK(id.relative_gap() < previous);
    previous = id.relative_gap();
  }
  CHECK(previous < 0.05);
}

TEST_CASE("identity degenerates to zero on trivial inputs") {
  const Setup s = small_setup(1, 10, 10, 0.5, {{{0.2, 0.8}}});
  Observation exact;
  exact.slices = solve_forward(s.f_true, s.mu, *s.stepper).slices;
  exact.mask = s.mask;
  for (auto scheme : {AdjointScheme::mirrored, AdjointScheme::transposed}) {
    const AdjointIdentity self = adjoint_identity_check(s.f_true, random_field(s, 4), exact, *s.stepper, s.mu, scheme);
    CHECK(self.lhs == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(self.rhs == doctest::Approx(0.0).epsilon(1e-12));
    const AdjointIdentity zero_p =
        adjoint_identity_check(random_field(s, 5), Vector::Zero(11), noisy(s, 6), *s.stepper, s.mu, scheme);
    CHECK(zero_p.lhs == 0.0);
    CHECK(zero_p.rhs == 0.0);
    CHECK(zero_p.relative_gap() == 0.0);
  }
}

TEST_CASE("adjoint does not grow under refinement") {
  auto ratio = [](std::size_t M) {
    const Setup s = small_setup(1, 20, M, 0.5, {});
    Residual r;
    const Vector load = s.space->mass() * s.space->interpolate([](const Point& p) { return std::cos(3 * p[0]); });
    r.slices.assign(M + 1, load);
    double peak = 0.0;
    for (const auto& v : solve_adjoint(r, *s.stepper).slices) peak = std::max(peak, l2_norm(*s.space, v));
    return peak / load.norm();
  };
  CHECK(std::abs(ratio(40) / ratio(10) - 1.0) < 0.05);
}

TEST_CASE("make_residual restricts to omega") {
  const Setup s = small_setup(1, 10, 4, 0.5, {{{0.2, 0.8}}});
  const Trajectory u = solve_forward(s.f_true, s.mu, *s.stepper);
  Observation obs;
  obs.mask = s.mask;
  obs.slices.assign(5, Vector::Zero(11));
  const Residual r = make_residual(u, obs);
  REQUIRE(r.slices.size() == 5);
  CHECK(r.slices[0].norm() == 0.0);
  for (int i = 3; i <= 7; ++i) CHECK(r.slices[4][i] == 0.0);
  CHECK(r.slices[4][0] != 0.0);
  obs.slices.pop_back();
  CHECK_THROWS_AS(make_residual(u, obs), ValidationError);
}
