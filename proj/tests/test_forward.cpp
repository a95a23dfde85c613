#include <doctest.h>

#include <cmath>

#include "tfsrc/errors.hpp"
#include "tfsrc/forward.hpp"

using namespace tfsrc;

namespace {

std::shared_ptr<const Stepper> make_stepper(int dim, int n, std::size_t M, double alpha) {
  return std::make_shared<const Stepper>(assemble(build_mesh(dim, n)), make_time_grid(1.0, M, alpha));
}

// u^{m+1} of the scalar L1 scheme (1+b0) a^{m+1} = sum_{j<m}(d_j - d_{j+1}) a^{m-j} + d_m a^0 + b0 s^{m+1}
std::vector<double> scalar_recurrence(const TimeGrid& g, const std::vector<double>& s) {
  const auto& d = g.weights.d;
  std::vector<double> a(g.M + 1, 0.0);
  for (std::size_t m = 0; m < g.M; ++m) {
    double hist = d[m] * a[0];
    for (std::size_t j = 0; j < m; ++j) hist += (d[j] - d[j + 1]) * a[m - j];
    a[m + 1] = (hist + g.weights.b0 * s[m + 1]) / (1.0 + g.weights.b0);
  }
  return a;
}

}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g = make_time_grid(2.0, 8, 0.4);
  CHECK(g.tau == doctest::Approx(0.25));
  CHECK(g.trap.size() == 9);
  CHECK(g.trap.front() == 0.5);
  CHECK(g.trap.back() == 0.5);
  CHECK(g.trap[3] == 1.0);
  CHECK(g.weights.d.size() == 8);
  CHECK(g.t(8) == doctest::Approx(2.0));
  CHECK_THROWS_AS(make_time_grid(0.0, 8, 0.4), ValidationError);
  CHECK_THROWS_AS(make_time_grid(1.0, 0, 0.4), ValidationError);
}

TEST_CASE("zero source gives zero trajectory") {
  const auto st = make_stepper(1, 10, 10, 0.5);
  const TemporalProfile mu = sample_profile(st->grid(), [](double t) { return 5 + 10 * t; });
  const Trajectory u = solve_forward(Vector::Zero(11), mu, *st);
  REQUIRE(u.slices.size() == 11);
  for (const auto& s : u.slices) CHECK(s.norm() == 0.0);
}

TEST_CASE("constant source follows the scalar recurrence") {
  for (int dim : {1, 2}) {
    const auto st = make_stepper(dim, 6, 16, 0.3);
    const TimeGrid& g = st->grid();
    const TemporalProfile mu = sample_profile(g, [](double t) { return 1 + t * t; });
    const FeField f = Vector::Constant(static_cast<Eigen::Index>(st->space().dof_count()), 2.0);
    const Trajectory u = solve_forward(f, mu, *st);
    std::vector<double> s(g.M + 1);
    for (std::size_t m = 0; m <= g.M; ++m) s[m] = 2.0 * mu.samples[m];
    const auto a = scalar_recurrence(g, s);
    for (std::size_t m = 0; m <= g.M; ++m) {
      CHECK((u.slices[m].array() - a[m]).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("forward map is linear in f") {
  const auto st = make_stepper(2, 5, 8, 0.7);
  const TemporalProfile mu = sample_profile(st->grid(), [](double t) { return 1 + 3 * t; });
  const auto n = static_cast<Eigen::Index>(st->space().dof_count());
  const FeField f = Vector::LinSpaced(n, -1.0, 2.0);
  const FeField p = Vector::LinSpaced(n, 3.0, 0.5).array().sin();
  const Trajectory uf = solve_forward(f, mu, *st);
  const Trajectory up = solve_forward(p, mu, *st);
  const Trajectory uc = solve_forward(2.5 * f - p, mu, *st);
  for (std::size_t m = 0; m <= st->grid().M; ++m) {
    CHECK((uc.slices[m] - (2.5 * uf.slices[m] - up.slices[m])).norm() < 1e-12);
  }
}

TEST_CASE("constant-source solution approaches 1 - E_alpha(-t^alpha)") {
  for (double alpha : {0.3, 0.8}) {
    double previous = 1e300;
    for (std::size_t M : {20, 40, 80}) {
      const auto st = make_stepper(1, 4, M, alpha);
      const TemporalProfile mu = sample_profile(st->grid(), [](double) { return 1.0; });
      const Trajectory u = solve_forward(Vector::Ones(5), mu, *st);
      const double exact = 1.0 - mittag_leffler({alpha}, -1.0);
      const double err = std::abs(u.slices.back()[2] - exact);
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous < 5e-3);
  }
}

TEST_CASE("no growth under refinement") {
  auto ratio = [](int n, std::size_t M) {
    const auto st = make_stepper(1, n, M, 0.5);
    const TemporalProfile mu = sample_profile(st->grid(), [](double t) { return 5 + 10 * t; });
    const FeField f = st->space().interpolate([](const Point& p) { return std::sin(3 * p[0]) + 2; });
    double peak = 0.0;
    for (const auto& s : solve_forward(f, mu, *st).slices) peak = std::max(peak, l2_norm(st->space(), s));
    return peak / l2_norm(st->space(), f);
  };
  const double base = ratio(10, 10);
  CHECK(std::abs(ratio(40, 40) / base - 1.0) <= 0.05);
  CHECK(base < 16.0);  // bounded by max |mu|
}

TEST_CASE("forward input validation") {
  const auto st = make_stepper(1, 4, 4, 0.5);
  TemporalProfile mu = sample_profile(st->grid(), [](double) { return 1.0; });
  CHECK_THROWS_AS(solve_forward(Vector::Ones(3), mu, *st), ValidationError);
  TemporalProfile short_mu{{1.0, 1.0}};
  CHECK_THROWS_AS(solve_forward(Vector::Ones(5), short_mu, *st), ValidationError);
  mu.samples[2] = NAN;
  CHECK_THROWS_AS(solve_forward(Vector::Ones(5), mu, *st), NumericalError);
}
